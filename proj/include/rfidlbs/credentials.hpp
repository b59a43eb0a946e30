#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfidlbs {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> random_bytes(std::size_t n);
std::optional<std::vector<std::uint8_t>> parse_hex(std::string_view hex);

class CredentialError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One line per user: "username:salt_hex:hash_hex" with
/// hash = SHA-256(salt || password).
class CredentialStore {
public:
  static CredentialStore parse(std::istream& in);
  static CredentialStore load(const std::filesystem::path& file);

  /// Random 16-byte salt unless one is given.
  void set_password(const std::string& user, std::string_view password,
                    std::optional<std::vector<std::uint8_t>> salt = std::nullopt);

  /// Unknown users and wrong passwords take the same path and cost.
  bool verify(std::string_view user, std::string_view password) const;

  bool contains(std::string_view user) const;
  std::size_t size() const noexcept { return entries_.size(); }

  std::string serialize() const;
  void save(const std::filesystem::path& file) const;

private:
  struct Entry {
    std::vector<std::uint8_t> salt;
    Sha256Digest hash;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

struct Session {
  std::string token;  // 32 lowercase hex chars
  std::string user;
  double created = 0.0;
  double last_used = 0.0;
};

/// 128-bit random token as 32 hex characters.
std::string new_session_token();

/// Thread-safe session table with idle expiry.
class SessionTable {
public:
  using Clock = std::function<double()>;
  static constexpr double kDefaultIdleTimeout = 30 * 60.0;

  explicit SessionTable(Clock clock, double idle_timeout = kDefaultIdleTimeout);

  Session issue(const std::string& user);
  /// Refreshes last_used on success. Expired sessions are removed.
  std::optional<Session> validate(std::string_view token);
  std::size_t size() const;

private:
  Clock clock_;
  double idle_timeout_;
  mutable std::mutex mu_;
  std::map<std::string, Session, std::less<>> sessions_;
};

}  // namespace rfidlbs
