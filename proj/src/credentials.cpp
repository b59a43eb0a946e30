#include "rfidlbs/credentials.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <fstream>
#include <sstream>

#include "rfidlbs/reader_link.hpp"

namespace rfidlbs {

Sha256Digest sha256(std::span<const std::uint8_t> data) {
  Sha256Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 failed");
  }
  return out;
}

std::vector<std::uint8_t> random_bytes(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> parse_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

namespace {

Sha256Digest salted_hash(std::span<const std::uint8_t> salt, std::string_view password) {
  std::vector<std::uint8_t> buf(salt.begin(), salt.end());
  buf.insert(buf.end(), password.begin(), password.end());
  return sha256(buf);
}

std::string lower_hex(std::span<const std::uint8_t> bytes) {
  std::string s = to_hex(bytes);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

CredentialStore CredentialStore::parse(std::istream& in) {
  CredentialStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto c1 = line.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(':', c1 + 1);
    if (c1 == 0 || c2 == std::string::npos) {
      throw CredentialError("credentials line " + std::to_string(line_no) +
                            ": expected username:salt_hex:hash_hex");
    }
    auto salt = parse_hex(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
    auto hash = parse_hex(std::string_view(line).substr(c2 + 1));
    if (!salt || !hash || hash->size() != 32) {
      throw CredentialError("credentials line " + std::to_string(line_no) +
                            ": bad salt or hash hex");
    }
    Entry e;
    e.salt = std::move(*salt);
    std::copy(hash->begin(), hash->end(), e.hash.begin());
    store.entries_[line.substr(0, c1)] = std::move(e);
  }
  return store;
}

CredentialStore CredentialStore::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CredentialError("cannot open credentials " + file.string());
  return parse(in);
}

void CredentialStore::set_password(const std::string& user, std::string_view password,
                                   std::optional<std::vector<std::uint8_t>> salt) {
  if (user.empty() || user.find(':') != std::string::npos ||
      user.find('\n') != std::string::npos) {
    throw CredentialError("invalid username '" + user + "'");
  }
  Entry e;
  e.salt = salt ? std::move(*salt) : random_bytes(16);
  e.hash = salted_hash(e.salt, password);
  entries_[user] = std::move(e);
}

bool CredentialStore::verify(std::string_view user, std::string_view password) const {
  static const std::vector<std::uint8_t> kDummySalt(16, 0);
  static const Sha256Digest kDummyHash{};

  const auto it = entries_.find(user);
  const bool known = it != entries_.end();
  const auto& salt = known ? it->second.salt : kDummySalt;
  const auto& expected = known ? it->second.hash : kDummyHash;
  const Sha256Digest got = salted_hash(salt, password);
  const bool match = CRYPTO_memcmp(got.data(), expected.data(), got.size()) == 0;
  return known && match;
}

bool CredentialStore::contains(std::string_view user) const {
  return entries_.find(user) != entries_.end();
}

std::string CredentialStore::serialize() const {
  std::ostringstream out;
  for (const auto& [user, e] : entries_) {
    out << user << ':' << lower_hex(e.salt) << ':' << lower_hex(e.hash) << '\n';
  }
  return out.str();
}

void CredentialStore::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw CredentialError("cannot write credentials " + file.string());
  out << serialize();
}

std::string new_session_token() { return lower_hex(random_bytes(16)); }

SessionTable::SessionTable(Clock clock, double idle_timeout)
    : clock_(std::move(clock)), idle_timeout_(idle_timeout) {}

Session SessionTable::issue(const std::string& user) {
  const double now = clock_();
  std::lock_guard lock(mu_);
  std::string token;
  do {
    token = new_session_token();
  } while (sessions_.contains(token));
  Session s{token, user, now, now};
  sessions_.emplace(token, s);
  return s;
}

std::optional<Session> SessionTable::validate(std::string_view token) {
  const double now = clock_();
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) return std::nullopt;
  if (now - it->second.last_used > idle_timeout_) {
    sessions_.erase(it);
    return std::nullopt;
  }
  it->second.last_used = now;
  return it->second;
}

std::size_t SessionTable::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace rfidlbs
