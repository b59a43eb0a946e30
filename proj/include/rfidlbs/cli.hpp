#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rfidlbs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct Serve {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::optional<std::filesystem::path> registry;
  std::optional<std::filesystem::path> credentials;
  std::optional<std::filesystem::path> assets;
};

struct Simulate {
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

struct Interactive {
  std::filesystem::path scenario;
  std::string host = "127.0.0.1";
  int port = 8080;
  double speed = 1.0;
  std::optional<std::filesystem::path> credentials;
  std::optional<std::filesystem::path> assets;
  std::optional<std::filesystem::path> web;
};

struct RegistryCmd {
  enum class Action { Add, List, Check };
  Action action = Action::List;
  std::filesystem::path file;
  // add only
  std::string tag;
  std::string name;
  std::string description;
  std::optional<std::string> image;
  std::vector<std::string> extras;  // topic=text
};

struct Passwd {
  std::filesystem::path file;
  std::string user;
  std::string password;
};

using Command = std::variant<Serve, Simulate, Interactive, RegistryCmd, Passwd>;

struct ParseOutcome {
  std::optional<Command> command;
  int exit_code = kExitOk;  // meaningful when command is empty
};

/// args excludes the program name. Usage errors and --help are written to
/// `out`/`err` and reported through exit_code.
ParseOutcome parse_args(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err);

int execute(const Command& command, std::ostream& out, std::ostream& err);

int cmd_simulate(const Simulate& cmd, std::ostream& out, std::ostream& err);
int cmd_serve(const Serve& cmd, std::ostream& out, std::ostream& err);
int cmd_interactive(const Interactive& cmd, std::ostream& out, std::ostream& err);
int cmd_registry(const RegistryCmd& cmd, std::ostream& out, std::ostream& err);
int cmd_passwd(const Passwd& cmd, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace rfidlbs::cli
