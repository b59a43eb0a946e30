#include "rfidlbs/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>

#include "rfidlbs/http_server.hpp"
#include "rfidlbs/interactive.hpp"
#include "rfidlbs/pipeline.hpp"

namespace rfidlbs::cli {

namespace {

template <typename T>
void optional_path(CLI::App* app, const std::string& flag, std::optional<T>& target,
                   const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&target](const std::string& v) { target = T(v); }, help);
}

/// Blocks SIGINT/SIGTERM for this thread and any it spawns afterwards.
sigset_t block_shutdown_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

void wait_for_signal(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
}

}  // namespace

ParseOutcome parse_args(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"Indoor RFID location-based services: server, simulator, tools", "rfidlbs"};
  app.require_subcommand(1);

  Serve serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the location server");
  serve_cmd->add_option("--host", serve.host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Listen port")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  optional_path(serve_cmd, "--registry", serve.registry, "Registry TSV file");
  optional_path(serve_cmd, "--credentials", serve.credentials, "Credential file");
  optional_path(serve_cmd, "--assets", serve.assets, "Directory of image assets");

  Simulate sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario headless, print the event log");
  sim_cmd->add_option("scenario", sim.scenario, "Scenario TOML file")->required();
  sim_cmd->add_option_function<std::uint64_t>(
      "--seed", [&sim](std::uint64_t s) { sim.seed = s; }, "Override the scenario seed");
  optional_path(sim_cmd, "--out", sim.out, "Write the log here instead of stdout");

  Interactive inter;
  auto* inter_cmd = app.add_subcommand("interactive", "Run a scenario live behind an HTTP API");
  inter_cmd->add_option("scenario", inter.scenario, "Scenario TOML file")->required();
  inter_cmd->add_option("--host", inter.host, "Listen address")->capture_default_str();
  inter_cmd->add_option("--port", inter.port, "Listen port")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  inter_cmd->add_option("--speed", inter.speed, "Simulated seconds per wall second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  optional_path(inter_cmd, "--credentials", inter.credentials, "Credential file");
  optional_path(inter_cmd, "--assets", inter.assets, "Directory of image assets");
  optional_path(inter_cmd, "--web", inter.web, "Static web UI directory, served at /ui/");

  RegistryCmd reg;
  auto* reg_cmd = app.add_subcommand("registry", "Inspect or edit a registry file");
  reg_cmd->require_subcommand(1);
  auto* reg_list = reg_cmd->add_subcommand("list", "Print every record");
  reg_list->add_option("file", reg.file, "Registry TSV file")->required();
  auto* reg_check = reg_cmd->add_subcommand("check", "Validate a registry file");
  reg_check->add_option("file", reg.file, "Registry TSV file")->required();
  auto* reg_add = reg_cmd->add_subcommand("add", "Append a record");
  reg_add->add_option("file", reg.file, "Registry TSV file")->required();
  reg_add->add_option("tag", reg.tag, "Tag id, 10 hex characters")->required();
  reg_add->add_option("name", reg.name, "Location name")->required();
  reg_add->add_option("description", reg.description, "Description")->required();
  reg_add->add_option_function<std::string>(
      "--image", [&reg](const std::string& v) { reg.image = v; }, "Image asset reference");
  reg_add->add_option("--extra", reg.extras, "topic=text, repeatable");

  Passwd passwd;
  auto* passwd_cmd = app.add_subcommand("passwd", "Set a user's password in a credential file");
  passwd_cmd->add_option("file", passwd.file, "Credential file (created if missing)")->required();
  passwd_cmd->add_option("user", passwd.user, "User name")->required();
  passwd_cmd->add_option("password", passwd.password, "Password")->required();

  std::vector<const char*> argv{"rfidlbs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return ParseOutcome{std::nullopt, code == 0 ? kExitOk : kExitUsage};
  }

  if (serve_cmd->parsed()) return {serve};
  if (sim_cmd->parsed()) return {sim};
  if (inter_cmd->parsed()) return {inter};
  if (passwd_cmd->parsed()) return {passwd};
  if (reg_list->parsed()) reg.action = RegistryCmd::Action::List;
  if (reg_check->parsed()) reg.action = RegistryCmd::Action::Check;
  if (reg_add->parsed()) reg.action = RegistryCmd::Action::Add;
  return {reg};
}

int cmd_simulate(const Simulate& cmd, std::ostream& out, std::ostream& err) {
  try {
    Scenario sc = load_scenario(cmd.scenario);
    if (cmd.seed) sc.seed = *cmd.seed;
    const EventLog log = run(sc);
    if (cmd.out) {
      std::ofstream file(*cmd.out, std::ios::binary | std::ios::trunc);
      if (!file) {
        err << "error: cannot write " << cmd.out->string() << '\n';
        return kExitFailure;
      }
      log.write(file);
    } else {
      log.write(out);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_serve(const Serve& cmd, std::ostream& out, std::ostream& err) {
  try {
    Registry registry;
    if (cmd.registry) registry = load_registry(*cmd.registry);
    CredentialStore creds;
    if (cmd.credentials) creds = CredentialStore::load(*cmd.credentials);
    if (creds.size() == 0) err << "warning: no credentials loaded; nobody can log in\n";

    LocationService service(std::move(registry), std::move(creds), cmd.assets);
    const auto signals = block_shutdown_signals();
    HttpServer server([&service](const HttpRequest& r) { return service.handle(r); });
    const int port = server.bind(cmd.host, cmd.port);
    server.start();
    out << "serving " << service.registry()->records.size() << " locations on " << cmd.host
        << ':' << port << std::endl;
    wait_for_signal(signals);
    server.stop();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_interactive(const Interactive& cmd, std::ostream& out, std::ostream& err) {
  try {
    const Scenario sc = load_scenario(cmd.scenario);
    Registry registry;
    if (sc.registry_file) registry = load_registry(*sc.registry_file);
    InteractiveOptions opts;
    opts.speed = cmd.speed;
    opts.assets_dir = cmd.assets;
    opts.web_dir = cmd.web;
    if (cmd.credentials) opts.credentials = CredentialStore::load(*cmd.credentials);

    const auto signals = block_shutdown_signals();
    InteractiveSim sim(sc, std::move(registry), std::move(opts));
    const int port = sim.start(cmd.host, cmd.port);
    out << "interactive simulation on http://" << cmd.host << ':' << port
        << (cmd.web ? "/ui/" : "/sim/state") << std::endl;
    wait_for_signal(signals);
    sim.stop();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_registry(const RegistryCmd& cmd, std::ostream& out, std::ostream& err) {
  try {
    switch (cmd.action) {
      case RegistryCmd::Action::List: {
        const Registry reg = load_registry(cmd.file);
        for (const auto& [_, rec] : reg.records) out << format_registry_line(rec) << '\n';
        return kExitOk;
      }
      case RegistryCmd::Action::Check: {
        const Registry reg = load_registry(cmd.file);
        out << "ok: " << reg.records.size() << " records\n";
        return kExitOk;
      }
      case RegistryCmd::Action::Add: {
        Registry reg;
        if (std::filesystem::exists(cmd.file)) reg = load_registry(cmd.file);
        LocationRecord rec;
        rec.tag = TagId::parse(cmd.tag);
        rec.name = cmd.name;
        rec.description = cmd.description;
        rec.image_ref = cmd.image;
        for (const auto& extra : cmd.extras) {
          const auto eq = extra.find('=');
          if (eq == std::string::npos || eq == 0) {
            err << "error: extra '" << extra << "' is not topic=text\n";
            return kExitFailure;
          }
          rec.extras[extra.substr(0, eq)] = extra.substr(eq + 1);
        }
        if (reg.records.contains(rec.tag)) {
          err << "error: tag " << rec.tag.to_string() << " already registered\n";
          return kExitFailure;
        }
        reg.records.emplace(rec.tag, rec);
        save_registry(cmd.file, reg);
        out << "added " << rec.tag.to_string() << '\n';
        return kExitOk;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitFailure;
}

int cmd_passwd(const Passwd& cmd, std::ostream& out, std::ostream& err) {
  try {
    CredentialStore store;
    if (std::filesystem::exists(cmd.file)) store = CredentialStore::load(cmd.file);
    store.set_password(cmd.user, cmd.password);
    store.save(cmd.file);
    out << "password set for " << cmd.user << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int execute(const Command& command, std::ostream& out, std::ostream& err) {
  return std::visit(
      [&](const auto& cmd) -> int {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, Serve>) return cmd_serve(cmd, out, err);
        else if constexpr (std::is_same_v<T, Simulate>) return cmd_simulate(cmd, out, err);
        else if constexpr (std::is_same_v<T, Interactive>) return cmd_interactive(cmd, out, err);
        else if constexpr (std::is_same_v<T, RegistryCmd>) return cmd_registry(cmd, out, err);
        else return cmd_passwd(cmd, out, err);
      },
      command);
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto parsed = parse_args(args, std::cout, std::cerr);
  if (!parsed.command) return parsed.exit_code;
  return execute(*parsed.command, std::cout, std::cerr);
}

}  // namespace rfidlbs::cli
