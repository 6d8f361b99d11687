#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kagome/config.hpp"
#include "kagome/io.hpp"
#include "kagome/recipes.hpp"

extern char** environ;

namespace {

int exit_code(const std::exception& e) {
  if (dynamic_cast<const kagome::ConfigError*>(&e)) return 2;
  if (dynamic_cast<const kagome::ConstraintError*>(&e) || dynamic_cast<const kagome::DomainError*>(&e)) return 3;
  if (dynamic_cast<const kagome::ConvergenceError*>(&e) || dynamic_cast<const kagome::SolverError*>(&e)) return 4;
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breathing-Kagome atomic metasurface simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kagome::io::version());

  std::string config_path;
  std::string out_dir;
  int threads = -1;
  long long seed = -1;
  double sum_radius = 0.0;
  bool quiet = false;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "INI config file")->envname("KAGOME_CONFIG");
  app.add_option("--out", out_dir, "output directory (default out/<command>)")->envname("KAGOME_OUT");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->envname("KAGOME_THREADS");
  app.add_option("--seed", seed, "base RNG seed")->envname("KAGOME_SEED");
  app.add_option("--sum-radius", sum_radius, "Bloch lattice-sum radius in units of d")->envname("KAGOME_SUM_RADIUS");
  app.add_flag("--quiet", quiet, "suppress progress output")->envname("KAGOME_QUIET");
  app.add_option("--set", overrides, "override a config key, section.key=value (repeatable)");

  std::string target;
  for (const auto& name : kagome::command_names()) {
    auto* sub = app.add_subcommand(name);
    if (name == "reproduce")
      sub->add_option("target", target, "figure recipe")->required()->check(CLI::IsMember(kagome::reproduce_targets()));
  }
  app.add_subcommand("schema", "print every config key with its unit and default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << nlohmann::json{{"status", "error"}, {"kind", "usage"}, {"message", e.what()}}.dump() << std::endl;
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "schema") {
    for (const auto& [key, doc] : kagome::config_schema()) std::cout << key << "  " << doc << '\n';
    return 0;
  }

  kagome::RunConfig cfg;
  try {
    if (!config_path.empty()) kagome::load_config_file(cfg, config_path);
    kagome::apply_environment(cfg, environ);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw kagome::ConfigError("--set expects section.key=value, got '" + o + "'", o);
      kagome::apply_setting(cfg, o.substr(0, eq), o.substr(eq + 1));
    }
    if (threads >= 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (sum_radius > 0.0) cfg.bloch.sum_radius = sum_radius;
    if (out_dir.empty()) out_dir = "out/" + command + (target.empty() ? "" : "-" + target);

    const auto summary = kagome::run_command(command, target, cfg, out_dir, quiet ? nullptr : &std::cerr);
    std::cout << nlohmann::json{{"status", "ok"}, {"out", out_dir}}.dump() << std::endl;
    if (!quiet) std::cerr << summary.dump(2) << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cout << kagome::error_json(e).dump() << std::endl;
    return exit_code(e);
  }
}
