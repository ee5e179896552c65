#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

qmcpde::RunConfig load_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
  qmcpde::RunConfig cfg = qmcpde::parse_config_file(path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw qmcpde::ConfigError("--set expects section.key=value, got '" + kv + "'");
    qmcpde::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Expected values of PDE functionals with lognormal random "
      "coefficients: circulant-embedding field sampling, CBC lattice rules, "
      "P1 finite elements"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "configuration file")
        ->required();
    sub->add_option("--set", overrides,
                    "override a config key, e.g. --set grid.m0=16");
  };

  CLI::App* embed = app.add_subcommand(
      "embed", "build the minimal positive definite circulant embedding");
  CLI::App* cbc = app.add_subcommand(
      "cbc", "construct a lattice generating vector for an embedding");
  CLI::App* run = app.add_subcommand("run", "single estimate, one CSV row");
  CLI::App* study =
      app.add_subcommand("study", "convergence study over a schedule");
  for (CLI::App* sub : {embed, cbc, run, study}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const qmcpde::RunConfig cfg = load_config(config_path, overrides);
    if (embed->parsed()) return qmcpde::cli::cmd_embed(cfg);
    if (cbc->parsed()) return qmcpde::cli::cmd_cbc(cfg);
    if (run->parsed()) return qmcpde::cli::cmd_run(cfg);
    return qmcpde::cli::cmd_study(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
