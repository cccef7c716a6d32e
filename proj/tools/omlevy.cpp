#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "omlevy/commands.hpp"
#include "omlevy/config.hpp"
#include "omlevy/errors.hpp"

int main(int argc, char** argv) {
  using namespace omlevy;
  CLI::App app{"Most probable transition pathways of Levy-driven degenerate SDEs"};
  app.fallthrough();

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  bool show_config = false;
  app.add_option("--config", config_file, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed (unsigned 64-bit)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--print-config", show_config, "Echo the fully resolved configuration");

  auto* mptp = app.add_subcommand("mptp", "Compute the most probable transition pathway");
  auto* simulate = app.add_subcommand("simulate", "Simulate raw or bridge-conditioned ensembles");
  auto* tube = app.add_subcommand("tube", "Estimate tube probabilities and log-ratios");
  auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_file.empty()) cfg = load_config(config_file);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (threads) cfg.threads = *threads;
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (show_config) print_config(std::cout, cfg);
  if (mptp->parsed()) return cmd_mptp(cfg, std::cout, std::cerr);
  if (simulate->parsed()) return cmd_simulate(cfg, std::cout, std::cerr);
  if (tube->parsed()) return cmd_tube(cfg, std::cout, std::cerr);
  if (validate->parsed()) return cmd_validate(cfg, std::cout, std::cerr);
  if (show_config) return kExitOk;
  std::cerr << app.help();
  return kExitConfig;
}
