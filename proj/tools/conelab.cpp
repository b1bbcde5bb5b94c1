#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Killed lattice random walks with drift in cones"};
  app.require_subcommand(1);
  conelab::app::Invocation inv;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads for Monte Carlo (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"cramer", "Cramer point h, c = R(h) and the tilted law"},
      {"whiten", "whitening matrix, image cone and degree p"},
      {"harmonic", "tables of V, V', U, U' and kappa"},
      {"dp", "exact survival series and tail fit"},
      {"simulate", "direct and importance-sampled survival, Z chain ensemble"},
      {"qsd", "quasi-stationary distribution on the truncated window"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));
  auto* verify = app.add_subcommand("verify", "check limit laws: a selector or all");
  verify->add_option("selector", inv.selector, "theorem1, cor_ratio, hazard, yaglom, exit, bridge, expmoment, "
                                               "driftless_bound or all")
      ->required();
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (auto* sub : app.get_subcommands()) {
    inv.command = sub->get_name();
    if (sub->count("--seed")) inv.seed = seed;
    if (sub->count("--workers")) inv.workers = workers;
    if (sub->count("--out")) inv.out_dir = out;
  }
  return conelab::app::run(inv, std::cout, std::cerr);
}
