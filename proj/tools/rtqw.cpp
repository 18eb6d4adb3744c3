#include <iostream>

#include <CLI11.hpp>

#include "rtqw/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Random-coin quantum walks on Z^d"};
  app.require_subcommand(1);
  rtqw::CliOptions opts;
  std::string config;
  std::string command;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", opts.seed, "Random seed");
    sub->add_option("--grid", opts.grid, "Torus grid points per axis");
    sub->callback([&, sub] { command = sub->get_name(); });
  };

  auto* simulate = app.add_subcommand("simulate", "Averaged position distribution after n steps");
  common(simulate);
  simulate->add_option("--n", opts.n, "Number of steps")->check(CLI::NonNegativeNumber);
  simulate->add_option("--samples", opts.samples, "Monte Carlo samples instead of the exact average");
  simulate->add_flag("--enumerate", opts.enumerate, "Average by enumerating all coin sequences");

  auto* spectral = app.add_subcommand("spectral", "Assumption check and diffusion matrices");
  common(spectral);

  auto* rates = app.add_subcommand("rates", "Moderate or large deviation rate table");
  common(rates);
  rates->add_option("--which", opts.which, "md or ld")->check(CLI::IsMember({"md", "ld"}));

  auto* mc = app.add_subcommand("mc", "Monte Carlo moment scaling");
  common(mc);
  mc->add_option("--n", opts.n, "Single step count overriding n_list")->check(CLI::PositiveNumber);
  mc->add_option("--samples", opts.samples, "Number of samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rtqw::kExitConfig;
  }
  return rtqw::run_command(command, config, opts, std::cerr);
}
