#include <ostream>

#include <CLI11.hpp>

#include "guesswork/cli.hpp"
#include "guesswork/errors.hpp"

namespace guesswork::cli {

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-user guesswork analysis"};
  app.require_subcommand(1);

  Options options;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t grid = 0;
  bool nats = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("--config", config_path, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
    }
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Override the config seed");
    cmd->add_option("--grid", grid, "Rate-curve grid points")->check(CLI::Range(std::size_t{3}, std::size_t{1} << 24));
    auto* bits = cmd->add_flag("--bits", "Report in bits (default)");
    cmd->add_flag("--nats", nats, "Report in nats")->excludes(bits);
  };

  auto* analyze = app.add_subcommand("analyze", "Renyi, sCGF, rate functions and growth exponents");
  auto* exact = app.add_subcommand("exact", "Exact guesswork PMFs by enumeration");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo guesswork estimates");
  auto* figures = app.add_subcommand("figures", "Datasets for the figures");
  auto* verify = app.add_subcommand("verify", "Run built-in verification fixtures");
  add_common(analyze, true);
  add_common(exact, true);
  add_common(simulate, true);
  add_common(figures, false);
  add_common(verify, false);
  std::string which = "all";
  figures->add_option("which", which, "fig1-left, fig1-right, fig2, fig3 or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    options.out_dir = out_dir;
    options.bits = !nats;
    for (auto* cmd : {analyze, exact, simulate, figures, verify}) {
      if (cmd->parsed()) {
        if (cmd->count("--seed")) {
          options.seed = seed;
        }
        if (cmd->count("--grid")) {
          options.grid = grid;
        }
      }
    }
    apply_environment(options);

    if (analyze->parsed()) {
      return cmd_analyze(load_config(config_path), options, out);
    }
    if (exact->parsed()) {
      return cmd_exact(load_config(config_path), options, out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(load_config(config_path), options, out);
    }
    if (figures->parsed()) {
      return cmd_figures(which, options, out);
    }
    return cmd_verify(options, out);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n(the simulate subcommand estimates the distribution by sampling)\n";
    return kExitResourceCap;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

} // namespace guesswork::cli
