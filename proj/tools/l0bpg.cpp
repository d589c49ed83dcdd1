// l0bpg: solve, synth, frontier, oracle-check.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "l0bpg/cli/commands.hpp"

namespace {

using l0bpg::cli::Overrides;

void common_options(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_path, "JSON run config")->check(CLI::ExistingFile);
  app->add_option("-o,--out-dir", o.out_dir, "output directory (default: $L0BPG_OUT_DIR or .)");
  app->add_option("--seed", o.seed, "root seed; sub-seeds are derived from it");
  app->add_option("-j,--jobs", o.jobs, "worker threads for independent tasks")->check(CLI::PositiveNumber);
}

void solver_options(CLI::App* app, Overrides& o) {
  app->add_option("--alpha", o.alpha, "step size (default 0.999/L)");
  app->add_option("--lambda", o.lambda, "l0 penalty weight");
  app->add_option("--eps1", o.eps1, "initializer tolerance");
  app->add_option("--eps2", o.eps2, "outer-loop tolerance");
  app->add_option("--smoothness", o.smoothness, "override the smoothness constant L");
  app->add_option("--max-outer-iters", o.max_outer_iters);
  app->add_option("--max-init-iters", o.max_init_iters);
  app->add_option("--loss", o.loss, "quadratic or huber")->check(CLI::IsMember({"quadratic", "huber"}));
  app->add_option("--huber-c", o.huber_c, "Huber cutoff");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse optimization over the unit simplex with an l0 penalty"};
  app.require_subcommand(1);
  Overrides o;

  auto* solve = app.add_subcommand("solve", "solve one problem file, or a column batch");
  common_options(solve, o);
  solver_options(solve, o);
  solve->add_option("-p,--problem", o.problem_path, "JSON problem or OR-Library portfolio file");
  solve->add_option("--matrix-a", o.matrix_a_path, "batch mode: matrix A (CSV or binary)");
  solve->add_option("--matrix-b", o.matrix_b_path, "batch mode: right-hand sides B, one per column");
  solve->add_option("--eta", o.eta, "portfolio risk weight in [0, 1]");

  auto* synth = app.add_subcommand("synth", "seeded synthetic recovery experiments");
  common_options(synth, o);
  solver_options(synth, o);
  synth->add_option("--seeds", o.seeds, "runs per grid cell");
  synth->add_option("--lambda-mode", o.lambda_mode, "fixed or match_cardinality")
      ->check(CLI::IsMember({"fixed", "match_cardinality"}));

  auto* frontier = app.add_subcommand("frontier", "standard and cardinality-limited efficient frontiers");
  common_options(frontier, o);
  frontier->add_option("--port", o.port_path, "OR-Library portfolio file");
  frontier->add_option("-K", o.K, "cardinality limit");
  frontier->add_option("--sef-points", o.sef_points);
  frontier->add_option("--gef-points", o.gef_points);
  frontier->add_option("--sef-eps1", o.sef_eps1);

  auto* oracle = app.add_subcommand("oracle-check", "compare the subproblem solver with brute force");
  common_options(oracle, o);
  oracle->add_option("--instances", o.instances);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return l0bpg::cli::kInputError;
  }

  if (solve->parsed()) return l0bpg::cli::cmd_solve(o, std::cout, std::cerr);
  if (synth->parsed()) return l0bpg::cli::cmd_synth(o, std::cout, std::cerr);
  if (frontier->parsed()) return l0bpg::cli::cmd_frontier(o, std::cout, std::cerr);
  return l0bpg::cli::cmd_oracle_check(o, std::cout, std::cerr);
}
