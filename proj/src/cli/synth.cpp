#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "l0bpg/harness/io.hpp"
#include "l0bpg/harness/metrics.hpp"
#include "l0bpg/harness/parallel.hpp"
#include "l0bpg/harness/rng.hpp"
#include "l0bpg/harness/synthetic.hpp"
#include "run_config.hpp"

namespace l0bpg::cli {

using nlohmann::json;

namespace {

struct Cell {
  Index m, n;
  double snr_db;
  double impulse_density;
  std::string loss;
};

struct RunRow {
  std::uint64_t seed = 0;
  double lambda = 0;
  Index card_true = 0, card_hat = 0;
  double rsnr = 0;
  harness::ConfusionMetrics conf;
  double residual = 0;
  double F = 0;
  int iterations = 0, init_iterations = 0;
  bool converged = false;
};

// Columns averaged into the summary rows.
constexpr const char* kStatColumns[] = {"lambda", "card_hat", "rsnr", "accuracy", "precision",
                                        "recall", "f1", "residual", "iterations"};

std::vector<double> stat_values(const RunRow& r) {
  return {r.lambda,       static_cast<double>(r.card_hat), r.rsnr, r.conf.accuracy, r.conf.precision,
          r.conf.recall,  r.conf.f1,                       r.residual, static_cast<double>(r.iterations)};
}

RunRow run_one(const Cell& cell, const RunConfig& rc, std::uint64_t seed) {
  harness::SyntheticSpec spec;
  spec.m = cell.m;
  spec.n = cell.n;
  spec.density = rc.density;
  spec.snr_db = cell.snr_db;
  spec.impulse_density = cell.impulse_density;
  spec.noise = cell.impulse_density > 0 ? harness::NoiseKind::gaussian_plus_impulse : harness::NoiseKind::gaussian;
  spec.impulse_amplitude_factor = rc.impulse_amplitude_factor;
  spec.seed = seed;
  const auto inst = harness::generate_synthetic(spec);

  Objective<double> obj = cell.loss == "huber"
                              ? Objective<double>::huber(inst.data, HuberParams<double>{rc.huber_c})
                              : Objective<double>::quadratic(inst.data);
  if (rc.smoothness) obj = obj.with_smoothness(*rc.smoothness);
  SolverConfig<double> cfg = rc.solver_config();

  RunRow row;
  row.seed = seed;
  row.card_true = inst.x_true.support_size();
  std::optional<SolveResult<double>> res;
  if (rc.lambda_mode == "match_cardinality") {
    auto tuned = tune_lambda_for_cardinality(obj, row.card_true, cfg);
    row.lambda = tuned.lambda;
    res.emplace(std::move(tuned.result));
  } else {
    row.lambda = cfg.lambda;
    res.emplace(solve(obj, cfg));
  }
  const Vector<double>& xhat = res->x_star.values();
  row.card_hat = static_cast<Index>(res->support.size());
  row.rsnr = harness::rsnr(inst.x_true.values(), xhat);
  row.conf = harness::confusion_metrics(inst.x_true.values(), xhat);
  row.residual = 0.5 * (inst.data.A * xhat - inst.data.b).squaredNorm();
  row.F = res->objective_F;
  row.iterations = res->iterations;
  row.init_iterations = res->initializer_iterations;
  row.converged = res->converged;
  return row;
}

void cell_fields(harness::CsvWriter& w, const Cell& c) {
  w.field(c.m).field(c.n).field(c.snr_db).field(c.impulse_density).field(std::string_view(c.loss));
}

}  // namespace

int cmd_synth(const Overrides& o, std::ostream& log, std::ostream& err) {
  return guarded(err, "synth", [&]() -> int {
    const RunConfig rc = resolve_config(o);
    std::vector<Cell> cells;
    for (const auto& [m, n] : rc.sizes) {
      harness::SyntheticSpec probe;
      probe.m = m;
      probe.n = n;
      probe.density = rc.density;
      probe.validate();
      for (double snr : rc.snr_db)
        for (double imp : rc.impulse_density)
          for (const auto& loss : rc.losses) cells.push_back({m, n, snr, imp, loss});
    }

    // One data seed per seed index, shared by every cell so losses and
    // noise levels are compared on the same draws.
    std::vector<std::uint64_t> run_seeds(static_cast<std::size_t>(rc.seeds));
    for (std::size_t s = 0; s < run_seeds.size(); ++s) run_seeds[s] = harness::derive_seed(rc.seed, s);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<RunRow>> results(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      results[c].resize(run_seeds.size());
      harness::parallel_for(run_seeds.size(), rc.jobs,
                            [&](std::size_t s) { results[c][s] = run_one(cells[c], rc, run_seeds[s]); });
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream runs_csv, summary_csv;
    harness::CsvWriter runs(runs_csv), summary(summary_csv);
    runs.header({"m", "n", "snr_db", "impulse_density", "loss", "seed_index", "seed", "lambda", "card_true",
                 "card_hat", "rsnr", "tp", "fp", "fn", "tn", "accuracy", "precision", "recall", "f1",
                 "metrics_undefined", "residual", "F", "iterations", "init_iterations", "converged"});
    std::vector<std::string> summary_header{"m", "n", "snr_db", "impulse_density", "loss", "stat", "runs"};
    for (const char* c : kStatColumns) summary_header.emplace_back(c);
    summary.header(summary_header);

    json aggregates = json::array();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const Cell& cell = cells[c];
      for (std::size_t s = 0; s < results[c].size(); ++s) {
        const RunRow& r = results[c][s];
        cell_fields(runs, cell);
        runs.field(s).field(std::string_view(std::to_string(r.seed))).field(r.lambda).field(r.card_true)
            .field(r.card_hat).field(r.rsnr).field(r.conf.counts.tp).field(r.conf.counts.fp)
            .field(r.conf.counts.fn).field(r.conf.counts.tn).field(r.conf.accuracy).field(r.conf.precision)
            .field(r.conf.recall).field(r.conf.f1).field(r.conf.undefined ? 1 : 0).field(r.residual).field(r.F)
            .field(r.iterations).field(r.init_iterations).field(r.converged ? 1 : 0);
        runs.end_row();
      }

      const std::size_t k = std::size(kStatColumns);
      std::vector<double> mean(k, 0.0), var(k, 0.0);
      const double count = static_cast<double>(results[c].size());
      for (const RunRow& r : results[c]) {
        const auto v = stat_values(r);
        for (std::size_t j = 0; j < k; ++j) mean[j] += v[j] / count;
      }
      for (const RunRow& r : results[c]) {
        const auto v = stat_values(r);
        for (std::size_t j = 0; j < k; ++j) var[j] += (v[j] - mean[j]) * (v[j] - mean[j]);
      }
      std::vector<double> sd(k);
      for (std::size_t j = 0; j < k; ++j) sd[j] = count > 1 ? std::sqrt(var[j] / (count - 1)) : 0.0;

      json agg = {{"m", cell.m},
                  {"n", cell.n},
                  {"snr_db", number(cell.snr_db)},
                  {"impulse_density", cell.impulse_density},
                  {"loss", cell.loss},
                  {"runs", results[c].size()}};
      for (const auto& [label, values] : {std::pair{"mean", &mean}, std::pair{"std", &sd}}) {
        cell_fields(summary, cell);
        summary.field(std::string_view(label)).field(results[c].size());
        json stats;
        for (std::size_t j = 0; j < k; ++j) {
          summary.field((*values)[j]);
          stats[kStatColumns[j]] = number((*values)[j]);
        }
        summary.end_row();
        agg[label] = stats;
      }
      aggregates.push_back(agg);
    }

    const json doc = {{"command", "synth"},
                      {"config", rc.to_json()},
                      {"seed_derivation", "run seed s = derive_seed(seed, s) for seed index s"},
                      {"aggregates", aggregates},
                      {"wall_time_s", seconds}};
    const std::string dir = prepare_out_dir(rc);
    harness::write_file(join_path(dir, "synth_runs.csv"), runs_csv.str());
    harness::write_file(join_path(dir, "synth_summary.csv"), summary_csv.str());
    harness::write_file(join_path(dir, "synth.json"), dump(doc));
    log << cells.size() << " grid cells x " << rc.seeds << " seeds in " << seconds << " s; wrote "
        << join_path(dir, "synth_summary.csv") << '\n';
    return kOk;
  });
}

}  // namespace l0bpg::cli
