// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "l0bpg/bpg.hpp"
#include "l0bpg/cli/commands.hpp"
#include "l0bpg/harness/io.hpp"
#include "l0bpg/harness/oracle.hpp"
#include "l0bpg/harness/orlib.hpp"
#include "l0bpg/harness/rng.hpp"
#include "l0bpg/harness/synthetic.hpp"
#include "l0bpg/solver.hpp"

namespace fs = std::filesystem;
using namespace l0bpg;
using nlohmann::json;

namespace {

// Pinned thresholds.
constexpr double kOracleTol = 1e-10;
constexpr double kOracleSeconds = 10;
constexpr double kInvariantSeconds = 120;
constexpr double kCase1Seconds = 60, kCase2Seconds = 300, kHuberSeconds = 300, kFrontierSeconds = 120;
constexpr double kRateSlope = -1.8;
constexpr double kFdTol = 1e-5;

const std::string kSource = L0BPG_SOURCE_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double as_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  return std::stod(v.get<std::string>());   // "inf", "nan"
}

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "l0bpg_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

/// Runs `l0bpg synth` in-process with a repo config; returns synth.json.
json run_synth(const std::string& config, const std::string& tag, cli::Overrides o = {}) {
  o.config_path = kSource + "/configs/" + config;
  o.out_dir = (work_dir() / tag).string();
  std::ostringstream log, err;
  if (cli::cmd_synth(o, log, err) != cli::kOk) throw std::runtime_error("synth failed: " + err.str());
  return json::parse(harness::read_file((work_dir() / tag / "synth.json").string()));
}

Outcome oracle() {
  const auto t0 = Clock::now();
  const auto r = harness::run_subproblem_oracle_check(500, 20240601, kOracleTol);
  const double s = since(t0);
  return {r.instances == 500 && r.mismatches == 0 && s < kOracleSeconds,
          std::to_string(r.instances) + " instances, " + std::to_string(r.mismatches) + " mismatches, max gap " +
              fmt("%.3g", r.max_abs_gap) + ", " + fmt("%.2f", s) + " s"};
}

Outcome invariants() {
  const auto t0 = Clock::now();
  int violations = 0;
  std::string first;
  auto fail = [&](const std::string& what, std::uint64_t s) {
    if (violations++ == 0) first = what + " (seed index " + std::to_string(s) + ")";
  };
  for (std::uint64_t s = 0; s < 100; ++s) {
    harness::SyntheticSpec spec;
    spec.m = 200;
    spec.n = 400;
    spec.density = 0.02;
    spec.snr_db = 50;
    spec.seed = harness::derive_seed(99, s);
    const auto inst = harness::generate_synthetic(spec);
    SolverConfig<double> cfg;
    cfg.lambda = 2;
    const auto r = solve(Objective<double>::quadratic(inst.data), cfg);
    const auto& e = r.trace.entries;
    for (std::size_t k = 1; k < e.size(); ++k) {
      if (e[k].F > e[k - 1].F + 1e-10) fail("F increased", s);
      if (e[k].support_size > e[k - 1].support_size) fail("d increased", s);
      if (!std::includes(e[k - 1].support.begin(), e[k - 1].support.end(), e[k].support.begin(), e[k].support.end()))
        fail("support not nested", s);
    }
    const double floor = 1 - std::exp(-r.alpha * r.lambda) - 1e-12;
    for (Index i : r.support)
      if (r.x_star(i) < floor) fail("nonzero below floor", s);
    const std::size_t M = static_cast<std::size_t>(r.trace.freeze_iteration);
    const double D = kl_divergence(r.x_star, *r.trace.x_at_freeze);
    for (std::size_t K = M + 1; K < e.size(); ++K)
      if (e[K].F - e.back().F > D / (r.alpha * double(K - M)) + 1e-8) fail("rate certificate", s);
  }
  const double secs = since(t0);
  return {violations == 0 && secs < kInvariantSeconds,
          "100 solves, " + std::to_string(violations) + " violations" + (first.empty() ? "" : ", first: " + first) +
              ", " + fmt("%.1f", secs) + " s"};
}

Outcome table2(const std::string& config, bool case_one) {
  const auto t0 = Clock::now();
  const json doc = run_synth(config, case_one ? "case1" : "case2");
  const double secs = since(t0);
  const json& mean = doc["aggregates"][0]["mean"];
  const double acc = as_number(mean["accuracy"]), prec = as_number(mean["precision"]),
               rec = as_number(mean["recall"]), f1 = as_number(mean["f1"]), res = as_number(mean["residual"]);
  std::string d = "accuracy " + fmt("%.4f", acc) + ", precision " + fmt("%.4f", prec) + ", recall " +
                  fmt("%.4f", rec) + ", F1 " + fmt("%.4f", f1) + ", residual " + fmt("%.3g", res) + ", " +
                  fmt("%.1f", secs) + " s";
  if (case_one)
    return {acc >= 0.98 && prec >= 0.90 && rec >= 0.88 && f1 >= 0.89 && res <= 1e-2 && secs < kCase1Seconds, d};
  return {acc >= 0.99 && f1 >= 0.93 && secs < kCase2Seconds, d};
}

Outcome huber_robustness() {
  const auto t0 = Clock::now();
  const json doc = run_synth("exp4_impulse.json", "exp4");
  const double secs = since(t0);
  std::map<double, std::map<std::string, double>> by_density;
  for (const auto& a : doc["aggregates"])
    by_density[a["impulse_density"].get<double>()][a["loss"].get<std::string>()] = as_number(a["mean"]["rsnr"]);
  bool ok = by_density.size() == 5;
  std::string d;
  for (const auto& [dens, m] : by_density) {
    const double h = m.at("huber"), q = m.at("quadratic");
    ok = ok && h > q;
    d += fmt("%.3f: ", dens) + fmt("%.2f", h) + " vs " + fmt("%.2f", q) + " dB; ";
  }
  return {ok && secs < kHuberSeconds, d + fmt("%.1f", secs) + " s"};
}

Outcome frontier() {
  const fs::path real = fs::path(kSource) / "data/port1.txt";
  const bool have_real = fs::exists(real);
  cli::Overrides o;
  o.config_path = kSource + "/configs/frontier_port1.json";
  o.port_path = have_real ? real.string() : kSource + "/data/port1_surrogate.txt";
  o.out_dir = (work_dir() / "frontier").string();
  const auto t0 = Clock::now();
  std::ostringstream log, err;
  if (cli::cmd_frontier(o, log, err) != cli::kOk) return {false, "frontier failed: " + err.str()};
  const double secs = since(t0);
  const json doc = json::parse(harness::read_file((work_dir() / "frontier" / "comparison.json").string()));
  const double dist = as_number(doc["metrics"]["mean_distance"]), var = as_number(doc["metrics"]["variance_err_pct"]),
               mean = as_number(doc["metrics"]["mean_err_pct"]);
  const int card = doc["gef_max_cardinality"].get<int>();
  const int failures = doc["sef_failures"].get<int>() + doc["gef_failures"].get<int>();
  const bool ok = doc["sef_points"] == 2000 && doc["gef_points"] == 50 && failures == 0 && dist <= 1e-4 &&
                  var <= 1.0 && mean <= 0.5 && card <= 10 && secs < kFrontierSeconds;
  return {ok, std::string(have_real ? "port1" : "port1 surrogate (data/port1.txt absent)") + ": distance " +
                  fmt("%.3g", dist) + ", variance error " + fmt("%.4f", var) + "%, mean error " +
                  fmt("%.4f", mean) + "%, max cardinality " + std::to_string(card) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome abpg_rate() {
  // f(x) = 1/2 ||A x - b||^2 on the 50-simplex, A with singular values 1 .. 1e-2
  // and b = A x_opt for an interior x_opt, so f* = 0 exactly.
  const Index n = 50;
  harness::Rng rng(1);
  Matrix<double> G1(n, n), G2(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) G1(i, j) = rng.normal();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) G2(i, j) = rng.normal();
  const Matrix<double> Q1 = Eigen::HouseholderQR<Matrix<double>>(G1).householderQ();
  const Matrix<double> Q2 = Eigen::HouseholderQR<Matrix<double>>(G2).householderQ();
  Vector<double> s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::pow(1e-2, double(i) / double(n - 1));
  const Matrix<double> A = Q1 * s.asDiagonal() * Q2.transpose();
  Vector<double> x_opt(n);
  for (Index i = 0; i < n; ++i) x_opt(i) = 0.5 + rng.uniform();
  x_opt /= x_opt.sum();
  const auto obj = Objective<double>::quadratic({A, A * x_opt});

  AbpgConfig<double> cfg;
  cfg.eps1 = 1e-300;
  cfg.max_iters = 200;
  const auto r = abpg_g(obj, cfg, SimplexVector<double>::uniform(n));
  if (r.trace.size() < 200) return {false, "stopped after " + std::to_string(r.trace.size()) + " iterations"};
  double sx = 0, sy = 0, sxx = 0, sxy = 0, fmin = INFINITY;
  int N = 0;
  for (int k = 10; k <= 200; ++k) {
    const double f = r.trace[static_cast<std::size_t>(k - 1)].f_next;   // f(x^k)
    fmin = std::min(fmin, f);
    const double X = std::log(double(k)), Y = std::log(f);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++N;
  }
  const double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
  return {slope <= kRateSlope && fmin > 1e-20,
          "slope " + fmt("%.3f", slope) + " over k = 10..200, min f - f* " + fmt("%.3g", fmin)};
}

/// Central differences along e_i - e_0, compared with g_i - g_0.
double fd_error(const Objective<double>& obj, const SimplexVector<double>& x) {
  const double h = 1e-6;
  const Index n = x.size();
  const Vector<double> g = obj.gradient(x);
  Vector<double> fd(n - 1), an(n - 1);
  for (Index i = 1; i < n; ++i) {
    Vector<double> p = x.values(), m = x.values();
    p(i) += h;
    p(0) -= h;
    m(i) -= h;
    m(0) += h;
    fd(i - 1) = (obj.value(SimplexVector<double>(p / p.sum())) - obj.value(SimplexVector<double>(m / m.sum()))) / (2 * h);
    an(i - 1) = g(i) - g(0);
  }
  return (fd - an).norm() / std::max(an.norm(), 1e-300);
}

Outcome gradients() {
  harness::Rng rng(8);
  auto interior = [&](Index n) {
    Vector<double> w(n);
    for (Index i = 0; i < n; ++i) w(i) = -std::log(1.0 - rng.uniform()) + 1e-3;
    return SimplexVector<double>::normalized(w);
  };
  auto gaussian = [&](Index r, Index c) {
    Matrix<double> M(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
    return M;
  };
  const LinearModelData<double> lin{gaussian(30, 20), gaussian(30, 1).col(0)};
  auto port = harness::load_or_library(kSource + "/data/port1_surrogate.txt");
  port.eta = 0.5;
  const std::vector<std::pair<std::string, Objective<double>>> objs{
      {"quadratic", Objective<double>::quadratic(lin)},
      {"huber", Objective<double>::huber(lin, {1.0})},
      {"portfolio", Objective<double>::portfolio(port)}};
  bool ok = true;
  std::string d;
  for (const auto& [name, obj] : objs) {
    double worst = 0;
    for (int t = 0; t < 100; ++t) worst = std::max(worst, fd_error(obj, interior(obj.dimension())));
    ok = ok && worst <= kFdTol;
    d += name + " " + fmt("%.2g", worst) + "; ";
  }
  return {ok, "worst relative error over 100 points: " + d};
}

Outcome determinism() {
  cli::Overrides o;
  o.seeds = 10;
  run_synth("exp1_snr_sweep.json", "det_a", o);
  o.jobs = 2;
  run_synth("exp1_snr_sweep.json", "det_b", o);
  bool ok = true;
  for (const char* f : {"synth_runs.csv", "synth_summary.csv"}) {
    const auto a = harness::read_file((work_dir() / "det_a" / f).string());
    const auto b = harness::read_file((work_dir() / "det_b" / f).string());
    ok = ok && !a.empty() && a == b;
  }
  return {ok, "two runs of the SNR sweep (10 seeds, 1 and 2 jobs): CSVs " + std::string(ok ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"subproblem oracle", oracle},
      {"solver invariants", invariants},
      {"recovery case I", [] { return table2("table2_case1.json", true); }},
      {"recovery case II", [] { return table2("table2_case2.json", false); }},
      {"huber robustness", huber_robustness},
      {"portfolio frontier", frontier},
      {"abpg rate", abpg_rate},
      {"gradient check", gradients},
      {"synth determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first,
                out.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work_dir());
  return failed == 0 ? 0 : 1;
}
