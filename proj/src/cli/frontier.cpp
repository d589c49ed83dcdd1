#include <chrono>
#include <ostream>
#include <sstream>

#include "l0bpg/harness/frontier.hpp"
#include "l0bpg/harness/io.hpp"
#include "l0bpg/harness/orlib.hpp"
#include "run_config.hpp"

namespace l0bpg::cli {

using nlohmann::json;

namespace {

std::string frontier_csv(const std::vector<harness::FrontierPoint>& points) {
  std::ostringstream out;
  harness::CsvWriter w(out);
  w.header({"eta", "risk", "return", "cardinality", "lambda", "error"});
  for (const auto& p : points) {
    w.field(p.eta).field(p.risk).field(p.ret).field(p.cardinality).field(p.lambda);
    // Messages never contain commas or newlines we would need to quote; strip them anyway.
    std::string msg = p.error;
    for (char& c : msg)
      if (c == ',' || c == '\n' || c == '\r') c = ' ';
    w.field(std::string_view(msg));
    w.end_row();
  }
  return out.str();
}

std::size_t failed(const std::vector<harness::FrontierPoint>& points) {
  std::size_t k = 0;
  for (const auto& p : points) k += !p.error.empty();
  return k;
}

}  // namespace

int cmd_frontier(const Overrides& o, std::ostream& log, std::ostream& err) {
  return guarded(err, "frontier", [&]() -> int {
    const RunConfig rc = resolve_config(o);
    if (!rc.port_path) throw InputError("frontier: --port (or frontier.port) is required");
    const PortfolioData<double> base = harness::load_or_library(*rc.port_path);

    AbpgConfig<double> sef_cfg = rc.solver_config().abpg;
    sef_cfg.eps1 = rc.sef_eps1;
    SolverConfig<double> gef_cfg = rc.solver_config();
    gef_cfg.eps2 = rc.gef_eps;
    gef_cfg.abpg.eps1 = rc.gef_eps;

    const auto t0 = std::chrono::steady_clock::now();
    const auto sef = harness::standard_frontier(base, harness::eta_grid(rc.sef_points), sef_cfg, rc.jobs);
    const auto t1 = std::chrono::steady_clock::now();
    const auto gef = harness::general_frontier(base, harness::eta_grid(rc.gef_points), rc.K, gef_cfg);
    const auto t2 = std::chrono::steady_clock::now();
    const auto cmp = harness::frontier_comparison(sef, gef);
    const auto t3 = std::chrono::steady_clock::now();

    Index max_card = 0;
    for (const auto& p : gef)
      if (p.error.empty()) max_card = std::max(max_card, p.cardinality);
    auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };

    const json doc = {
        {"command", "frontier"},
        {"config", rc.to_json()},
        {"assets", base.mu.size()},
        {"sef_points", sef.size()},
        {"gef_points", gef.size()},
        {"sef_failures", failed(sef)},
        {"gef_failures", failed(gef)},
        {"gef_max_cardinality", max_card},
        {"metrics",
         {{"mean_distance", number(cmp.mean_distance)},
          {"variance_err_pct", number(cmp.variance_err_pct)},
          {"mean_err_pct", number(cmp.mean_err_pct)},
          {"compared", cmp.compared}}},
        {"matching",
         {{"mean_distance", "nearest SEF point in (risk, return)"},
          {"variance_err_pct", "SEF point with nearest return"},
          {"mean_err_pct", "SEF point with nearest risk"}}},
        {"wall_time_s",
         {{"sef", secs(t0, t1)}, {"gef", secs(t1, t2)}, {"comparison", secs(t2, t3)}, {"total", secs(t0, t3)}}},
    };

    const std::string dir = prepare_out_dir(rc);
    harness::write_file(join_path(dir, "sef.csv"), frontier_csv(sef));
    harness::write_file(join_path(dir, "gef.csv"), frontier_csv(gef));
    harness::write_file(join_path(dir, "comparison.json"), dump(doc));
    log << "distance " << harness::format_double(cmp.mean_distance) << ", variance error "
        << cmp.variance_err_pct << "%, mean error " << cmp.mean_err_pct << "%, max GEF cardinality "
        << max_card << "; wrote " << join_path(dir, "comparison.json") << '\n';
    if (failed(sef) + failed(gef) > 0)
      err << "frontier: warning: " << failed(sef) + failed(gef) << " points failed; see the error column\n";
    return kOk;
  });
}

}  // namespace l0bpg::cli
