#include <chrono>
#include <ostream>
#include <sstream>

#include "l0bpg/harness/batch.hpp"
#include "l0bpg/harness/io.hpp"
#include "l0bpg/harness/orlib.hpp"
#include "run_config.hpp"

namespace l0bpg::cli {

using nlohmann::json;

namespace {

Vector<double> vector_from(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) throw ParseError(std::string("problem: '") + what + "' must be a nonempty list");
  Vector<double> out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ParseError(std::string("problem: '") + what + "' must hold numbers");
    out(static_cast<Index>(i)) = v[i].get<double>();
  }
  return out;
}

Matrix<double> matrix_from(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) throw ParseError(std::string("problem: '") + what + "' must be a list of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw ParseError(std::string("problem: '") + what + "' rows must be nonempty lists");
  Matrix<double> M(static_cast<Index>(v.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      throw ParseError(std::string("problem: '") + what + "' is ragged");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) throw ParseError(std::string("problem: '") + what + "' must hold numbers");
      M(static_cast<Index>(i), static_cast<Index>(j)) = v[i][j].get<double>();
    }
  }
  return M;
}

struct LoadedProblem {
  std::optional<LinearModelData<double>> linear;
  std::optional<PortfolioData<double>> portfolio;
  std::string format;
};

/// JSON ({"A","b"} or {"mu","Sigma","eta"?}) when the file starts with '{',
/// OR-Library portfolio text otherwise.
LoadedProblem load_problem(const std::string& path) {
  const std::string text = harness::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  LoadedProblem p;
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError("problem " + path + ": " + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      if (key != "A" && key != "b" && key != "mu" && key != "Sigma" && key != "eta")
        throw ParseError("problem: unknown key '" + key + "'");
    }
    if (doc.contains("A") || doc.contains("b")) {
      if (!doc.contains("A") || !doc.contains("b")) throw ParseError("problem: need both 'A' and 'b'");
      if (doc.contains("mu") || doc.contains("Sigma") || doc.contains("eta"))
        throw ParseError("problem: mixes linear-model and portfolio keys");
      p.linear = LinearModelData<double>{matrix_from(doc["A"], "A"), vector_from(doc["b"], "b")};
    } else if (doc.contains("mu") && doc.contains("Sigma")) {
      double eta = 0.5;
      if (doc.contains("eta")) {
        if (!doc["eta"].is_number()) throw ParseError("problem: 'eta' must be a number");
        eta = doc["eta"].get<double>();
      }
      p.portfolio = PortfolioData<double>{vector_from(doc["mu"], "mu"), matrix_from(doc["Sigma"], "Sigma"), eta};
    } else {
      throw ParseError("problem: expected {\"A\", \"b\"} or {\"mu\", \"Sigma\"}");
    }
    p.format = "json";
  } else {
    p.portfolio = harness::parse_or_library(text);
    p.format = "or-library";
  }
  return p;
}

json support_json(const std::vector<Index>& s) {
  json out = json::array();
  for (Index i : s) out.push_back(i);
  return out;
}

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

std::string trace_csv(const SolveTrace<double>& trace) {
  std::ostringstream out;
  harness::CsvWriter w(out);
  w.header({"k", "F", "f", "support_size", "step_divergence"});
  for (std::size_t k = 0; k < trace.entries.size(); ++k) {
    const auto& e = trace.entries[k];
    w.field(k).field(e.F).field(e.f).field(e.support_size).field(e.step_divergence);
    w.end_row();
  }
  return out.str();
}

int solve_batch(const RunConfig& rc, const Overrides& o, std::ostream& log) {
  if (!o.matrix_a_path || !o.matrix_b_path) throw InputError("solve: batch mode needs both --matrix-a and --matrix-b");
  if (rc.loss != "quadratic") throw InputError("solve: batch mode supports the quadratic loss only");
  const Matrix<double> A = harness::load_matrix(*o.matrix_a_path);
  const Matrix<double> B = harness::load_matrix(*o.matrix_b_path);
  const SolverConfig<double> cfg = rc.solver_config();

  const auto t0 = std::chrono::steady_clock::now();
  const auto batch = harness::batch_columns_solve(A, B, cfg, rc.jobs);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json columns = json::array();
  for (std::size_t j = 0; j < batch.columns.size(); ++j) {
    const auto& r = batch.columns[j];
    columns.push_back({{"column", j},
                       {"F", number(r.objective_F)},
                       {"f", number(r.objective_f)},
                       {"support", support_json(r.support)},
                       {"iterations", r.iterations},
                       {"converged", r.converged}});
  }
  const json doc = {{"command", "solve"},
                    {"mode", "batch"},
                    {"config", rc.to_json()},
                    {"inputs", {{"matrix_a", *o.matrix_a_path}, {"matrix_b", *o.matrix_b_path}}},
                    {"rows", A.rows()},
                    {"n", A.cols()},
                    {"columns", columns},
                    {"wall_time_s", seconds}};

  const std::string dir = prepare_out_dir(rc);
  harness::write_file(join_path(dir, "X.csv"), harness::format_matrix_csv(batch.X));
  harness::write_file(join_path(dir, "batch.json"), dump(doc));
  log << "solved " << B.cols() << " columns in " << seconds << " s; wrote " << join_path(dir, "X.csv") << '\n';
  return kOk;
}

}  // namespace

int cmd_solve(const Overrides& o, std::ostream& log, std::ostream& err) {
  return guarded(err, "solve", [&]() -> int {
    const RunConfig rc = resolve_config(o);
    if (o.matrix_a_path || o.matrix_b_path) {
      if (o.problem_path) throw InputError("solve: give either --problem or --matrix-a/--matrix-b");
      return solve_batch(rc, o, log);
    }
    if (!o.problem_path) throw InputError("solve: --problem is required");

    LoadedProblem p = load_problem(*o.problem_path);
    std::optional<Objective<double>> obj;
    std::string loss;
    if (p.portfolio) {
      if (rc.eta) p.portfolio->eta = *rc.eta;
      obj = Objective<double>::portfolio(std::move(*p.portfolio));
      loss = "portfolio";
    } else if (rc.loss == "huber") {
      obj = Objective<double>::huber(std::move(*p.linear), HuberParams<double>{rc.huber_c});
      loss = "huber";
    } else {
      obj = Objective<double>::quadratic(std::move(*p.linear));
      loss = "quadratic";
    }
    if (rc.smoothness) obj = obj->with_smoothness(*rc.smoothness);

    const auto t0 = std::chrono::steady_clock::now();
    const auto res = solve(*obj, rc.solver_config());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json problem = {{"path", *o.problem_path},
                    {"format", p.format},
                    {"loss", loss},
                    {"n", obj->dimension()},
                    {"smoothness", number(obj->smoothness())},
                    {"smoothness_bound", number(obj->smoothness_bound())}};
    if (loss == "portfolio") problem["eta"] = obj->portfolio_data().eta;
    else problem["m"] = obj->linear_data().A.rows();
    if (loss == "huber") problem["huber_c"] = rc.huber_c;

    const auto& tr = res.trace;
    const json doc = {
        {"command", "solve"},
        {"config", rc.to_json()},
        {"problem", problem},
        {"result",
         {{"x", vector_json(res.x_star.values())},
          {"support", support_json(res.support)},
          {"F", number(res.objective_F)},
          {"f", number(res.objective_f)},
          {"alpha", number(res.alpha)},
          {"lambda", number(res.lambda)},
          {"iterations", res.iterations},
          {"initializer_iterations", res.initializer_iterations},
          {"converged", res.converged}}},
        {"trace",
         {{"entries", tr.entries.size()},
          {"F_initial", number(tr.entries.front().F)},
          {"F_final", number(tr.entries.back().F)},
          {"support_size_initial", tr.entries.front().support_size},
          {"support_size_final", tr.entries.back().support_size},
          {"freeze_iteration", tr.freeze_iteration}}},
        {"wall_time_s", seconds},
    };

    const std::string dir = prepare_out_dir(rc);
    harness::write_file(join_path(dir, "result.json"), dump(doc));
    harness::write_file(join_path(dir, "trace.csv"), trace_csv(tr));
    log << "F = " << harness::format_double(res.objective_F) << ", support size " << res.support.size()
        << ", " << res.iterations << " outer iterations; wrote " << join_path(dir, "result.json") << '\n';
    if (!res.converged) err << "solve: warning: outer loop hit the iteration cap\n";
    return kOk;
  });
}

}  // namespace l0bpg::cli
