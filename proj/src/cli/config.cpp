#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <set>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/io.hpp"
#include "run_config.hpp"

namespace l0bpg::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InputError("config: '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key))
      throw InputError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

std::string path_of(const std::string& section, const char* key) {
  return section.empty() ? key : section + "." + key;
}

double get_number(const json& v, const std::string& where) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) throw InputError("config: '" + where + "' must be a number");
  return v.get<double>();
}

long long get_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InputError("config: '" + where + "' must be an integer");
  return v.get<long long>();
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw InputError("config: '" + where + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_list(const json& v, const std::string& where) {
  if (!v.is_array()) return {get_number(v, where)};
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_number(e, where));
  if (out.empty()) throw InputError("config: '" + where + "' must not be empty");
  return out;
}

int to_int(long long v, const std::string& where) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw InputError("config: '" + where + "' out of range");
  return static_cast<int>(v);
}

/// Copies obj[key] into `out` when present.
template <typename T, typename Get>
void read(const json& obj, const std::string& section, const char* key, T& out, Get get) {
  if (obj.contains(key)) out = get(obj.at(key), path_of(section, key));
}

void apply_file(const json& doc, RunConfig& rc, std::optional<std::size_t>& single_m,
                std::optional<std::size_t>& single_n) {
  auto as_int = [](const json& v, const std::string& w) { return to_int(get_integer(v, w), w); };
  auto as_opt = [](const json& v, const std::string& w) { return std::optional<double>(get_number(v, w)); };

  if (doc.contains("seed")) {
    const auto s = get_integer(doc.at("seed"), "seed");
    if (s < 0) throw InputError("config: 'seed' must be nonnegative");
    rc.seed = static_cast<std::uint64_t>(s);
  }
  read(doc, "", "jobs", rc.jobs, as_int);

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    read(s, "solver", "alpha", rc.alpha, as_opt);
    read(s, "solver", "lambda", rc.lambda, get_number);
    read(s, "solver", "eps1", rc.eps1, get_number);
    read(s, "solver", "eps2", rc.eps2, get_number);
    read(s, "solver", "max_outer_iters", rc.max_outer_iters, as_int);
    read(s, "solver", "max_init_iters", rc.max_init_iters, as_int);
    read(s, "solver", "gamma", rc.gamma, get_number);
    read(s, "solver", "rho", rc.rho, get_number);
    read(s, "solver", "g_min", rc.g_min, get_number);
    read(s, "solver", "smoothness", rc.smoothness, as_opt);
  }
  if (doc.contains("problem")) {
    const json& p = doc.at("problem");
    read(p, "problem", "loss", rc.loss, get_string);
    read(p, "problem", "huber_c", rc.huber_c, get_number);
    read(p, "problem", "eta", rc.eta, as_opt);
  }
  if (doc.contains("synthetic")) {
    const json& s = doc.at("synthetic");
    if (s.contains("m")) single_m = static_cast<std::size_t>(as_int(s.at("m"), "synthetic.m"));
    if (s.contains("n")) single_n = static_cast<std::size_t>(as_int(s.at("n"), "synthetic.n"));
    if (s.contains("sizes")) {
      const json& v = s.at("sizes");
      if (!v.is_array() || v.empty()) throw InputError("config: 'synthetic.sizes' must be a nonempty list");
      rc.sizes.clear();
      for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2)
          throw InputError("config: 'synthetic.sizes' entries must be [m, n]");
        rc.sizes.emplace_back(as_int(e[0], "synthetic.sizes"), as_int(e[1], "synthetic.sizes"));
      }
    }
    read(s, "synthetic", "density", rc.density, get_number);
    read(s, "synthetic", "snr_db", rc.snr_db, get_number_list);
    read(s, "synthetic", "impulse_density", rc.impulse_density, get_number_list);
    read(s, "synthetic", "impulse_amplitude_factor", rc.impulse_amplitude_factor, get_number);
    if (s.contains("losses")) {
      const json& v = s.at("losses");
      if (!v.is_array() || v.empty()) throw InputError("config: 'synthetic.losses' must be a nonempty list");
      rc.losses.clear();
      for (const auto& e : v) rc.losses.push_back(get_string(e, "synthetic.losses"));
    }
    read(s, "synthetic", "seeds", rc.seeds, as_int);
    read(s, "synthetic", "lambda_mode", rc.lambda_mode, get_string);
  }
  if (doc.contains("frontier")) {
    const json& f = doc.at("frontier");
    if (f.contains("port")) rc.port_path = get_string(f.at("port"), "frontier.port");
    read(f, "frontier", "K", rc.K, as_int);
    read(f, "frontier", "sef_points", rc.sef_points, as_int);
    read(f, "frontier", "gef_points", rc.gef_points, as_int);
    read(f, "frontier", "sef_eps1", rc.sef_eps1, get_number);
    read(f, "frontier", "gef_eps", rc.gef_eps, get_number);
  }
  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    read(o, "oracle", "instances", rc.instances, as_int);
    read(o, "oracle", "tolerance", rc.oracle_tolerance, get_number);
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    read(o, "output", "dir", rc.out_dir, get_string);
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError("config: " + message);
}

void validate(const RunConfig& rc) {
  require(rc.jobs >= 1, "jobs must be at least 1");
  if (rc.alpha) require(*rc.alpha > 0 && std::isfinite(*rc.alpha), "solver.alpha must be positive");
  require(rc.lambda > 0 && std::isfinite(rc.lambda), "solver.lambda must be positive");
  require(rc.eps1 > 0 && rc.eps2 > 0, "solver tolerances must be positive");
  require(rc.max_outer_iters >= 1 && rc.max_init_iters >= 1, "iteration caps must be positive");
  if (rc.smoothness)
    require(*rc.smoothness > 0 && std::isfinite(*rc.smoothness), "solver.smoothness must be positive");
  require(rc.loss == "quadratic" || rc.loss == "huber", "problem.loss must be 'quadratic' or 'huber'");
  require(rc.huber_c > 0 && std::isfinite(rc.huber_c), "problem.huber_c must be positive");
  if (rc.eta) require(*rc.eta >= 0 && *rc.eta <= 1, "problem.eta must lie in [0, 1]");
  for (const auto& [m, n] : rc.sizes) require(m >= 1 && n >= 1, "synthetic sizes must be positive");
  require(rc.density > 0 && rc.density <= 1, "synthetic.density must lie in (0, 1]");
  for (double s : rc.snr_db) require(!std::isnan(s), "synthetic.snr_db must be a number or \"inf\"");
  for (double d : rc.impulse_density) require(d >= 0 && d <= 1, "synthetic.impulse_density must lie in [0, 1]");
  require(rc.impulse_amplitude_factor >= 0 && std::isfinite(rc.impulse_amplitude_factor),
          "synthetic.impulse_amplitude_factor must be nonnegative");
  for (const auto& l : rc.losses)
    require(l == "quadratic" || l == "huber", "synthetic.losses entries must be 'quadratic' or 'huber'");
  require(rc.seeds >= 1, "synthetic.seeds must be at least 1");
  require(rc.lambda_mode == "fixed" || rc.lambda_mode == "match_cardinality",
          "synthetic.lambda_mode must be 'fixed' or 'match_cardinality'");
  require(rc.K >= 1, "frontier.K must be at least 1");
  require(rc.sef_points >= 1 && rc.gef_points >= 1, "frontier grids need at least one point");
  require(rc.sef_eps1 > 0 && rc.gef_eps > 0, "frontier tolerances must be positive");
  require(rc.instances >= 1, "oracle.instances must be at least 1");
  require(rc.oracle_tolerance > 0, "oracle.tolerance must be positive");
  require(!rc.out_dir.empty(), "output.dir must not be empty");
}

}  // namespace

void validate_run_config(const json& doc) {
  check_keys(doc, "", {"seed", "jobs", "solver", "problem", "synthetic", "frontier", "oracle", "output"});
  if (doc.contains("solver"))
    check_keys(doc.at("solver"), "solver",
               {"alpha", "lambda", "eps1", "eps2", "max_outer_iters", "max_init_iters", "gamma", "rho",
                "g_min", "smoothness"});
  if (doc.contains("problem")) check_keys(doc.at("problem"), "problem", {"loss", "huber_c", "eta"});
  if (doc.contains("synthetic"))
    check_keys(doc.at("synthetic"), "synthetic",
               {"m", "n", "sizes", "density", "snr_db", "impulse_density", "impulse_amplitude_factor",
                "losses", "seeds", "lambda_mode"});
  if (doc.contains("frontier"))
    check_keys(doc.at("frontier"), "frontier", {"port", "K", "sef_points", "gef_points", "sef_eps1", "gef_eps"});
  if (doc.contains("oracle")) check_keys(doc.at("oracle"), "oracle", {"instances", "tolerance"});
  if (doc.contains("output")) check_keys(doc.at("output"), "output", {"dir"});
  // Type and range checks run in resolve_config; a dry run catches them here too.
  RunConfig rc;
  std::optional<std::size_t> m, n;
  apply_file(doc, rc, m, n);
  validate(rc);
}

json load_run_config(const std::string& path) {
  const std::string text = harness::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  validate_run_config(doc);
  return doc;
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig rc;
  std::optional<std::size_t> m, n;
  if (o.config_path) apply_file(load_run_config(*o.config_path), rc, m, n);
  if (m || n) {
    if (rc.sizes.size() != 1) throw InputError("config: give either synthetic.sizes or synthetic.m/n");
    if (m) rc.sizes[0].first = static_cast<Index>(*m);
    if (n) rc.sizes[0].second = static_cast<Index>(*n);
  }
  if (const char* env = std::getenv(kOutDirEnv); env && *env && !o.out_dir) {
    // The environment only replaces the built-in default.
    if (rc.out_dir == ".") rc.out_dir = env;
  }

  if (o.out_dir) rc.out_dir = *o.out_dir;
  if (o.seed) rc.seed = *o.seed;
  if (o.jobs) rc.jobs = *o.jobs;
  if (o.alpha) rc.alpha = *o.alpha;
  if (o.lambda) rc.lambda = *o.lambda;
  if (o.eps1) rc.eps1 = *o.eps1;
  if (o.eps2) rc.eps2 = *o.eps2;
  if (o.smoothness) rc.smoothness = *o.smoothness;
  if (o.max_outer_iters) rc.max_outer_iters = *o.max_outer_iters;
  if (o.max_init_iters) rc.max_init_iters = *o.max_init_iters;
  if (o.loss) rc.loss = *o.loss;
  if (o.huber_c) rc.huber_c = *o.huber_c;
  if (o.eta) rc.eta = *o.eta;
  if (o.seeds) rc.seeds = *o.seeds;
  if (o.lambda_mode) rc.lambda_mode = *o.lambda_mode;
  if (o.port_path) rc.port_path = *o.port_path;
  if (o.K) rc.K = *o.K;
  if (o.sef_points) rc.sef_points = *o.sef_points;
  if (o.gef_points) rc.gef_points = *o.gef_points;
  if (o.sef_eps1) rc.sef_eps1 = *o.sef_eps1;
  if (o.instances) rc.instances = *o.instances;

  validate(rc);
  rc.solver_config().abpg.validate();
  return rc;
}

SolverConfig<double> RunConfig::solver_config() const {
  SolverConfig<double> cfg;
  cfg.alpha = alpha;
  cfg.lambda = lambda;
  cfg.eps2 = eps2;
  cfg.max_outer_iters = max_outer_iters;
  cfg.abpg.gamma = gamma;
  cfg.abpg.rho = rho;
  cfg.abpg.g_min = g_min;
  cfg.abpg.eps1 = eps1;
  cfg.abpg.max_iters = max_init_iters;
  return cfg;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json RunConfig::to_json() const {
  json sizes_j = json::array();
  for (const auto& [m, n] : sizes) sizes_j.push_back({m, n});
  json snr_j = json::array();
  for (double s : snr_db) snr_j.push_back(number(s));
  return {
      {"seed", seed},
      {"jobs", jobs},
      {"solver",
       {{"alpha", alpha ? number(*alpha) : json(nullptr)},
        {"lambda", lambda},
        {"eps1", eps1},
        {"eps2", eps2},
        {"max_outer_iters", max_outer_iters},
        {"max_init_iters", max_init_iters},
        {"gamma", gamma},
        {"rho", rho},
        {"g_min", g_min},
        {"smoothness", smoothness ? number(*smoothness) : json(nullptr)}}},
      {"problem", {{"loss", loss}, {"huber_c", huber_c}, {"eta", eta ? json(*eta) : json(nullptr)}}},
      {"synthetic",
       {{"sizes", sizes_j},
        {"density", density},
        {"snr_db", snr_j},
        {"impulse_density", impulse_density},
        {"impulse_amplitude_factor", impulse_amplitude_factor},
        {"losses", losses},
        {"seeds", seeds},
        {"lambda_mode", lambda_mode}}},
      {"frontier",
       {{"port", port_path ? json(*port_path) : json(nullptr)},
        {"K", K},
        {"sef_points", sef_points},
        {"gef_points", gef_points},
        {"sef_eps1", sef_eps1},
        {"gef_eps", gef_eps}}},
      {"oracle", {{"instances", instances}, {"tolerance", oracle_tolerance}}},
      {"output", {{"dir", out_dir}}},
  };
}

std::string prepare_out_dir(const RunConfig& rc) {
  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + rc.out_dir + ": " + ec.message());
  return rc.out_dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace l0bpg::cli
