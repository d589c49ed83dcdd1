#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace l0bpg::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNumericalFailure = 2 };

/// Values given on the command line. Unset fields fall back to the config
/// file, then to built-in defaults.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;

  std::optional<double> alpha, lambda, eps1, eps2, smoothness;
  std::optional<int> max_outer_iters, max_init_iters;

  std::optional<std::string> loss;
  std::optional<double> huber_c, eta;

  // solve
  std::optional<std::string> problem_path, matrix_a_path, matrix_b_path;

  // synth
  std::optional<int> seeds;
  std::optional<std::string> lambda_mode;

  // frontier
  std::optional<std::string> port_path;
  std::optional<int> K, sef_points, gef_points;
  std::optional<double> sef_eps1;

  // oracle-check
  std::optional<int> instances;
};

/// Output directory used when neither --out-dir nor the config sets one.
inline constexpr const char* kOutDirEnv = "L0BPG_OUT_DIR";

int cmd_solve(const Overrides& o, std::ostream& log, std::ostream& err);
int cmd_synth(const Overrides& o, std::ostream& log, std::ostream& err);
int cmd_frontier(const Overrides& o, std::ostream& log, std::ostream& err);
int cmd_oracle_check(const Overrides& o, std::ostream& log, std::ostream& err);

/// Loads a run-config document and rejects unknown keys. Exposed for tests.
nlohmann::json load_run_config(const std::string& path);
void validate_run_config(const nlohmann::json& doc);

}  // namespace l0bpg::cli
