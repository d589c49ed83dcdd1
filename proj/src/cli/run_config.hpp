#pragma once

#include <cstdint>
#include <exception>
#include <ostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "l0bpg/cli/commands.hpp"
#include "l0bpg/errors.hpp"
#include "l0bpg/solver.hpp"

namespace l0bpg::cli {

/// Config file merged with command-line overrides and defaults. Everything a
/// command reads comes from here, and to_json() is what gets echoed.
struct RunConfig {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir = ".";

  // solver
  std::optional<double> alpha;
  double lambda = 1.0;
  double eps1 = 1e-6;
  double eps2 = 1e-6;
  int max_outer_iters = 100000;
  int max_init_iters = 100000;
  double gamma = 2.0;
  double rho = 1.2;
  double g_min = 1e-2;
  std::optional<double> smoothness;

  // problem
  std::string loss = "quadratic";
  double huber_c = 1.0;
  std::optional<double> eta;

  // synthetic
  std::vector<std::pair<Index, Index>> sizes{{200, 400}};
  double density = 0.02;
  std::vector<double> snr_db{50.0};
  std::vector<double> impulse_density{0.0};
  double impulse_amplitude_factor = 20.0;
  std::vector<std::string> losses{"quadratic"};
  int seeds = 1;
  std::string lambda_mode = "fixed";

  // frontier
  std::optional<std::string> port_path;
  int K = 10;
  int sef_points = 2000;
  int gef_points = 50;
  double sef_eps1 = 1e-10;
  double gef_eps = 1e-10;

  // oracle-check
  int instances = 500;
  double oracle_tolerance = 1e-10;

  SolverConfig<double> solver_config() const;
  nlohmann::json to_json() const;
};

/// Reads the optional config file, applies overrides, validates the result.
/// Throws InputError on any problem.
RunConfig resolve_config(const Overrides& o);

/// Creates the output directory if needed.
std::string prepare_out_dir(const RunConfig& rc);

std::string join_path(const std::string& dir, const std::string& name);

/// JSON number in shortest round-trip form; non-finite values become strings.
nlohmann::json number(double v);
std::string dump(const nlohmann::json& doc);

}  // namespace l0bpg::cli

namespace l0bpg::cli {

/// Runs a command body and maps failures to exit codes: input and parse
/// problems give 1, numerical failures (and anything unexpected) give 2.
template <typename Body>
int guarded(std::ostream& err, const char* command, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << command << ": input error: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << command << ": input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalFailure& e) {
    err << command << ": numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << command << ": failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace l0bpg::cli
