#include <chrono>
#include <ostream>

#include "l0bpg/harness/io.hpp"
#include "l0bpg/harness/oracle.hpp"
#include "run_config.hpp"

namespace l0bpg::cli {

int cmd_oracle_check(const Overrides& o, std::ostream& log, std::ostream& err) {
  return guarded(err, "oracle-check", [&]() -> int {
    const RunConfig rc = resolve_config(o);
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = harness::run_subproblem_oracle_check(rc.instances, rc.seed, rc.oracle_tolerance);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << "oracle-check: " << report.instances << " instances, " << report.mismatches
        << " mismatches, max |gap| " << harness::format_double(report.max_abs_gap) << " (tolerance "
        << harness::format_double(rc.oracle_tolerance) << "), " << seconds << " s\n";
    if (report.mismatches > 0) {
      err << "oracle-check: subproblem solution differs from enumeration on " << report.mismatches
          << " instances\n";
      return kNumericalFailure;
    }
    return kOk;
  });
}

}  // namespace l0bpg::cli
