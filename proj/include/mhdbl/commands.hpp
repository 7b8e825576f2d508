#pragma once

#include "mhdbl/config.hpp"

namespace mhdbl {

// CLI command bodies. Each writes machine-readable reports under
// cfg.out_dir and returns the process exit code: 0 on success, 1 when a
// hard invariant fails (config errors are raised before these run).
int run_profile_check(const RunConfig& cfg);
int run_weight_check(const RunConfig& cfg);
int run_linear_solve(const RunConfig& cfg);
int run_mms_convergence(const RunConfig& cfg);
int run_nonlinear_solve(const RunConfig& cfg);
int run_sweep(const RunConfig& cfg);

}  // namespace mhdbl
