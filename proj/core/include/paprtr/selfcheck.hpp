#ifndef PAPRTR_SELFCHECK_HPP
#define PAPRTR_SELFCHECK_HPP

/**
 * @file selfcheck.hpp
 * @brief Built-in oracle suite: independent reference computations that
 *        cross-check the transforms, the two convex subproblems, and the
 *        fractional-programming identities.
 *
 * Every oracle here is implemented from first principles (direct summation,
 * dense grid search with refinement, closed-form identities) and shares no
 * code path with the implementation it checks. The suite backs both the
 * `selfcheck` CLI command and the equivalence tests.
 */

#include <cstdint>
#include <string>
#include <vector>

namespace paprtr {

struct SelfCheckOptions {
    std::uint64_t seed = 0x5eedULL;
    int dft_cases = 24;          ///< random vectors across sizes up to 64
    int grid_instances = 100;    ///< per subproblem family, N=4 with one PRT
    int identity_signals = 1000; ///< random signals for the zeta identity
    double dft_tol = 1e-10;
    double papr_tol = 1e-12;
    double grid_tol = 1e-3;
    double fp_identity_tol = 1e-12;
    double zeta_identity_tol = 1e-10;
    /// Fault-injection hook for testing the harness itself: scales the
    /// library IDFT output inside the DFT check. 1.0 = no tampering.
    double tamper_dft_scale = 1.0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;  ///< worst deviation observed
    int cases = 0;
};

std::vector<CheckResult> run_selfchecks(const SelfCheckOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace paprtr

#endif  // PAPRTR_SELFCHECK_HPP
