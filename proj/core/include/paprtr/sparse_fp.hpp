#ifndef PAPRTR_SPARSE_FP_HPP
#define PAPRTR_SPARSE_FP_HPP

/**
 * @file sparse_fp.hpp
 * @brief Sparse tone-reservation PAPR reduction: use as few PRTs as possible
 *        while meeting a target PAPR under a total power budget.
 *
 * The nonzero count of the PRT vector is replaced by the smooth surrogate
 * sum_n |r_n|^2 / (|r_n|^2 + alpha) and the PAPR constraint by a surrogate
 * that is tight at the current iterate; both are handled with fractional
 * programming auxiliaries (gamma per tone, zeta per sample) that stay fixed
 * within each convex subproblem and are refreshed between subproblems. Tones
 * whose optimized magnitude falls below epsilon are forced to exact zero.
 *
 * The iteration starts from the baseline reducer in sota.hpp. When a
 * subproblem is infeasible (the target PAPR and power budget are absolute
 * constraints, so this can happen) or the final thresholded vector misses the
 * target, the baseline solution is returned unchanged in substance, with
 * status FallbackToInit. The whole procedure is therefore a refinement stage
 * on top of the baseline.
 */

#include <optional>
#include <vector>

#include "paprtr/epigraph.hpp"
#include "paprtr/signal.hpp"
#include "paprtr/sota.hpp"

namespace paprtr {

struct SparseFpConfig {
    double rho_star_db = 6.0;   ///< target PAPR (dB)
    /// Total PRT power budget. Unset: N_R * (omega / (N - N_R)) * ||d||_2^2,
    /// the budget implied by the baseline per-tone cap, which guarantees the
    /// initializer is power-feasible.
    std::optional<double> p_max{};
    double alpha = 1e-4;        ///< l0 surrogate tightness (> 0)
    double epsilon = 7e-4;      ///< zero-forcing threshold (> 0)
    int max_fp_iters = 20;
    double convergence_tol = 1e-5;
    /// Ablation switch: threshold only after convergence rather than inside
    /// every iteration.
    bool threshold_final_only = false;
    SotaConfig sota{};
};

/**
 * @brief Snapshot of one iterate: the tone vector together with the
 *        auxiliaries computed from it (which parameterize the next
 *        subproblem) and its surrogate/PAPR values.
 */
struct FpIterate {
    FreqVector r_freq;
    Eigen::VectorXd gamma_sq;  ///< gamma_n^2, ordered like alloc.prt_indices()
    ComplexVec zeta;           ///< x / ||x||_inf^2 for the composed signal x
    double surrogate_l0;
    PaprValue papr;
};

enum class ReductionStatus { Refined, FallbackToInit };

struct ReductionResult {
    FreqVector r_freq;
    ReductionStatus status;
    std::vector<Index> active_prt;  ///< PRTs with nonzero optimized amplitude
    std::vector<Index> freed_prt;   ///< PRTs left free for other uses
    PaprValue achieved_papr;
    int iterations;                 ///< subproblems solved
    std::vector<FpIterate> trace;   ///< initializer first, then one per iteration
    double p_max_used;              ///< resolved power budget (config or derived)
};

/// Smooth nonzero count over the PRT set: sum |r_n|^2 / (|r_n|^2 + alpha).
double l0_surrogate(const FreqVector& r, const ToneAllocation& alloc, double alpha);

/// gamma_n^2 with gamma_n = sqrt(alpha) / (|r_n|^2 + alpha), over the PRT set.
Eigen::VectorXd update_gamma(const FreqVector& r, const ToneAllocation& alloc, double alpha);

/// zeta = x / ||x||_inf^2. @throws InvariantError for an all-zero signal.
ComplexVec update_zeta(const TimeSignal& x);

/// Zero-force PRT entries with |r_n| < epsilon; |r_n| == epsilon is kept.
FreqVector enforce_sparsity(const FreqVector& r, const ToneAllocation& alloc, double epsilon);

/// Power budget implied by the baseline per-tone cap (the p_max default).
double default_p_max(const FreqVector& d, const ToneAllocation& alloc, double omega);

/**
 * @brief Run the full reduction: baseline initialization, iterated convex
 *        refinement with per-iteration zero-forcing, and the final
 *        feasibility check that decides Refined vs FallbackToInit.
 */
ReductionResult reduce_sparse(const FreqVector& d,
                              const ToneAllocation& alloc,
                              const SparseFpConfig& cfg);

}  // namespace paprtr

#endif  // PAPRTR_SPARSE_FP_HPP
