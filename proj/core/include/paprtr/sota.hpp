#ifndef PAPRTR_SOTA_HPP
#define PAPRTR_SOTA_HPP

/**
 * @file sota.hpp
 * @brief Baseline tone-reservation PAPR reducer: minimize the peak power of
 *        the composed signal subject to a per-tone power cap on the PRTs.
 *
 * This is both a standalone reducer and the initializer of the sparse
 * refinement in sparse_fp.hpp. It minimizes only the PAPR numerator (the
 * peak), not the ratio itself, and r = 0 is always feasible, so the achieved
 * peak never exceeds the raw data peak.
 */

#include "paprtr/epigraph.hpp"
#include "paprtr/signal.hpp"

namespace paprtr {

struct SotaConfig {
    /// Power level gap constant (linear ratio, > 0) in the per-tone cap
    /// |r_n|^2 <= (omega / (N - N_R)) ||d||_2^2.
    double omega = 10.0;
    SolverTolerances tolerances{};
};

struct SotaResult {
    FreqVector r_freq;       ///< length N, support on the PRT set
    PaprValue achieved_papr; ///< PAPR of d + IDFT(r); 0 dB for an all-zero signal
    double peak_power;       ///< ||d + IDFT(r)||_inf^2
    SolveStatus status;
};

/**
 * @brief Solve the minimax-peak program for the given data symbols.
 *
 * @param d frequency-domain data vector, supported on the data tone set
 * @throws InvariantError on support violations or invalid configuration;
 *         solver failures are reported through SotaResult::status.
 */
SotaResult reduce_sota(const FreqVector& d, const ToneAllocation& alloc, const SotaConfig& cfg);

}  // namespace paprtr

#endif  // PAPRTR_SOTA_HPP
