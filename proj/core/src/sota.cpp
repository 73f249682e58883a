#include "paprtr/sota.hpp"

#include <cmath>
#include <utility>

namespace paprtr {

namespace {

FreqVector scatter_tones(const ComplexVec& tones, const ToneAllocation& alloc) {
    ComplexVec full = ComplexVec::Zero(alloc.n_total());
    for (Index j = 0; j < alloc.n_prt(); ++j) {
        full(alloc.prt_indices()[static_cast<std::size_t>(j)]) = tones(j);
    }
    return FreqVector(std::move(full));
}

}  // namespace

SotaResult reduce_sota(const FreqVector& d, const ToneAllocation& alloc, const SotaConfig& cfg) {
    if (cfg.omega <= 0.0) {
        throw InvariantError("reduce_sota: omega must be positive");
    }
    if (d.size() != alloc.n_total()) {
        throw InvariantError("reduce_sota: data length mismatch");
    }
    if (support_violation(d, alloc.data_indices(), alloc.n_total()) > 1e-12) {
        throw InvariantError("reduce_sota: data vector has energy on a PRT tone");
    }

    const Index n = alloc.n_total();

    // Degenerate all-zero symbol: the per-tone cap collapses to zero, so the
    // optimum is forced without a solve.
    if (d.entries.norm() == 0.0) {
        return SotaResult{FreqVector(ComplexVec::Zero(n)), PaprValue{1.0, 0.0}, 0.0,
                          SolveStatus::Optimal};
    }

    const TimeSignal d_time = idft(d);
    const EpigraphProblem problem = build_minimax_peak(d_time, alloc, cfg.omega);
    const SolveOutcome outcome = solve(problem, cfg.tolerances);

    FreqVector r = scatter_tones(tones_from_primal(outcome.primal, alloc), alloc);
    const auto [x_freq, x_time] = compose(d, r, alloc);

    double peak = 0.0;
    for (Index k = 0; k < n; ++k) {
        peak = std::max(peak, std::norm(x_time.samples(k)));
    }

    return SotaResult{std::move(r), papr(x_time), peak, outcome.status};
}

}  // namespace paprtr
