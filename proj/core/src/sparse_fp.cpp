#include "paprtr/sparse_fp.hpp"

#include <cmath>
#include <utility>

namespace paprtr {

namespace {

void require(bool cond, const char* message) {
    if (!cond) {
        throw InvariantError(message);
    }
}

FreqVector scatter_tones(const ComplexVec& tones, const ToneAllocation& alloc) {
    ComplexVec full = ComplexVec::Zero(alloc.n_total());
    for (Index j = 0; j < alloc.n_prt(); ++j) {
        full(alloc.prt_indices()[static_cast<std::size_t>(j)]) = tones(j);
    }
    return FreqVector(std::move(full));
}

void validate_config(const SparseFpConfig& cfg) {
    require(std::isfinite(cfg.rho_star_db), "reduce_sparse: rho_star_db must be finite");
    require(!cfg.p_max || *cfg.p_max > 0.0, "reduce_sparse: p_max must be positive");
    require(cfg.alpha > 0.0, "reduce_sparse: alpha must be positive");
    require(cfg.epsilon > 0.0, "reduce_sparse: epsilon must be positive");
    require(cfg.max_fp_iters >= 1, "reduce_sparse: max_fp_iters must be >= 1");
    require(cfg.convergence_tol > 0.0, "reduce_sparse: convergence_tol must be positive");
    require(cfg.sota.omega > 0.0, "reduce_sparse: omega must be positive");
}

}  // namespace

double l0_surrogate(const FreqVector& r, const ToneAllocation& alloc, double alpha) {
    require(alpha > 0.0, "l0_surrogate: alpha must be positive");
    double sum = 0.0;
    for (Index tone : alloc.prt_indices()) {
        const double mag_sq = std::norm(r.entries(tone));
        sum += mag_sq / (mag_sq + alpha);
    }
    return sum;
}

Eigen::VectorXd update_gamma(const FreqVector& r, const ToneAllocation& alloc, double alpha) {
    require(alpha > 0.0, "update_gamma: alpha must be positive");
    Eigen::VectorXd gamma_sq(alloc.n_prt());
    for (Index j = 0; j < alloc.n_prt(); ++j) {
        const double mag_sq = std::norm(r.entries(alloc.prt_indices()[static_cast<std::size_t>(j)]));
        const double gamma = std::sqrt(alpha) / (mag_sq + alpha);
        gamma_sq(j) = gamma * gamma;
    }
    return gamma_sq;
}

ComplexVec update_zeta(const TimeSignal& x) {
    double peak = 0.0;
    for (Index k = 0; k < x.size(); ++k) {
        peak = std::max(peak, std::norm(x.samples(k)));
    }
    require(peak > 0.0, "update_zeta: undefined for the all-zero signal");
    return x.samples / peak;
}

FreqVector enforce_sparsity(const FreqVector& r, const ToneAllocation& alloc, double epsilon) {
    require(epsilon > 0.0, "enforce_sparsity: epsilon must be positive");
    ComplexVec out = r.entries;
    for (Index tone : alloc.prt_indices()) {
        if (std::abs(out(tone)) < epsilon) {
            out(tone) = Complex(0.0, 0.0);
        }
    }
    return FreqVector(std::move(out));
}

double default_p_max(const FreqVector& d, const ToneAllocation& alloc, double omega) {
    const double n_r = static_cast<double>(alloc.n_prt());
    const double n_d = static_cast<double>(alloc.n_total() - alloc.n_prt());
    return n_r * (omega / n_d) * d.entries.squaredNorm();
}

ReductionResult reduce_sparse(const FreqVector& d,
                              const ToneAllocation& alloc,
                              const SparseFpConfig& cfg) {
    validate_config(cfg);
    require(d.size() == alloc.n_total(), "reduce_sparse: data length mismatch");
    require(support_violation(d, alloc.data_indices(), alloc.n_total()) <= 1e-12,
            "reduce_sparse: data vector has energy on a PRT tone");

    const double rho_star = std::pow(10.0, cfg.rho_star_db / 10.0);
    const Index n = alloc.n_total();

    // Degenerate all-zero symbol: nothing to reduce.
    if (d.entries.norm() == 0.0) {
        FreqVector zero(ComplexVec::Zero(n));
        std::vector<Index> freed = alloc.prt_indices();
        return ReductionResult{std::move(zero),
                               rho_star >= 1.0 ? ReductionStatus::Refined
                                               : ReductionStatus::FallbackToInit,
                               {},
                               std::move(freed),
                               PaprValue{1.0, 0.0},
                               0,
                               {},
                               cfg.p_max.value_or(0.0)};
    }

    const double p_max = cfg.p_max ? *cfg.p_max : default_p_max(d, alloc, cfg.sota.omega);
    const TimeSignal d_time = idft(d);

    const auto make_iterate = [&](const FreqVector& r) {
        auto [x_freq, x_time] = compose(d, r, alloc);
        return FpIterate{r, update_gamma(r, alloc, cfg.alpha), update_zeta(x_time),
                         l0_surrogate(r, alloc, cfg.alpha), papr(x_time)};
    };

    const SotaResult init = reduce_sota(d, alloc, cfg.sota);

    std::vector<FpIterate> trace;
    trace.reserve(static_cast<std::size_t>(cfg.max_fp_iters) + 1);
    trace.push_back(make_iterate(init.r_freq));

    bool fell_back = init.status != SolveStatus::Optimal;
    int iterations = 0;
    FreqVector r_prev = init.r_freq;

    if (!fell_back) {
        for (int k = 1; k <= cfg.max_fp_iters; ++k) {
            // The target is strictly below the floor rho >= 1: no point in
            // solving, every subproblem is infeasible.
            if (rho_star < 1.0) {
                fell_back = true;
                break;
            }
            const EpigraphProblem problem =
                build_fp_step(d_time, alloc, trace.back().gamma_sq, trace.back().zeta,
                              p_max, rho_star);
            const SolveOutcome outcome = solve(problem, cfg.sota.tolerances);
            if (outcome.status != SolveStatus::Optimal) {
                fell_back = true;
                break;
            }
            FreqVector r_new = scatter_tones(tones_from_primal(outcome.primal, alloc), alloc);
            if (!cfg.threshold_final_only) {
                r_new = enforce_sparsity(r_new, alloc, cfg.epsilon);
            }
            iterations = k;
            trace.push_back(make_iterate(r_new));

            const double delta = (r_new.entries - r_prev.entries).norm();
            const double scale = std::max(1.0, r_prev.entries.norm());
            r_prev = std::move(r_new);
            if (delta <= cfg.convergence_tol * scale) {
                break;
            }
        }
    }

    FreqVector r_final = fell_back
        ? enforce_sparsity(init.r_freq, alloc, cfg.epsilon)
        : (cfg.threshold_final_only ? enforce_sparsity(r_prev, alloc, cfg.epsilon)
                                    : std::move(r_prev));

    ReductionStatus status = ReductionStatus::FallbackToInit;
    if (!fell_back) {
        // Refined demands that the transmitted (post-threshold) signal really
        // satisfies both constraints; thresholding can only shrink the power,
        // so the PAPR re-check is the one that can demote.
        auto [x_freq, x_time] = compose(d, r_final, alloc);
        const bool papr_ok = papr(x_time).linear <= rho_star * (1.0 + 1e-4);
        const bool power_ok = r_final.entries.squaredNorm() <= p_max * (1.0 + 1e-6);
        if (papr_ok && power_ok) {
            status = ReductionStatus::Refined;
        } else {
            r_final = enforce_sparsity(init.r_freq, alloc, cfg.epsilon);
        }
    }

    auto [x_freq, x_time] = compose(d, r_final, alloc);

    std::vector<Index> active;
    std::vector<Index> freed;
    for (Index tone : alloc.prt_indices()) {
        if (r_final.entries(tone) != Complex(0.0, 0.0)) {
            active.push_back(tone);
        } else {
            freed.push_back(tone);
        }
    }

    return ReductionResult{std::move(r_final), status,         std::move(active),
                           std::move(freed),  papr(x_time),    iterations,
                           std::move(trace),  p_max};
}

}  // namespace paprtr
