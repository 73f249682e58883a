#ifndef PAPRTR_EPIGRAPH_HPP
#define PAPRTR_EPIGRAPH_HPP

/**
 * @file epigraph.hpp
 * @brief Epigraph form shared by the two convex tone-reservation programs,
 *        plus the builders that put them into that form.
 *
 * Both the minimax-peak baseline program and the sparsity-refinement step are
 * instances of
 *
 *     minimize    z' diag(q) z
 *     subject to  ||A_i z + b_i||_2 <= c_i' z + d_i        (cone constraints)
 *                 z' diag(p_j) z + q_j' z + r_j <= 0       (quadratic constraints)
 *
 * over real variables z (complex tone amplitudes are real-embedded, two
 * scalars per tone). solve() lowers this to standard conic form and runs the
 * interior-point solver from cone_solver.hpp.
 *
 * Variable layout used by the builders:
 *     z = [Re r_0, Im r_0, Re r_1, Im r_1, ..., t]
 * where the tones follow alloc.prt_indices() order and t bounds the peak
 * magnitude of the composed time signal.
 */

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "paprtr/signal.hpp"

namespace paprtr {

/// ||A z + b||_2 <= c' z + d
struct SocConstraint {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    double d = 0.0;
};

/// z' diag(p) z + q' z + r <= 0 with p >= 0 elementwise
struct QuadConstraint {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
    double r = 0.0;
};

struct EpigraphProblem {
    Index dim = 0;
    Eigen::VectorXd objective_diag;  ///< minimize z' diag(objective_diag) z, entries >= 0
    std::vector<SocConstraint> cones;
    std::vector<QuadConstraint> quads;

    /// @throws InvariantError on dimension mismatches or indefinite data.
    void validate() const;
};

enum class SolveStatus {
    Optimal,
    Infeasible,
    IterationLimit,
    NumericalFailure,
};

struct SolverTolerances {
    double feasibility = 1e-8;
    double kkt = 1e-8;
    int max_iterations = 200;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd primal;
    double objective_value = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

/**
 * @brief Worst constraint violation at z, evaluated directly from the
 *        constraint data. Deliberately independent of the solver.
 */
double max_constraint_violation(const EpigraphProblem& problem, const Eigen::VectorXd& z);

/**
 * @brief Solve the problem. A result marked Optimal has passed an independent
 *        feasibility re-check (max violation <= 1e-6); otherwise it is
 *        demoted to NumericalFailure.
 */
SolveOutcome solve(const EpigraphProblem& problem, const SolverTolerances& tol = {});

/// Objective and constraints listed row-wise, for offline inspection.
void dump_problem(const EpigraphProblem& problem, std::ostream& os);

/**
 * @brief Minimax peak program: minimize the peak power of d + IDFT(r) subject
 *        to the per-tone bound |r_n|^2 <= (omega / (N - N_R)) ||d||_2^2.
 *
 * The peak is minimized through its square root t (monotone), so the
 * objective weight sits on t and the reported objective value is the peak
 * power t^2.
 */
EpigraphProblem build_minimax_peak(const TimeSignal& d_time,
                                   const ToneAllocation& alloc,
                                   double omega);

/**
 * @brief One sparsity-refinement step: minimize sum_n gamma_n^2 |r_n|^2
 *        subject to ||r||_2^2 <= p_max, per-sample peak bounds |x_k| <= t,
 *        and the surrogate PAPR constraint
 *        2 Re<zeta, x> - ||zeta||_2^2 t^2 >= N / rho_star
 *        with x = d + IDFT(r) and <.,.> the conjugate inner product.
 *
 * gamma_sq holds gamma_n^2 ordered like alloc.prt_indices(); zeta has length N.
 */
EpigraphProblem build_fp_step(const TimeSignal& d_time,
                              const ToneAllocation& alloc,
                              const Eigen::VectorXd& gamma_sq,
                              const ComplexVec& zeta,
                              double p_max,
                              double rho_star_linear);

/// Index of the peak-bound variable t in the builder layout.
inline Index peak_var_index(const ToneAllocation& alloc) { return 2 * alloc.n_prt(); }

/// Extract the complex tone amplitudes from a primal vector in builder layout.
ComplexVec tones_from_primal(const Eigen::VectorXd& primal, const ToneAllocation& alloc);

}  // namespace paprtr

#endif  // PAPRTR_EPIGRAPH_HPP
