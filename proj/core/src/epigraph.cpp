#include "paprtr/epigraph.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "paprtr/cone_solver.hpp"

namespace paprtr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kRecheckTol = 1e-6;

void require(bool cond, const std::string& message) {
    if (!cond) {
        throw InvariantError(message);
    }
}

// Rows (Re x_k, Im x_k) of x = d + IDFT(r) as affine functions of the
// real-embedded tones. Column 2j carries Re r_j, column 2j+1 carries Im r_j.
void fill_peak_row(const ToneAllocation& alloc, Index sample, Index dim,
                   const Complex& d_k, SocConstraint& cone) {
    const Index n = alloc.n_total();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    cone.A = MatrixXd::Zero(2, dim);
    for (Index j = 0; j < alloc.n_prt(); ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(sample) *
                             static_cast<double>(alloc.prt_indices()[static_cast<std::size_t>(j)]) /
                             static_cast<double>(n);
        const double c = std::cos(angle) * scale;
        const double s = std::sin(angle) * scale;
        cone.A(0, 2 * j) = c;
        cone.A(0, 2 * j + 1) = -s;
        cone.A(1, 2 * j) = s;
        cone.A(1, 2 * j + 1) = c;
    }
    cone.b = Eigen::Vector2d(d_k.real(), d_k.imag());
}

}  // namespace

void EpigraphProblem::validate() const {
    require(dim >= 1, "EpigraphProblem: empty variable vector");
    require(objective_diag.size() == dim, "EpigraphProblem: objective size mismatch");
    require((objective_diag.array() >= 0.0).all(),
            "EpigraphProblem: objective matrix must be positive semidefinite");
    for (const auto& cone : cones) {
        require(cone.A.cols() == dim && cone.b.size() == cone.A.rows() && cone.c.size() == dim,
                "EpigraphProblem: cone constraint dimension mismatch");
    }
    for (const auto& quad : quads) {
        require(quad.p.size() == dim && quad.q.size() == dim,
                "EpigraphProblem: quadratic constraint dimension mismatch");
        require((quad.p.array() >= 0.0).all(),
                "EpigraphProblem: quadratic constraint must be convex (p >= 0)");
    }
}

double max_constraint_violation(const EpigraphProblem& problem, const VectorXd& z) {
    double worst = 0.0;
    for (const auto& cone : problem.cones) {
        const double lhs = (cone.A * z + cone.b).norm();
        const double rhs = cone.c.dot(z) + cone.d;
        worst = std::max(worst, lhs - rhs);
    }
    for (const auto& quad : problem.quads) {
        const double value = z.cwiseProduct(quad.p).dot(z) + quad.q.dot(z) + quad.r;
        worst = std::max(worst, value);
    }
    return std::max(worst, 0.0);
}

SolveOutcome solve(const EpigraphProblem& problem, const SolverTolerances& tol) {
    problem.validate();

    const Index n0 = problem.dim;
    const bool has_objective = (problem.objective_diag.array() > 0.0).any();
    const Index n = n0 + (has_objective ? 1 : 0);

    // Count rows: zero-row cones and linear "quadratic" constraints go to the
    // orthant, everything else becomes a second-order cone block.
    Index n_nonneg = 0;
    Index m = 0;
    for (const auto& cone : problem.cones) {
        if (cone.A.rows() == 0) {
            ++n_nonneg;
        } else {
            m += cone.A.rows() + 1;
        }
    }
    std::vector<Index> quad_support;
    for (const auto& quad : problem.quads) {
        const Index support = (quad.p.array() > 0.0).count();
        quad_support.push_back(support);
        if (support == 0) {
            ++n_nonneg;
        } else {
            m += support + 2;
        }
    }
    Index obj_support = 0;
    if (has_objective) {
        obj_support = (problem.objective_diag.array() > 0.0).count();
        m += obj_support + 2;
    }
    m += n_nonneg;

    ConeProgram prog;
    prog.c = VectorXd::Zero(n);
    if (has_objective) {
        prog.c(n0) = 1.0;
    }
    prog.G = MatrixXd::Zero(m, n);
    prog.h = VectorXd::Zero(m);
    prog.n_nonneg = n_nonneg;

    Index row = n_nonneg;  // SOC blocks start after the orthant
    Index lin = 0;
    for (const auto& cone : problem.cones) {
        if (cone.A.rows() == 0) {
            prog.G.row(lin).head(n0) = -cone.c;
            prog.h(lin) = cone.d;
            ++lin;
            continue;
        }
        prog.G.row(row).head(n0) = -cone.c;
        prog.h(row) = cone.d;
        prog.G.block(row + 1, 0, cone.A.rows(), n0) = -cone.A;
        prog.h.segment(row + 1, cone.A.rows()) = cone.b;
        prog.soc_dims.push_back(cone.A.rows() + 1);
        row += cone.A.rows() + 1;
    }
    for (std::size_t qi = 0; qi < problem.quads.size(); ++qi) {
        const auto& quad = problem.quads[qi];
        if (quad_support[qi] == 0) {
            prog.G.row(lin).head(n0) = quad.q;
            prog.h(lin) = -quad.r;
            ++lin;
            continue;
        }
        // z'diag(p)z <= a(z) with a = -q'z - r, written as
        // ||(2 sqrt(p_i) z_i, a - 1)|| <= a + 1.
        prog.G.row(row).head(n0) = quad.q;
        prog.h(row) = 1.0 - quad.r;
        Index k = row + 1;
        for (Index i = 0; i < n0; ++i) {
            if (quad.p(i) > 0.0) {
                prog.G(k, i) = -2.0 * std::sqrt(quad.p(i));
                ++k;
            }
        }
        prog.G.row(k).head(n0) = quad.q;
        prog.h(k) = -1.0 - quad.r;
        prog.soc_dims.push_back(quad_support[qi] + 2);
        row = k + 1;
    }
    if (has_objective) {
        // u >= z'diag(q)z via ||(2 sqrt(q_i) z_i, u - 1)|| <= u + 1.
        prog.G(row, n0) = -1.0;
        prog.h(row) = 1.0;
        Index k = row + 1;
        for (Index i = 0; i < n0; ++i) {
            if (problem.objective_diag(i) > 0.0) {
                prog.G(k, i) = -2.0 * std::sqrt(problem.objective_diag(i));
                ++k;
            }
        }
        prog.G(k, n0) = -1.0;
        prog.h(k) = -1.0;
        prog.soc_dims.push_back(obj_support + 2);
    }

    ConeSettings settings;
    settings.feastol = tol.feasibility;
    settings.abstol = tol.kkt;
    settings.reltol = tol.kkt;
    settings.max_iters = tol.max_iterations;

    const ConeSolution cone_sol = solve_cone_program(prog, settings);

    SolveOutcome out;
    out.primal = cone_sol.x.head(n0);
    out.objective_value = out.primal.cwiseProduct(problem.objective_diag).dot(out.primal);
    out.iterations = cone_sol.iterations;
    out.kkt_residual = std::max({cone_sol.pres, cone_sol.dres,
                                 std::min(cone_sol.gap, cone_sol.gap / std::max(
                                     1.0, std::abs(cone_sol.primal_objective)))});

    switch (cone_sol.status) {
        case ConeStatus::Optimal:
            out.status = SolveStatus::Optimal;
            break;
        case ConeStatus::PrimalInfeasible:
            out.status = SolveStatus::Infeasible;
            break;
        case ConeStatus::IterationLimit:
            out.status = SolveStatus::IterationLimit;
            break;
        case ConeStatus::DualInfeasible:
        case ConeStatus::NumericalFailure:
            out.status = SolveStatus::NumericalFailure;
            break;
    }

    // A claimed optimum must satisfy the constraints when they are evaluated
    // directly, not just inside the solver's scaled view.
    if (out.status == SolveStatus::Optimal &&
        max_constraint_violation(problem, out.primal) > kRecheckTol) {
        out.status = SolveStatus::NumericalFailure;
    }
    return out;
}

void dump_problem(const EpigraphProblem& problem, std::ostream& os) {
    os << "epigraph problem: dim=" << problem.dim << "\n";
    os << "objective diag:";
    for (Index i = 0; i < problem.dim; ++i) {
        os << ' ' << problem.objective_diag(i);
    }
    os << "\n";
    for (std::size_t i = 0; i < problem.cones.size(); ++i) {
        const auto& cone = problem.cones[i];
        os << "cone " << i << ": ||A z + b|| <= c'z + " << cone.d << "\n";
        for (Index r = 0; r < cone.A.rows(); ++r) {
            os << "  A[" << r << "]:";
            for (Index c = 0; c < cone.A.cols(); ++c) {
                os << ' ' << cone.A(r, c);
            }
            os << "  b: " << cone.b(r) << "\n";
        }
        os << "  c:";
        for (Index c = 0; c < cone.c.size(); ++c) {
            os << ' ' << cone.c(c);
        }
        os << "\n";
    }
    for (std::size_t i = 0; i < problem.quads.size(); ++i) {
        const auto& quad = problem.quads[i];
        os << "quad " << i << ": z'diag(p)z + q'z + " << quad.r << " <= 0\n  p:";
        for (Index c = 0; c < quad.p.size(); ++c) {
            os << ' ' << quad.p(c);
        }
        os << "\n  q:";
        for (Index c = 0; c < quad.q.size(); ++c) {
            os << ' ' << quad.q(c);
        }
        os << "\n";
    }
}

EpigraphProblem build_minimax_peak(const TimeSignal& d_time,
                                   const ToneAllocation& alloc,
                                   double omega) {
    require(omega > 0.0, "build_minimax_peak: omega must be positive");
    require(d_time.size() == alloc.n_total(), "build_minimax_peak: length mismatch");

    const Index n = alloc.n_total();
    const Index n_prt = alloc.n_prt();
    const Index dim = 2 * n_prt + 1;
    const Index t_idx = dim - 1;

    EpigraphProblem problem;
    problem.dim = dim;
    problem.objective_diag = VectorXd::Zero(dim);
    problem.objective_diag(t_idx) = 1.0;  // minimize t^2 == peak power

    // Per-sample peak cones |x_k| <= t.
    problem.cones.reserve(static_cast<std::size_t>(n + n_prt));
    for (Index k = 0; k < n; ++k) {
        SocConstraint cone;
        fill_peak_row(alloc, k, dim, d_time.samples(k), cone);
        cone.c = VectorXd::Zero(dim);
        cone.c(t_idx) = 1.0;
        cone.d = 0.0;
        problem.cones.push_back(std::move(cone));
    }

    // Per-tone power cap |r_n| <= sqrt(omega / (N - N_R)) ||d||_2.
    const double bound =
        std::sqrt(omega / static_cast<double>(n - n_prt)) * d_time.samples.norm();
    for (Index j = 0; j < n_prt; ++j) {
        SocConstraint cone;
        cone.A = MatrixXd::Zero(2, dim);
        cone.A(0, 2 * j) = 1.0;
        cone.A(1, 2 * j + 1) = 1.0;
        cone.b = Eigen::Vector2d::Zero();
        cone.c = VectorXd::Zero(dim);
        cone.d = bound;
        problem.cones.push_back(std::move(cone));
    }
    return problem;
}

EpigraphProblem build_fp_step(const TimeSignal& d_time,
                              const ToneAllocation& alloc,
                              const VectorXd& gamma_sq,
                              const ComplexVec& zeta,
                              double p_max,
                              double rho_star_linear) {
    const Index n = alloc.n_total();
    const Index n_prt = alloc.n_prt();
    require(d_time.size() == n, "build_fp_step: data length mismatch");
    require(gamma_sq.size() == n_prt, "build_fp_step: gamma size mismatch");
    require((gamma_sq.array() >= 0.0).all(), "build_fp_step: gamma_sq must be nonnegative");
    require(zeta.size() == n, "build_fp_step: zeta length mismatch");
    require(p_max > 0.0, "build_fp_step: p_max must be positive");
    require(rho_star_linear > 0.0, "build_fp_step: rho_star must be positive");

    const Index dim = 2 * n_prt + 1;
    const Index t_idx = dim - 1;

    EpigraphProblem problem;
    problem.dim = dim;
    problem.objective_diag = VectorXd::Zero(dim);
    for (Index j = 0; j < n_prt; ++j) {
        problem.objective_diag(2 * j) = gamma_sq(j);
        problem.objective_diag(2 * j + 1) = gamma_sq(j);
    }

    // Total PRT power budget ||r||_2 <= sqrt(p_max).
    {
        SocConstraint cone;
        cone.A = MatrixXd::Zero(2 * n_prt, dim);
        cone.A.leftCols(2 * n_prt).setIdentity();
        cone.b = VectorXd::Zero(2 * n_prt);
        cone.c = VectorXd::Zero(dim);
        cone.d = std::sqrt(p_max);
        problem.cones.push_back(std::move(cone));
    }

    // Per-sample peak cones |x_k| <= t.
    for (Index k = 0; k < n; ++k) {
        SocConstraint cone;
        fill_peak_row(alloc, k, dim, d_time.samples(k), cone);
        cone.c = VectorXd::Zero(dim);
        cone.c(t_idx) = 1.0;
        cone.d = 0.0;
        problem.cones.push_back(std::move(cone));
    }

    // Surrogate PAPR constraint:
    //   ||zeta||^2 t^2 - 2 Re<zeta, d> - 2 Re<F zeta, r> + N / rho* <= 0.
    {
        const FreqVector zeta_freq = dft(TimeSignal(zeta));
        double re_zeta_d = 0.0;
        for (Index k = 0; k < n; ++k) {
            re_zeta_d += std::real(std::conj(zeta(k)) * d_time.samples(k));
        }
        QuadConstraint quad;
        quad.p = VectorXd::Zero(dim);
        quad.p(t_idx) = zeta.squaredNorm();
        quad.q = VectorXd::Zero(dim);
        for (Index j = 0; j < n_prt; ++j) {
            const Complex w = zeta_freq.entries(alloc.prt_indices()[static_cast<std::size_t>(j)]);
            quad.q(2 * j) = -2.0 * w.real();
            quad.q(2 * j + 1) = -2.0 * w.imag();
        }
        quad.r = static_cast<double>(n) / rho_star_linear - 2.0 * re_zeta_d;
        problem.quads.push_back(std::move(quad));
    }
    return problem;
}

ComplexVec tones_from_primal(const VectorXd& primal, const ToneAllocation& alloc) {
    ComplexVec tones(alloc.n_prt());
    for (Index j = 0; j < alloc.n_prt(); ++j) {
        tones(j) = Complex(primal(2 * j), primal(2 * j + 1));
    }
    return tones;
}

}  // namespace paprtr
