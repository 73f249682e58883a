#include "paprtr/cone_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace paprtr {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kStepBack = 0.99;   // fraction-to-boundary factor
constexpr double kSigmaMin = 1e-4;
constexpr double kSigmaMax = 0.9999;
constexpr double kMinStep = 1e-9;    // below this the iteration has stalled

struct ConeLayout {
    Index n_nonneg = 0;
    std::vector<Index> soc_starts;
    std::vector<Index> soc_dims;
    Index rows = 0;
    Index degree = 0;  // orthant dimension + number of SOCs

    explicit ConeLayout(const ConeProgram& prog) {
        n_nonneg = prog.n_nonneg;
        Index at = n_nonneg;
        for (Index dim : prog.soc_dims) {
            soc_starts.push_back(at);
            soc_dims.push_back(dim);
            at += dim;
        }
        rows = at;
        degree = n_nonneg + static_cast<Index>(soc_dims.size());
    }
};

// Nesterov-Todd scaling in the product cone. W is symmetric, W z = W^{-1} s,
// and for each SOC block W = eta (2 wbar wbar' - J) with wbar' J wbar = 1,
// J = diag(1, -I).
struct Scaling {
    VectorXd orthant_w;            // sqrt(s_i / z_i)
    std::vector<double> eta;       // per SOC
    std::vector<VectorXd> wbar;    // per SOC

    bool update(const ConeLayout& lay, const VectorXd& s, const VectorXd& z) {
        orthant_w.resize(lay.n_nonneg);
        for (Index i = 0; i < lay.n_nonneg; ++i) {
            if (s(i) <= 0.0 || z(i) <= 0.0) {
                return false;
            }
            orthant_w(i) = std::sqrt(s(i) / z(i));
        }
        const auto n_soc = lay.soc_dims.size();
        eta.assign(n_soc, 0.0);
        wbar.assign(n_soc, VectorXd());
        for (std::size_t k = 0; k < n_soc; ++k) {
            const Index at = lay.soc_starts[k];
            const Index dim = lay.soc_dims[k];
            const double sres = s(at) * s(at) - s.segment(at + 1, dim - 1).squaredNorm();
            const double zres = z(at) * z(at) - z.segment(at + 1, dim - 1).squaredNorm();
            if (sres <= 0.0 || zres <= 0.0 || s(at) <= 0.0 || z(at) <= 0.0) {
                return false;
            }
            const double snorm = std::sqrt(sres);
            const double znorm = std::sqrt(zres);
            VectorXd sbar = s.segment(at, dim) / snorm;
            VectorXd zbar = z.segment(at, dim) / znorm;
            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            VectorXd w(dim);
            w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
            w.tail(dim - 1) =
                (sbar.tail(dim - 1) - zbar.tail(dim - 1)) / (2.0 * gamma);
            wbar[k] = std::move(w);
            eta[k] = std::sqrt(snorm / znorm);
        }
        return true;
    }

    // y = W u (in place)
    void apply(const ConeLayout& lay, VectorXd& u) const {
        u.head(lay.n_nonneg).array() *= orthant_w.array();
        for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
            const Index at = lay.soc_starts[k];
            const Index dim = lay.soc_dims[k];
            const VectorXd& w = wbar[k];
            const double dot = w.dot(u.segment(at, dim));
            // W u = eta (2 wbar (wbar'u) - J u)
            const double u0 = u(at);
            u(at) = eta[k] * (2.0 * w(0) * dot - u0);
            u.segment(at + 1, dim - 1) =
                eta[k] * (2.0 * dot * w.tail(dim - 1) + u.segment(at + 1, dim - 1));
        }
    }

    // y = W^{-1} u (in place); uses H^{-1} = 2 (J wbar)(J wbar)' - J
    void apply_inv(const ConeLayout& lay, VectorXd& u) const {
        u.head(lay.n_nonneg).array() /= orthant_w.array();
        for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
            const Index at = lay.soc_starts[k];
            const Index dim = lay.soc_dims[k];
            const VectorXd& w = wbar[k];
            const double dot = w(0) * u(at) - w.tail(dim - 1).dot(u.segment(at + 1, dim - 1));
            const double u0 = u(at);
            u(at) = (2.0 * w(0) * dot - u0) / eta[k];
            u.segment(at + 1, dim - 1) =
                (-2.0 * dot * w.tail(dim - 1) + u.segment(at + 1, dim - 1)) / eta[k];
        }
    }
};

// Jordan product u o v in the product cone.
void cone_product(const ConeLayout& lay, const VectorXd& u, const VectorXd& v, VectorXd& out) {
    out.resize(lay.rows);
    out.head(lay.n_nonneg) = u.head(lay.n_nonneg).cwiseProduct(v.head(lay.n_nonneg));
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const Index at = lay.soc_starts[k];
        const Index dim = lay.soc_dims[k];
        out(at) = u.segment(at, dim).dot(v.segment(at, dim));
        out.segment(at + 1, dim - 1) =
            u(at) * v.segment(at + 1, dim - 1) + v(at) * u.segment(at + 1, dim - 1);
    }
}

// Jordan division: solves lambda o y = d.
void cone_divide(const ConeLayout& lay, const VectorXd& lambda, const VectorXd& d, VectorXd& out) {
    out.resize(lay.rows);
    out.head(lay.n_nonneg) = d.head(lay.n_nonneg).cwiseQuotient(lambda.head(lay.n_nonneg));
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const Index at = lay.soc_starts[k];
        const Index dim = lay.soc_dims[k];
        const double l0 = lambda(at);
        const double rho = l0 * l0 - lambda.segment(at + 1, dim - 1).squaredNorm();
        const double zeta = lambda.segment(at + 1, dim - 1).dot(d.segment(at + 1, dim - 1));
        const double factor = (zeta / l0 - d(at)) / rho;
        out(at) = (l0 * d(at) - zeta) / rho;
        out.segment(at + 1, dim - 1) =
            factor * lambda.segment(at + 1, dim - 1) + d.segment(at + 1, dim - 1) / l0;
    }
}

// Identity element of the product cone.
VectorXd cone_identity(const ConeLayout& lay) {
    VectorXd e = VectorXd::Zero(lay.rows);
    e.head(lay.n_nonneg).setOnes();
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        e(lay.soc_starts[k]) = 1.0;
    }
    return e;
}

// Shifts u along the identity ray until it is safely interior.
VectorXd bring_to_cone(const ConeLayout& lay, const VectorXd& u) {
    double alpha = -0.99;
    for (Index i = 0; i < lay.n_nonneg; ++i) {
        alpha = std::max(alpha, -u(i));
    }
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const Index at = lay.soc_starts[k];
        const Index dim = lay.soc_dims[k];
        const double margin = u(at) - u.segment(at + 1, dim - 1).norm();
        alpha = std::max(alpha, -margin);
    }
    return u + (1.0 + alpha) * cone_identity(lay);
}

double smallest_positive_root(double a, double b, double c) {
    const double none = std::numeric_limits<double>::infinity();
    if (std::abs(a) < 1e-300) {
        if (b < 0.0) {
            return -c / b;
        }
        return none;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        return none;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double best = none;
    for (double root : {q / a, (q != 0.0 ? c / q : none)}) {
        if (root > 0.0 && root < best) {
            best = root;
        }
    }
    return best;
}

// Largest step alpha such that u + alpha du stays in the cone.
double max_step(const ConeLayout& lay, const VectorXd& u, const VectorXd& du) {
    double alpha = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < lay.n_nonneg; ++i) {
        if (du(i) < 0.0) {
            alpha = std::min(alpha, -u(i) / du(i));
        }
    }
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const Index at = lay.soc_starts[k];
        const Index dim = lay.soc_dims[k];
        const double a = du(at) * du(at) - du.segment(at + 1, dim - 1).squaredNorm();
        const double b =
            2.0 * (u(at) * du(at) - u.segment(at + 1, dim - 1).dot(du.segment(at + 1, dim - 1)));
        const double c = u(at) * u(at) - u.segment(at + 1, dim - 1).squaredNorm();
        alpha = std::min(alpha, smallest_positive_root(a, b, std::max(c, 0.0)));
        if (du(at) < 0.0) {
            alpha = std::min(alpha, -u(at) / du(at));
        }
    }
    return alpha;
}

// Normal-equation KKT solver for [0 G'; G -W^2] [ux; uz] = [bx; bz],
// refreshed once per interior-point iteration.
class KktSolver {
public:
    bool factorize(const ConeLayout& lay, const MatrixXd& G, const Scaling& W) {
        lay_ = &lay;
        G_ = &G;
        W_ = &W;
        Gs_ = G;
        for (Index j = 0; j < Gs_.cols(); ++j) {
            VectorXd col = Gs_.col(j);
            W.apply_inv(lay, col);
            Gs_.col(j) = col;
        }
        MatrixXd M = MatrixXd::Zero(G.cols(), G.cols());
        M.selfadjointView<Eigen::Lower>().rankUpdate(Gs_.transpose());
        llt_.compute(M);
        if (llt_.info() != Eigen::Success) {
            // Retry with a small diagonal shift before giving up.
            M.diagonal().array() += 1e-12 * (1.0 + M.trace() / static_cast<double>(G.cols()));
            llt_.compute(M);
        }
        return llt_.info() == Eigen::Success;
    }

    void solve(const VectorXd& bx, const VectorXd& bz, VectorXd& ux, VectorXd& uz) const {
        solve_once(bx, bz, ux, uz);
        // One pass of iterative refinement on the unreduced KKT system.
        VectorXd ex = bx - G_->transpose() * uz;
        VectorXd wz = uz;
        W_->apply(*lay_, wz);
        W_->apply(*lay_, wz);
        VectorXd ez = bz - (*G_) * ux + wz;
        const double err = std::max(ex.lpNorm<Eigen::Infinity>(), ez.lpNorm<Eigen::Infinity>());
        const double tol = 1e-13 * (1.0 + std::max(bx.lpNorm<Eigen::Infinity>(),
                                                   bz.lpNorm<Eigen::Infinity>()));
        if (err > tol) {
            VectorXd cx, cz;
            solve_once(ex, ez, cx, cz);
            ux += cx;
            uz += cz;
        }
    }

private:
    void solve_once(const VectorXd& bx, const VectorXd& bz, VectorXd& ux, VectorXd& uz) const {
        VectorXd t1 = bz;
        W_->apply_inv(*lay_, t1);
        ux = llt_.solve(bx + Gs_.transpose() * t1);
        uz = Gs_ * ux - t1;
        W_->apply_inv(*lay_, uz);
    }

    const ConeLayout* lay_ = nullptr;
    const MatrixXd* G_ = nullptr;
    const Scaling* W_ = nullptr;
    MatrixXd Gs_;  // W^{-1} G
    Eigen::LLT<MatrixXd> llt_;
};

struct Iterate {
    VectorXd x, s, z;
    double tau = 1.0;
    double kappa = 1.0;
};

}  // namespace

ConeSolution solve_cone_program(const ConeProgram& prog, const ConeSettings& settings) {
    const ConeLayout lay(prog);
    const Index n = prog.G.cols();
    const Index m = prog.G.rows();

    ConeSolution sol;
    sol.x = VectorXd::Zero(n);
    sol.s = VectorXd::Zero(m);
    sol.z = VectorXd::Zero(m);

    if (m != prog.h.size() || n != prog.c.size() || m != lay.rows) {
        return sol;  // malformed problem: NumericalFailure
    }

    const double resx0 = std::max(1.0, prog.c.norm());
    const double resz0 = std::max(1.0, prog.h.norm());

    // Initial point: least-squares primal/dual candidates pushed into the cone.
    Iterate it;
    {
        MatrixXd M = MatrixXd::Zero(n, n);
        M.selfadjointView<Eigen::Lower>().rankUpdate(prog.G.transpose());
        M.diagonal().array() += 1e-12 * (1.0 + M.trace() / static_cast<double>(n));
        Eigen::LLT<MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) {
            return sol;
        }
        it.x = llt.solve(prog.G.transpose() * prog.h);
        it.s = bring_to_cone(lay, prog.h - prog.G * it.x);
        it.z = bring_to_cone(lay, -prog.G * llt.solve(prog.c));
    }

    Scaling W;
    KktSolver kkt;
    VectorXd wx, wz;       // direction for the constant rhs (-c, h)
    VectorXd lambda(m), lsq(m), ds_target(m), div(m), vbar(m);
    VectorXd ux, uz, dx(n), dz(m), ds(m);
    VectorXd w_dz_aff(m), ds_aff_by_w(m);

    double best_score = std::numeric_limits<double>::infinity();
    Iterate best = it;

    sol.status = ConeStatus::IterationLimit;
    int iter = 0;
    for (;; ++iter) {
        // Residuals of the homogeneous embedding.
        VectorXd res1 = prog.G.transpose() * it.z + it.tau * prog.c;
        VectorXd res2 = prog.G * it.x + it.s - it.tau * prog.h;
        const double cx = prog.c.dot(it.x);
        const double hz = prog.h.dot(it.z);
        const double res3 = cx + hz + it.kappa;
        const double gap = it.s.dot(it.z);
        const double mu = (gap + it.tau * it.kappa) / static_cast<double>(lay.degree + 1);

        const double nx = it.x.norm();
        const double ns = it.s.norm();
        const double nz = it.z.norm();
        const double pres = res2.norm() / std::max(resz0 + nx + ns, 1.0) / it.tau;
        const double dres = res1.norm() / std::max(resx0 + nz, 1.0) / it.tau;
        const double pcost = cx / it.tau;
        const double dcost = -hz / it.tau;

        sol.pres = pres;
        sol.dres = dres;
        sol.gap = gap / (it.tau * it.tau);
        sol.iterations = iter;

        if (std::getenv("PAPRTR_SOLVER_TRACE") != nullptr) {
            std::fprintf(stderr,
                         "it=%3d pcost=%+.6e dcost=%+.6e gap=%.2e pres=%.2e dres=%.2e "
                         "tau=%.2e kap=%.2e mu=%.2e\n",
                         iter, pcost, dcost, gap, pres, dres, it.tau, it.kappa, mu);
        }

        if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(mu)) {
            sol.status = ConeStatus::NumericalFailure;
            it = best;
            break;
        }

        double relgap = std::numeric_limits<double>::infinity();
        if (pcost < 0.0) {
            relgap = gap / (it.tau * it.tau) / (-pcost);
        } else if (dcost > 0.0) {
            relgap = gap / (it.tau * it.tau) / dcost;
        }

        const bool optimal =
            (-cx > 0.0 || -hz >= -settings.abstol) && pres < settings.feastol &&
            dres < settings.feastol &&
            (gap / (it.tau * it.tau) < settings.abstol || relgap < settings.reltol);
        if (optimal) {
            sol.status = ConeStatus::Optimal;
            break;
        }

        if (hz / std::max(nz, 1.0) < -settings.reltol && it.tau < it.kappa) {
            const double pinfres = (prog.G.transpose() * it.z).norm() / std::max(nz, 1.0);
            if (pinfres < settings.feastol) {
                sol.status = ConeStatus::PrimalInfeasible;
                break;
            }
        }
        if (cx / std::max(nx, 1.0) < -settings.reltol && it.tau < it.kappa) {
            const double dinfres =
                (prog.G * it.x + it.s).norm() / std::max(nx + ns, 1.0);
            if (dinfres < settings.feastol) {
                sol.status = ConeStatus::DualInfeasible;
                break;
            }
        }

        if (iter >= settings.max_iters) {
            sol.status = ConeStatus::IterationLimit;
            break;
        }

        // Keep the most balanced iterate seen so far as a fallback.
        const double score = pres + dres + mu;
        if (score < best_score) {
            best_score = score;
            best = it;
        }

        if (!W.update(lay, it.s, it.z)) {
            sol.status = ConeStatus::NumericalFailure;
            it = best;
            break;
        }
        if (!kkt.factorize(lay, prog.G, W)) {
            sol.status = ConeStatus::NumericalFailure;
            it = best;
            break;
        }

        lambda = it.z;
        W.apply(lay, lambda);

        kkt.solve(-prog.c, prog.h, wx, wz);
        const double denom = it.kappa - it.tau * (prog.c.dot(wx) + prog.h.dot(wz));

        // --- Affine (predictor) direction: sigma = 0 ---
        cone_product(lay, lambda, lambda, lsq);
        cone_divide(lay, lambda, lsq, div);
        vbar = div;
        W.apply(lay, vbar);  // equals s up to roundoff

        kkt.solve(-res1, -res2 + vbar, ux, uz);
        const double dk_aff = it.tau * it.kappa;
        const double dtau_aff =
            (-dk_aff + it.tau * (res3 + prog.c.dot(ux) + prog.h.dot(uz))) / denom;
        dx = ux + dtau_aff * wx;
        dz = uz + dtau_aff * wz;
        w_dz_aff = dz;
        W.apply(lay, w_dz_aff);
        ds_aff_by_w = -w_dz_aff - lambda;  // W^{-1} ds_aff
        ds = ds_aff_by_w;
        W.apply(lay, ds);
        const double dkappa_aff = (-dk_aff - it.kappa * dtau_aff) / it.tau;

        double alpha_aff = std::min(max_step(lay, it.s, ds), max_step(lay, it.z, dz));
        if (dtau_aff < 0.0) {
            alpha_aff = std::min(alpha_aff, -it.tau / dtau_aff);
        }
        if (dkappa_aff < 0.0) {
            alpha_aff = std::min(alpha_aff, -it.kappa / dkappa_aff);
        }
        alpha_aff = std::min(alpha_aff, 1.0);

        const double sigma =
            std::clamp((1.0 - alpha_aff) * (1.0 - alpha_aff) * (1.0 - alpha_aff),
                       kSigmaMin, kSigmaMax);

        // --- Combined (corrector) direction ---
        cone_product(lay, ds_aff_by_w, w_dz_aff, ds_target);
        ds_target += lsq;
        ds_target.head(lay.n_nonneg).array() -= sigma * mu;
        for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
            ds_target(lay.soc_starts[k]) -= sigma * mu;
        }
        cone_divide(lay, lambda, ds_target, div);
        vbar = div;
        W.apply(lay, vbar);

        const double one_minus_sigma = 1.0 - sigma;
        kkt.solve(-one_minus_sigma * res1, -one_minus_sigma * res2 + vbar, ux, uz);
        const double dk = it.tau * it.kappa + dtau_aff * dkappa_aff - sigma * mu;
        const double dtau =
            (-dk + it.tau * (one_minus_sigma * res3 + prog.c.dot(ux) + prog.h.dot(uz))) / denom;
        dx = ux + dtau * wx;
        dz = uz + dtau * wz;
        ds = dz;
        W.apply(lay, ds);
        ds += div;
        W.apply(lay, ds);
        ds = -ds;  // ds = -W (lambda \ d_s) - W^2 dz
        const double dkappa = (-dk - it.kappa * dtau) / it.tau;

        double alpha = std::min(max_step(lay, it.s, ds), max_step(lay, it.z, dz));
        if (dtau < 0.0) {
            alpha = std::min(alpha, -it.tau / dtau);
        }
        if (dkappa < 0.0) {
            alpha = std::min(alpha, -it.kappa / dkappa);
        }
        alpha = std::min(kStepBack * alpha, 1.0);

        if (!std::isfinite(alpha) || alpha < kMinStep) {
            sol.status = ConeStatus::NumericalFailure;
            it = best;
            break;
        }

        it.x += alpha * dx;
        it.s += alpha * ds;
        it.z += alpha * dz;
        it.tau += alpha * dtau;
        it.kappa += alpha * dkappa;
    }

    // Scale back out of the homogeneous embedding.
    switch (sol.status) {
        case ConeStatus::Optimal:
        case ConeStatus::IterationLimit:
            sol.x = it.x / it.tau;
            sol.s = it.s / it.tau;
            sol.z = it.z / it.tau;
            break;
        case ConeStatus::PrimalInfeasible: {
            const double scale = -prog.h.dot(it.z);
            sol.x = it.x;
            sol.s = it.s;
            sol.z = scale > 0.0 ? VectorXd(it.z / scale) : it.z;
            break;
        }
        case ConeStatus::DualInfeasible: {
            const double scale = -prog.c.dot(it.x);
            sol.x = scale > 0.0 ? VectorXd(it.x / scale) : it.x;
            sol.s = it.s;
            sol.z = it.z;
            break;
        }
        case ConeStatus::NumericalFailure:
            sol.x = it.x / std::max(it.tau, 1e-300);
            sol.s = it.s / std::max(it.tau, 1e-300);
            sol.z = it.z / std::max(it.tau, 1e-300);
            break;
    }
    sol.primal_objective = prog.c.dot(sol.x);
    return sol;
}

}  // namespace paprtr
