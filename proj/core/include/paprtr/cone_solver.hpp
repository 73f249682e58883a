#ifndef PAPRTR_CONE_SOLVER_HPP
#define PAPRTR_CONE_SOLVER_HPP

/**
 * @file cone_solver.hpp
 * @brief Dense second-order cone programming via a homogeneous self-dual
 *        primal-dual interior-point method.
 *
 * Solves problems in the standard conic form
 *
 *     minimize    c' x
 *     subject to  G x + s = h,   s in K,
 *
 * where K is a product of a nonnegative orthant (first `n_nonneg` rows of G)
 * followed by second-order cones { (u0, u1) : ||u1||_2 <= u0 } of the listed
 * dimensions.
 *
 * The method is the usual one for this problem class: Nesterov-Todd scaling,
 * Mehrotra predictor-corrector steps, and the homogeneous embedding in
 * (x, s, z, tau, kappa) so that primal/dual infeasibility is certified rather
 * than guessed. The KKT system is reduced to normal equations
 * G' W^-2 G dx = rhs and factorized densely, which is the right trade-off for
 * the small dense problems this library generates (tens of variables, a few
 * hundred cone rows). One step of iterative refinement is applied to every
 * KKT solve.
 *
 * The solver is a pure function of its inputs: no global state, deterministic
 * iteration sequence, safe to call from many threads on independent problems.
 */

#include <Eigen/Dense>

#include <vector>

namespace paprtr {

struct ConeProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    Eigen::Index n_nonneg = 0;
    std::vector<Eigen::Index> soc_dims;
};

enum class ConeStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
    NumericalFailure,
};

struct ConeSettings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    int max_iters = 200;
};

struct ConeSolution {
    ConeStatus status = ConeStatus::NumericalFailure;
    Eigen::VectorXd x;  ///< primal point (certificate of unboundedness if DualInfeasible)
    Eigen::VectorXd s;
    Eigen::VectorXd z;  ///< dual point (Farkas certificate if PrimalInfeasible)
    double primal_objective = 0.0;
    double pres = 0.0;  ///< normalized primal residual at exit
    double dres = 0.0;  ///< normalized dual residual at exit
    double gap = 0.0;   ///< absolute duality gap s'z at exit
    int iterations = 0;
};

ConeSolution solve_cone_program(const ConeProgram& prog, const ConeSettings& settings = {});

}  // namespace paprtr

#endif  // PAPRTR_CONE_SOLVER_HPP
