#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "handsoff/discretize.hpp"

namespace handsoff {

enum class RegularizerKind { kL1, kElasticNet, kClot };

/// Discrete cost functional: w1*||u||_1 plus either w2*||u||_2^2 (elastic
/// net) or w2*||u||_2 (CLOT).  The weights carry the grid scalings of the
/// underlying continuous norms: w1 = h, and w2 = lambda*h for the squared
/// norm, lambda*sqrt(h) for the plain norm.
struct Regularizer {
    RegularizerKind kind = RegularizerKind::kL1;
    double lambda = 0.0;
    double h = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;

    static Regularizer l1(double h);
    static Regularizer elastic_net(double lambda, double h);
    static Regularizer clot(double lambda, double h);

    double evaluate(const Eigen::VectorXd& u) const;
};

struct SolverOptions {
    double rho = 0.0;  // penalty; <= 0 selects w1 / u_max
    int max_iter = 200000;
    double eps_abs = 1e-8;   // consensus residual tolerance, scaled by sqrt(N)
    double eps_feas = 1e-9;  // terminal residual tolerance, relative to 1 + ||b||
    double eps_feas_abs = std::numeric_limits<double>::infinity();  // absolute cap
    double over_relaxation = 1.0;  // in [1, 1.8]
    double gap_tol = 1e-7;   // relative duality gap for the certified early exit
    int check_interval = 25;
    bool warm_start = false;
    Eigen::VectorXd initial_u;  // used when warm_start is set and sizes match
};

enum class SolveStatus { kConverged, kMaxIterations, kInfeasible };

struct Solution {
    Eigen::VectorXd u;
    double objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double terminal_residual = 0.0;
    bool converged = false;
    SolveStatus status = SolveStatus::kMaxIterations;
    bool polished = false;
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    double infeasibility_margin = 0.0;     // Farkas margin when status is kInfeasible
    std::vector<double> residual_history;  // terminal residual at each check
};

/// Soft threshold: componentwise sign(v)*max(|v| - kappa, 0).  Values at
/// the kink |v| = kappa map to zero.
Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double kappa);

/// Exact prox of kappa1*||.||_1 + kappa2*||.||_2^2 (separable).
Eigen::VectorXd prox_en(const Eigen::VectorXd& v, double kappa1, double kappa2);

/// Exact prox of kappa1*||.||_1 + kappa2*||.||_2: soft threshold followed
/// by the Euclidean block shrink (1 - kappa2/||s||)_+ s, 0 when s = 0.
Eigen::VectorXd prox_clot(const Eigen::VectorXd& v, double kappa1, double kappa2);

/// Componentwise clamp to [-bound, bound].
Eigen::VectorXd project_box(const Eigen::VectorXd& v, double bound);

/// Exact Euclidean projection onto { z : Phi z = b }, with the
/// factorization of Phi Phi^T cached from a QR of Phi^T.  A rank-deficient
/// Phi (structurally infeasible / uncontrollable problem) is rejected at
/// construction.
class AffineProjector {
  public:
    AffineProjector(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& b);

    Eigen::VectorXd project(const Eigen::VectorXd& v) const;

    /// Solves (Phi Phi^T) x = rhs with the cached factor.
    Eigen::VectorXd solve_normal(const Eigen::VectorXd& rhs) const;

  private:
    Eigen::MatrixXd phi_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd r_;  // Phi Phi^T = R^T R
};

/// Minimizes the regularized cost over { Phi u = b, |u|_inf <= u_max } by
/// consensus operator splitting with closed-form proximal maps.  L1 and
/// elastic-net runs fuse the box into the regularizer prox (their joint
/// prox is exact) and use two consensus copies; CLOT keeps three.  The
/// reported control is box-feasible exactly: the box copy is polished onto
/// the affine set through its free samples when possible, otherwise
/// affine-corrected once and re-clamped.
Solution solve(const DiscreteProblem& problem, const Regularizer& reg,
               const SolverOptions& opts = {});

}  // namespace handsoff
