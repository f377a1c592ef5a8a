#include "handsoff/discretize.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace handsoff {

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("matrix_exponential: input must be square");
    }
    return M.exp();
}

DiscreteSystem zoh_discretize(const StateSpace& ss, double h, int steps) {
    if (h <= 0.0) {
        throw std::invalid_argument("zoh_discretize: step length must be positive");
    }
    const int n = ss.n();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = ss.A * h;
    aug.topRightCorner(n, 1) = ss.B * h;
    const Eigen::MatrixXd E = matrix_exponential(aug);

    DiscreteSystem ds;
    ds.A_d = E.topLeftCorner(n, n);
    ds.B_d = E.topRightCorner(n, 1);
    ds.h = h;
    ds.N = steps;
    return ds;
}

DiscreteProblem build_problem(const InitialValueProblem& ivp, int N) {
    if (N < 1) {
        throw std::invalid_argument("build_problem: need at least one step");
    }
    if (ivp.T <= 0.0 || ivp.u_max <= 0.0) {
        throw std::invalid_argument("build_problem: horizon and control bound must be positive");
    }
    if (ivp.xi.size() != ivp.ss.n()) {
        throw std::invalid_argument("build_problem: initial state dimension mismatch");
    }
    const double h = ivp.T / N;
    const DiscreteSystem ds = zoh_discretize(ivp.ss, h, N);
    const int n = ivp.ss.n();

    DiscreteProblem p;
    p.Phi.resize(n, N);
    Eigen::VectorXd col = ds.B_d;
    for (int m = N - 1; m >= 0; --m) {
        p.Phi.col(m) = col;
        col = ds.A_d * col;
    }

    // A_d^N by repeated squaring
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd base = ds.A_d;
    for (int k = N; k > 0; k >>= 1) {
        if (k & 1) power = power * base;
        if (k > 1) base = base * base;
    }
    p.b = -(power * ivp.xi);
    p.h = h;
    p.N = N;
    p.u_max = ivp.u_max;
    return p;
}

Eigen::VectorXd row_norms(const DiscreteProblem& problem) {
    return problem.Phi.rowwise().norm();
}

}  // namespace handsoff
