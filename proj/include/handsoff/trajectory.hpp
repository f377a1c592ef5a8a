#pragma once

#include <Eigen/Dense>

#include "handsoff/discretize.hpp"

namespace handsoff {

/// State history of the discrete recursion x[m+1] = A_d x[m] + B_d u[m]
/// with states[0] = xi and times[m] = m*h.
struct Trajectory {
    Eigen::VectorXd times;    // N+1
    Eigen::MatrixXd states;   // (N+1) x n
    Eigen::VectorXd control;  // N
    double terminal_residual = 0.0;  // ||x[N]||
};

/// Exact forward recursion on the solver grid.  Throws when the control
/// length does not match ds.N or xi does not match the state dimension.
Trajectory simulate(const DiscreteSystem& ds, const Eigen::VectorXd& xi,
                    const Eigen::VectorXd& u);

/// Euclidean norm of the state at every sample, the quantity plotted in the
/// benchmark studies.  Not monotone for oscillatory plants.
Eigen::VectorXd state_norms(const Trajectory& traj);

}  // namespace handsoff
