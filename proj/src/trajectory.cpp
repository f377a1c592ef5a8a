#include "handsoff/trajectory.hpp"

#include <stdexcept>

namespace handsoff {

Trajectory simulate(const DiscreteSystem& ds, const Eigen::VectorXd& xi,
                    const Eigen::VectorXd& u) {
    const int n = static_cast<int>(ds.A_d.rows());
    if (xi.size() != n) {
        throw std::invalid_argument("simulate: initial state dimension mismatch");
    }
    if (u.size() != ds.N) {
        throw std::invalid_argument("simulate: control length does not match step count");
    }
    const int N = ds.N;

    Trajectory traj;
    traj.times.resize(N + 1);
    traj.states.resize(N + 1, n);
    traj.control = u;

    Eigen::VectorXd x = xi;
    traj.states.row(0) = x.transpose();
    traj.times(0) = 0.0;
    for (int m = 0; m < N; ++m) {
        x = ds.A_d * x + ds.B_d * u(m);
        traj.states.row(m + 1) = x.transpose();
        traj.times(m + 1) = (m + 1) * ds.h;
    }
    traj.terminal_residual = x.norm();
    return traj;
}

Eigen::VectorXd state_norms(const Trajectory& traj) {
    return traj.states.rowwise().norm();
}

}  // namespace handsoff
