#pragma once

#include <Eigen/Dense>

#include "handsoff/plant.hpp"

namespace handsoff {

/// Zero-order-hold discretization of a plant: x[m+1] = A_d x[m] + B_d u[m]
/// on a grid of N steps of length h.
struct DiscreteSystem {
    Eigen::MatrixXd A_d;
    Eigen::VectorXd B_d;
    double h = 0.0;
    int N = 1;
};

/// Finite-dimensional data of the terminal-constraint feasible set
///   { u in R^N : Phi u = b, |u|_inf <= u_max },
/// where Phi's column m is A_d^(N-1-m) B_d and b = -A_d^N xi.
struct DiscreteProblem {
    Eigen::MatrixXd Phi;  // n x N
    Eigen::VectorXd b;    // n
    double h = 0.0;
    int N = 0;
    double u_max = 1.0;
};

/// e^M by scaling-and-squaring.  Throws on a non-square input.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M);

/// (A_d, B_d) = (e^(Ah), int_0^h e^(At) B dt) via the augmented-matrix
/// exponential of [[A, B], [0, 0]] * h, so singular A needs no special case.
DiscreteSystem zoh_discretize(const StateSpace& ss, double h, int steps = 1);

/// Assembles Phi column-by-column (backward recursion from B_d) and
/// b = -A_d^N xi.  N >= n is required for the equality constraint to be
/// satisfiable; infeasibility itself is detected by the solver.
DiscreteProblem build_problem(const InitialValueProblem& ivp, int N);

/// Row norms of Phi, a cheap conditioning diagnostic for the terminal map.
Eigen::VectorXd row_norms(const DiscreteProblem& problem);

}  // namespace handsoff
