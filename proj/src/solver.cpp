#include "handsoff/solver.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace handsoff {

Regularizer Regularizer::l1(double h) {
    if (h <= 0.0) throw std::invalid_argument("Regularizer: step length must be positive");
    return Regularizer{RegularizerKind::kL1, 0.0, h, h, 0.0};
}

Regularizer Regularizer::elastic_net(double lambda, double h) {
    if (h <= 0.0) throw std::invalid_argument("Regularizer: step length must be positive");
    if (lambda < 0.0) throw std::invalid_argument("Regularizer: lambda must be nonnegative");
    return Regularizer{RegularizerKind::kElasticNet, lambda, h, h, lambda * h};
}

Regularizer Regularizer::clot(double lambda, double h) {
    if (h <= 0.0) throw std::invalid_argument("Regularizer: step length must be positive");
    if (lambda < 0.0) throw std::invalid_argument("Regularizer: lambda must be nonnegative");
    return Regularizer{RegularizerKind::kClot, lambda, h, h, lambda * std::sqrt(h)};
}

double Regularizer::evaluate(const Eigen::VectorXd& u) const {
    const double l1 = u.lpNorm<1>();
    switch (kind) {
        case RegularizerKind::kL1:
            return w1 * l1;
        case RegularizerKind::kElasticNet:
            return w1 * l1 + w2 * u.squaredNorm();
        case RegularizerKind::kClot:
            return w1 * l1 + w2 * u.norm();
    }
    return 0.0;
}

Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double kappa) {
    if (kappa < 0.0) throw std::invalid_argument("prox_l1: kappa must be nonnegative");
    return v.array().sign() * (v.array().abs() - kappa).max(0.0);
}

Eigen::VectorXd prox_en(const Eigen::VectorXd& v, double kappa1, double kappa2) {
    if (kappa2 < 0.0) throw std::invalid_argument("prox_en: kappa2 must be nonnegative");
    return prox_l1(v, kappa1) / (1.0 + 2.0 * kappa2);
}

Eigen::VectorXd prox_clot(const Eigen::VectorXd& v, double kappa1, double kappa2) {
    if (kappa2 < 0.0) throw std::invalid_argument("prox_clot: kappa2 must be nonnegative");
    Eigen::VectorXd s = prox_l1(v, kappa1);
    const double ns = s.norm();
    if (ns <= kappa2) return Eigen::VectorXd::Zero(v.size());
    return (1.0 - kappa2 / ns) * s;
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v, double bound) {
    if (bound < 0.0) throw std::invalid_argument("project_box: bound must be nonnegative");
    return v.array().min(bound).max(-bound);
}

AffineProjector::AffineProjector(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& b)
    : phi_(Phi), b_(b) {
    if (Phi.rows() != b.size()) {
        throw std::invalid_argument("AffineProjector: dimension mismatch between Phi and b");
    }
    if (Phi.cols() < Phi.rows()) {
        throw std::runtime_error(
            "AffineProjector: fewer samples than states, Phi cannot have full row rank");
    }
    // QR of Phi^T gives Phi Phi^T = R^T R without forming the Gramian
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Phi.transpose());
    r_ = qr.matrixQR()
             .topRows(Phi.rows())
             .triangularView<Eigen::Upper>();
    const Eigen::VectorXd d = r_.diagonal().cwiseAbs();
    const double dmax = d.maxCoeff();
    if (dmax == 0.0 || d.minCoeff() <= Phi.rows() * std::numeric_limits<double>::epsilon() * dmax) {
        throw std::runtime_error(
            "AffineProjector: Phi is rank deficient (structurally infeasible or "
            "uncontrollable discretization)");
    }
}

Eigen::VectorXd AffineProjector::solve_normal(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd w = r_.transpose().triangularView<Eigen::Lower>().solve(rhs);
    return r_.triangularView<Eigen::Upper>().solve(w);
}

Eigen::VectorXd AffineProjector::project(const Eigen::VectorXd& v) const {
    const Eigen::VectorXd resid = phi_ * v - b_;
    return v - phi_.transpose() * solve_normal(resid);
}

namespace {

struct ProblemView {
    const Eigen::MatrixXd& Phi;
    const Eigen::VectorXd& b;
    double u_max;
};

// Snap near-zero / near-bound samples exactly and shift the remaining free
// samples by the least-norm correction that restores Phi u = b.  Returns
// nothing when the free set is too small, ill-posed, or the correction
// would leave the box.
std::optional<Eigen::VectorXd> polish(const ProblemView& p, const Eigen::VectorXd& u) {
    const int n = static_cast<int>(p.Phi.rows());
    const int N = static_cast<int>(u.size());
    const double band = 1e-7 * p.u_max;

    Eigen::VectorXd snapped = u;
    std::vector<int> free_idx;
    free_idx.reserve(N);
    for (int i = 0; i < N; ++i) {
        const double a = std::abs(u(i));
        if (a <= band) {
            snapped(i) = 0.0;
        } else if (a >= p.u_max - band) {
            snapped(i) = u(i) > 0 ? p.u_max : -p.u_max;
        } else {
            free_idx.push_back(i);
        }
    }
    const int nf = static_cast<int>(free_idx.size());
    if (nf < n) return std::nullopt;

    Eigen::MatrixXd F(n, nf);
    for (int k = 0; k < nf; ++k) F.col(k) = p.Phi.col(free_idx[k]);
    const Eigen::VectorXd resid = p.b - p.Phi * snapped;
    Eigen::LLT<Eigen::MatrixXd> llt(F * F.transpose());
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd delta = F.transpose() * llt.solve(resid);
    if (delta.lpNorm<Eigen::Infinity>() > 0.05 * p.u_max) return std::nullopt;

    for (int k = 0; k < nf; ++k) {
        const double val = snapped(free_idx[k]) + delta(k);
        if (std::abs(val) > p.u_max) return std::nullopt;
        snapped(free_idx[k]) = val;
    }
    return snapped;
}

// Lower bound on the optimum from a dual point nu of the terminal equality.
// q(nu) = -nu^T b - sum_i sigma(c_i), c = -Phi^T nu, with sigma the
// conjugate of w1|z| + w2 z^2 over |z| <= u_max.  Valid for any nu, so a
// small gap against a feasible iterate certifies optimality.
double dual_bound(const ProblemView& p, const AffineProjector& aff, const Regularizer& reg,
                  const Eigen::VectorXd& y_affine, double rho) {
    const Eigen::VectorXd img = -rho * y_affine;
    const Eigen::VectorXd nu = aff.solve_normal(p.Phi * img);
    const Eigen::VectorXd c = -(p.Phi.transpose() * nu);
    double conj_sum = 0.0;
    for (int i = 0; i < c.size(); ++i) {
        const double a = std::max(std::abs(c(i)) - reg.w1, 0.0);
        if (a <= 0.0) continue;
        if (reg.w2 == 0.0) {
            conj_sum += p.u_max * a;
        } else {
            const double z = std::min(a / (2.0 * reg.w2), p.u_max);
            conj_sum += a * z - reg.w2 * z * z;
        }
    }
    return -nu.dot(p.b) - conj_sum;
}

struct FeasibilityCheck {
    bool proven_infeasible = false;
    bool found_feasible = false;
    double margin = 0.0;
    Eigen::VectorXd point;
};

// Box-constrained least squares min ||Phi u - b|| over |u| <= u_max by
// accelerated projected gradient; an exact Farkas separator is evaluated at
// the final iterate: nu^T b - u_max ||Phi^T nu||_1 > 0 proves emptiness.
FeasibilityCheck certify_infeasibility(const ProblemView& p, double feas_tol, int max_iter) {
    const int N = static_cast<int>(p.Phi.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Phi * p.Phi.transpose());
    const double L = std::max(es.eigenvalues().maxCoeff(), 1e-300);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd x_prev = x;
    double t = 1.0;
    FeasibilityCheck out;
    for (int k = 0; k < max_iter; ++k) {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        Eigen::VectorXd z = x + ((t - 1.0) / t_next) * (x - x_prev);
        const Eigen::VectorXd grad = p.Phi.transpose() * (p.Phi * z - p.b);
        Eigen::VectorXd x_next = project_box(z - grad / L, p.u_max);
        // restart the momentum when it points uphill
        if ((z - x_next).dot(x_next - x) > 0.0) {
            t = 1.0;
            x_prev = x;
            x = project_box(x - (p.Phi.transpose() * (p.Phi * x - p.b)) / L, p.u_max);
        } else {
            x_prev = x;
            x = x_next;
            t = t_next;
        }
        if (k % 100 == 0 && (p.Phi * x - p.b).norm() <= feas_tol) {
            out.found_feasible = true;
            out.point = x;
            return out;
        }
    }
    Eigen::VectorXd resid = p.Phi * x - p.b;
    const double rn = resid.norm();
    if (rn <= feas_tol) {
        out.found_feasible = true;
        out.point = x;
        return out;
    }
    const Eigen::VectorXd nu = -resid / rn;
    out.margin = nu.dot(p.b) - p.u_max * (p.Phi.transpose() * nu).lpNorm<1>();
    out.proven_infeasible = out.margin > std::max(10.0 * feas_tol, 0.0);
    return out;
}

}  // namespace

Solution solve(const DiscreteProblem& problem, const Regularizer& reg, const SolverOptions& opts) {
    const int N = problem.N;
    if (problem.Phi.cols() != N || problem.b.size() != problem.Phi.rows()) {
        throw std::invalid_argument("solve: inconsistent problem dimensions");
    }
    if (problem.u_max <= 0.0) throw std::invalid_argument("solve: u_max must be positive");
    if (opts.max_iter < 1 || opts.check_interval < 1) {
        throw std::invalid_argument("solve: iteration limits must be positive");
    }
    if (opts.eps_abs <= 0.0 || opts.eps_feas <= 0.0) {
        throw std::invalid_argument("solve: tolerances must be positive");
    }
    if (opts.over_relaxation < 1.0 || opts.over_relaxation > 1.8) {
        throw std::invalid_argument("solve: over_relaxation must lie in [1, 1.8]");
    }

    const double U = problem.u_max;
    const double rho = opts.rho > 0.0 ? opts.rho : reg.w1 / U;
    const double k1 = reg.w1 / rho;
    const double k2 = reg.w2 / rho;
    const double alpha = opts.over_relaxation;
    const bool fused = reg.kind != RegularizerKind::kClot;
    const int copies = fused ? 2 : 3;

    AffineProjector aff(problem.Phi, problem.b);
    const ProblemView view{problem.Phi, problem.b, U};
    const double b_norm = problem.b.norm();
    const double feas_tol = std::min(opts.eps_feas * (1.0 + b_norm), opts.eps_feas_abs);
    const double res_tol = opts.eps_abs * std::sqrt(static_cast<double>(N));

    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    if (opts.warm_start && opts.initial_u.size() == N) u = opts.initial_u;
    std::vector<Eigen::VectorXd> y(copies, Eigen::VectorXd::Zero(N));
    std::vector<Eigen::VectorXd> x(copies, Eigen::VectorXd::Zero(N));

    Solution sol;
    sol.u = u;
    Eigen::VectorXd candidate = u;
    bool candidate_polished = false;

    // stall bookkeeping for the infeasibility heuristic
    double best_feas = std::numeric_limits<double>::infinity();
    double window_anchor = std::numeric_limits<double>::infinity();
    int window_len = 200;
    int checks_since_anchor = 0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        if (fused) {
            Eigen::VectorXd s = prox_l1(u - y[0], k1);
            if (reg.kind == RegularizerKind::kElasticNet) s /= (1.0 + 2.0 * k2);
            x[0] = project_box(s, U);
            x[1] = aff.project(u - y[1]);
        } else {
            x[0] = prox_clot(u - y[0], k1, k2);
            x[1] = project_box(u - y[1], U);
            x[2] = aff.project(u - y[2]);
        }
        if (alpha != 1.0) {
            for (auto& xi : x) xi = alpha * xi + (1.0 - alpha) * u;
        }
        Eigen::VectorXd u_next = y[0] + x[0];
        for (int i = 1; i < copies; ++i) u_next += y[i] + x[i];
        u_next /= copies;
        for (int i = 0; i < copies; ++i) y[i] += x[i] - u_next;

        if (it % opts.check_interval == 0 || it == opts.max_iter) {
            double primal_sq = 0.0;
            for (const auto& xi : x) primal_sq += (xi - u_next).squaredNorm();
            const double primal = std::sqrt(primal_sq);
            const double dual = rho * std::sqrt(static_cast<double>(copies)) * (u_next - u).norm();

            const Eigen::VectorXd& box_copy = fused ? x[0] : x[1];
            auto polished = polish(view, box_copy);
            if (polished) {
                candidate = *polished;
                candidate_polished = true;
            } else {
                candidate = project_box(aff.project(box_copy), U);
                candidate_polished = false;
            }
            const double feas = (problem.Phi * candidate - problem.b).norm();
            sol.residual_history.push_back(feas);
            sol.iterations = it;
            sol.primal_residual = primal;
            sol.dual_residual = dual;
            sol.terminal_residual = feas;
            sol.polished = candidate_polished;

            if (feas <= feas_tol) {
                if (std::max(primal, dual) <= res_tol) {
                    sol.converged = true;
                    sol.status = SolveStatus::kConverged;
                    break;
                }
                if (fused && candidate_polished) {
                    const double q = dual_bound(view, aff, reg, y[1], rho);
                    const double f = reg.evaluate(candidate);
                    sol.duality_gap = f - q;
                    if (sol.duality_gap <= opts.gap_tol * (1.0 + std::abs(f))) {
                        sol.converged = true;
                        sol.status = SolveStatus::kConverged;
                        break;
                    }
                }
            }

            // far from feasible and no longer improving: look for a Farkas
            // certificate before burning the rest of the budget
            best_feas = std::min(best_feas, feas);
            ++checks_since_anchor;
            if (checks_since_anchor >= window_len) {
                const bool stalled = !(best_feas < 0.999 * window_anchor);
                window_anchor = best_feas;
                checks_since_anchor = 0;
                if (stalled && best_feas > 1e3 * feas_tol) {
                    const auto cert = certify_infeasibility(view, feas_tol, 50000);
                    if (cert.proven_infeasible) {
                        sol.status = SolveStatus::kInfeasible;
                        sol.converged = false;
                        sol.infeasibility_margin = cert.margin;
                        break;
                    }
                    window_len *= 2;  // inconclusive; back off before retrying
                }
            }
        }
        u.swap(u_next);
    }

    sol.u = candidate;
    sol.objective = reg.evaluate(candidate);
    if (sol.status != SolveStatus::kInfeasible && !sol.converged) {
        sol.status = SolveStatus::kMaxIterations;
    }
    return sol;
}

}  // namespace handsoff
