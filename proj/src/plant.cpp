#include "handsoff/plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace handsoff {

namespace {

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

}  // namespace

std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<double> coeffs{1.0};
    std::vector<bool> used(roots.size(), false);

    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const auto r = roots[i];
        const double pair_tol = 1e-9 * std::max(1.0, std::abs(r));
        if (std::abs(r.imag()) <= pair_tol) {
            coeffs = convolve(coeffs, {1.0, -r.real()});
            continue;
        }
        // complex root: find its unused conjugate partner
        bool paired = false;
        for (size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(roots[j] - std::conj(r)) <= pair_tol) {
                used[j] = true;
                paired = true;
                break;
            }
        }
        if (!paired) {
            std::ostringstream msg;
            msg << "poly_from_roots: root (" << r.real() << ", " << r.imag()
                << "j) has no conjugate partner";
            throw std::invalid_argument(msg.str());
        }
        coeffs = convolve(coeffs, {1.0, -2.0 * r.real(), std::norm(r)});
    }
    return coeffs;
}

StateSpace realize(const PlantSpec& spec) {
    if (spec.poles.empty()) {
        throw std::invalid_argument("realize: plant has no poles (empty state space)");
    }
    if (spec.zeros.size() >= spec.poles.size()) {
        throw std::invalid_argument("realize: plant must be strictly proper (zeros < poles)");
    }
    const std::vector<double> den = poly_from_roots(spec.poles);
    poly_from_roots(spec.zeros);  // validates conjugate closure of the zeros
    const int n = static_cast<int>(spec.poles.size());

    if (spec.gain == 0.0) {
        throw std::invalid_argument("realize: plant gain must be nonzero");
    }

    // numerator gain at s=0, pushed onto B; zeros at the origin contribute 1
    double gamma = std::abs(spec.gain);
    for (const auto& z : spec.zeros) {
        const double m = std::abs(z);
        if (m > 1e-12) gamma *= m;
    }

    // equilibration radix from the constant coefficient of the monic denominator
    const double an = std::abs(den.back());
    double t = 1.0;
    if (an > 0.0 && n > 1) {
        t = std::exp2(std::floor(std::log2(std::pow(an, 1.0 / n))));
        if (!(t > 0.0) || !std::isfinite(t)) t = 1.0;
    }

    // companion matrix under the similarity diag(t^(1-k)):
    // entry (i,j) of T^-1 A T equals A(i,j) * t^(i-j)
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        A(0, j) = -den[j + 1] * std::pow(t, -j);
    }
    for (int i = 1; i < n; ++i) {
        A(i, i - 1) = t;
    }
    Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
    B(0) = gamma / t;
    return StateSpace{std::move(A), std::move(B)};
}

int controllability_rank(const StateSpace& ss) {
    const int n = ss.n();
    Eigen::MatrixXd krylov(n, n);
    Eigen::VectorXd col = ss.B;
    for (int k = 0; k < n; ++k) {
        krylov.col(k) = col;
        col = ss.A * col;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(krylov);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double tol = n * std::numeric_limits<double>::epsilon() * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return rank;
}

bool is_normal(const StateSpace& ss) {
    const int n = ss.n();
    if (controllability_rank(ss) != n) return false;
    const double det = ss.A.partialPivLu().determinant();
    const double sigma_max = Eigen::JacobiSVD<Eigen::MatrixXd>(ss.A).singularValues()(0);
    const double tol = 1e-10 * std::pow(std::max(sigma_max, 1e-30), n);
    return std::abs(det) > tol;
}

}  // namespace handsoff
