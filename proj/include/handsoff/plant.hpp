#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace handsoff {

/// SISO transfer function given by its poles, zeros and a real gain.
/// Complex roots must appear in conjugate pairs and the plant must be
/// strictly proper (fewer zeros than poles).
struct PlantSpec {
    std::vector<std::complex<double>> poles;
    std::vector<std::complex<double>> zeros;
    double gain = 1.0;
};

/// State-space realization (A, B) of a single-input plant.  The output map
/// is irrelevant here: the control problems below constrain the state only.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;

    int n() const { return static_cast<int>(A.rows()); }
};

/// Drive x from xi to the origin within horizon T under |u| <= u_max.
struct InitialValueProblem {
    StateSpace ss;
    Eigen::VectorXd xi;
    double T = 0.0;
    double u_max = 1.0;
};

/// Expands prod(s - r_i) into monic real coefficients, descending powers.
/// Conjugate pairs are multiplied as real quadratics so no imaginary
/// round-off is introduced.  Throws std::invalid_argument naming the
/// offending root when the input is not closed under conjugation.
std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots);

/// Companion-form realization of the plant denominator, equilibrated for
/// numerical range:
///   - A is the first-row companion matrix of the monic denominator under
///     the diagonal similarity T = diag(t^(1-k)), t a power of two chosen
///     from the magnitude of the constant coefficient (t = 1 when the plant
///     has poles at the origin);
///   - B carries the numerator gain |gain| * prod(|z_i|) on its first entry.
/// Plants whose zeros agree in magnitude product realize identically, so
/// zeros never change the reachable set beyond that scalar.
StateSpace realize(const PlantSpec& spec);

/// Rank of [B, AB, ..., A^(n-1)B] with singular-value tolerance n*eps*sigma_max.
int controllability_rank(const StateSpace& ss);

/// Controllable and A nonsingular (the normality condition under which the
/// L0- and L1-optimal controls coincide).
bool is_normal(const StateSpace& ss);

}  // namespace handsoff
