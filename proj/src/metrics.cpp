#include "handsoff/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace handsoff {

double sparsity_density(const Eigen::VectorXd& u, double threshold) {
    if (u.size() == 0) throw std::invalid_argument("sparsity_density: empty control");
    if (threshold < 0.0) throw std::invalid_argument("sparsity_density: negative threshold");
    const auto count = (u.array().abs() > threshold).count();
    return static_cast<double>(count) / static_cast<double>(u.size());
}

DiscreteNorms discrete_norms(const Eigen::VectorXd& u, double h) {
    if (h <= 0.0) throw std::invalid_argument("discrete_norms: step length must be positive");
    DiscreteNorms out;
    out.l1 = h * u.lpNorm<1>();
    out.l2 = std::sqrt(h) * u.norm();
    out.linf = u.size() ? u.lpNorm<Eigen::Infinity>() : 0.0;
    return out;
}

double max_step(const Eigen::VectorXd& u) {
    double m = 0.0;
    for (Eigen::Index i = 0; i + 1 < u.size(); ++i) {
        m = std::max(m, std::abs(u(i + 1) - u(i)));
    }
    return m;
}

ControlMetrics compute_metrics(const Eigen::VectorXd& u, double h, double threshold) {
    const DiscreteNorms norms = discrete_norms(u, h);
    ControlMetrics m;
    m.sparsity_density = sparsity_density(u, threshold);
    m.l1 = norms.l1;
    m.l2 = norms.l2;
    m.linf = norms.linf;
    m.max_step = max_step(u);
    m.threshold = threshold;
    return m;
}

std::string format_density_table(const std::vector<DensityRow>& rows) {
    std::string out = "case            LASSO      EN        CLOT\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-14s %8.4f  %8.4f  %8.4f\n", r.label.c_str(), r.lasso,
                      r.en, r.clot);
        out += buf;
    }
    return out;
}

}  // namespace handsoff
