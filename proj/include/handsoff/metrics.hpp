#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace handsoff {

struct DiscreteNorms {
    double l1 = 0.0;    // h * sum |u_m|
    double l2 = 0.0;    // sqrt(h * sum u_m^2)
    double linf = 0.0;  // max |u_m|
};

/// Summary statistics of a control signal at a given zero threshold.
struct ControlMetrics {
    double sparsity_density = 0.0;  // fraction of samples with |u| > threshold
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double max_step = 0.0;
    double threshold = 0.0;
};

/// Fraction of samples whose magnitude exceeds the threshold, the discrete
/// surrogate of the support measure divided by the horizon.
double sparsity_density(const Eigen::VectorXd& u, double threshold);

DiscreteNorms discrete_norms(const Eigen::VectorXd& u, double h);

/// Largest jump between consecutive samples; bang-off-bang signals score
/// their switch height, continuous signals score O(h).
double max_step(const Eigen::VectorXd& u);

ControlMetrics compute_metrics(const Eigen::VectorXd& u, double h, double threshold);

/// One table row: densities per method for a solved case, in benchmark order.
struct DensityRow {
    std::string label;
    double lasso = 0.0;
    double en = 0.0;
    double clot = 0.0;
};

/// Fixed-width text table of densities, rows in the given order.
std::string format_density_table(const std::vector<DensityRow>& rows);

}  // namespace handsoff
