#pragma once

// Reference implementations used only by tests. They avoid the library's own kernels:
// long-double two-pass sums, O(n^2) rank counting, and direct quadrature of the t density.

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace oracle {

double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Ranks by counting (ties get the average position), then Pearson of the ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Upper tail of Student's t by adaptive Simpson integration of the density.
double t_sf(double t, double df);

struct Welch {
    double t;
    double df;
    double p;
};
Welch welch(const std::vector<double>& a, const std::vector<double>& b);

/// Cronbach alpha from the item covariance matrix: k/(k-1) * (1 - trace(C) / sum(C)).
double alpha_covariance(const Eigen::MatrixXd& data);

/// Pearson over the rows where both entries are present; empty if fewer than 2 or constant.
std::optional<double> pairwise_pearson(const std::vector<std::optional<double>>& x,
                                       const std::vector<std::optional<double>>& y);

}  // namespace oracle
