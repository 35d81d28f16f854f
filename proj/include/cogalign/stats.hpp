#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cogalign/rng.hpp"

namespace cogalign::stats {

struct CorrelationResult {
    double r = 0.0;
    /// Two-sided p-value; empty when n < 3.
    std::optional<double> p;
    std::size_t n = 0;
};

struct TTestResult {
    double t = 0.0;
    /// Welch-Satterthwaite degrees of freedom.
    double df = 0.0;
    /// Two-sided p-value.
    double p = 1.0;
};

struct EigenResult {
    /// Sorted descending.
    Eigen::VectorXd values;
    /// Column i pairs with values[i]; largest-magnitude component of each column is positive.
    Eigen::MatrixXd vectors;
};

[[nodiscard]] double mean(std::span<const double> x);
/// Sample variance with n-1 denominator.
[[nodiscard]] double sample_variance(std::span<const double> x);
[[nodiscard]] double sample_sd(std::span<const double> x);
[[nodiscard]] bool is_constant(std::span<const double> x);

/// Average ranks (1-based), ties share the mean of their positions.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> x);

/// Linear-interpolation percentile (q in [0,100]) of an unsorted sample.
[[nodiscard]] double percentile(std::vector<double> values, double q);

/// Product-moment correlation. Throws LengthMismatch, InsufficientData, ConstantInput.
[[nodiscard]] CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Pearson on average ranks.
[[nodiscard]] CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

/// Unequal-variance two-sample t-test. welch_t(a, b).t == -welch_t(b, a).t exactly.
[[nodiscard]] TTestResult welch_t(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated by modified Lentz.
[[nodiscard]] double incomplete_beta(double a, double b, double x);

/// Upper-tail probability P(T > t) of Student's t with df degrees of freedom.
[[nodiscard]] double student_t_sf(double t, double df);

/// 2 * sf(|t|, df).
[[nodiscard]] double student_t_two_sided_p(double t, double df);

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
[[nodiscard]] EigenResult sym_eigen(const Eigen::MatrixXd& m);

/// n x p matrix of i.i.d. rows from N(mean, cov), via an eigenvalue-clipped square root of cov.
[[nodiscard]] Eigen::MatrixXd mvn_sample(RngStream& rng, const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& cov, std::size_t n);

/// Column correlation matrix of complete data (rows = observations).
[[nodiscard]] Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data);

}  // namespace cogalign::stats
