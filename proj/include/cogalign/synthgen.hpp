#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>

#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"

namespace cogalign::synth {

/// Known-structure population. Per-dimension arrays follow the canonical Dimension order.
struct PopulationSpec {
    std::size_t n = 330;
    std::size_t items_per_dimension = 4;
    std::array<double, 5> loadings{0.6, 0.6, 0.6, 0.6, 0.6};
    /// 5 x 5 correlation matrix of the latent dimensions.
    Eigen::MatrixXd factor_correlations = Eigen::MatrixXd::Identity(5, 5);
    /// 1.0 is human-like dispersion; below 0.5 is LLM-like.
    double variability_scale = 1.0;
    /// Multiplies variability_scale per dimension; 0 makes a dimension rigid (identical across runs).
    std::array<double, 5> dimension_variability{1.0, 1.0, 1.0, 1.0, 1.0};
    /// Share of multiple-choice items per dimension when a scale is synthesized.
    double keyed_fraction = 0.5;
    /// Mean probability of choosing the keyed option, per dimension.
    std::array<double, 5> rationality{0.6, 0.6, 0.6, 0.6, 0.6};
    std::uint64_t seed = 1;
    std::string group_label = "synthetic";
};

/// Scale with items_per_dimension items per dimension; the first round(keyed_fraction * count)
/// of each dimension are 4-option keyed items, the rest Likert 1..likert_levels.
[[nodiscard]] ScaleDefinition synth_scale(const PopulationSpec& spec, int likert_levels = 5);

/// Independent respondents: item latent = loading * factor + sqrt(1 - loading^2) * noise, scaled by
/// the variability; Likert items binned over +-3, keyed items drawn from a logistic link.
[[nodiscard]] ResponseMatrix gen_population(const PopulationSpec& spec, const ScaleDefinition& scale);

/// Repeated runs around one shared response pattern; deviations scale with variability_scale (<= 0.3).
[[nodiscard]] ResponseMatrix gen_llm_like(const PopulationSpec& spec, const ScaleDefinition& scale);

/// Equicorrelation matrix with `rho` off the diagonal.
[[nodiscard]] Eigen::MatrixXd equicorrelation(double rho, std::size_t size = 5);

/// Shift b such that E[logistic(1.7 * sd * Z + b)] = target for Z ~ N(0, 1).
[[nodiscard]] double logistic_shift(double target, double sd);

}  // namespace cogalign::synth
