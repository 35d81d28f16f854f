#include "cogalign/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cogalign/errors.hpp"
#include "cogalign/rng.hpp"
#include "cogalign/stats.hpp"

namespace cogalign::synth {

namespace {

constexpr double kLogisticSlope = 1.7;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ItemPlan {
    std::size_t dim = 0;
    const Item* item = nullptr;
};

std::vector<ItemPlan> check_and_plan(const PopulationSpec& spec, const ScaleDefinition& scale) {
    for (Dimension d : kDimensions) {
        const auto count = scale.items_in(d).size();
        if (count != spec.items_per_dimension) {
            throw Error(ErrorCode::SpecScaleMismatch, std::string(to_string(d)) + " has " + std::to_string(count) +
                                                          " items, spec expects " +
                                                          std::to_string(spec.items_per_dimension));
        }
    }
    const auto& phi = spec.factor_correlations;
    if (phi.rows() != 5 || phi.cols() != 5) throw Error(ErrorCode::SpecScaleMismatch, "factor_correlations must be 5 x 5");
    for (Eigen::Index i = 0; i < 5; ++i) {
        if (std::abs(phi(i, i) - 1.0) > 1e-12) throw Error(ErrorCode::ConfigError, "factor_correlations needs a unit diagonal");
    }
    for (std::size_t d = 0; d < 5; ++d) {
        if (!(spec.loadings[d] >= 0.0 && spec.loadings[d] <= 1.0)) throw Error(ErrorCode::ConfigError, "loadings must lie in [0, 1]");
        if (!(spec.rationality[d] >= 0.0 && spec.rationality[d] <= 1.0)) throw Error(ErrorCode::ConfigError, "rationality must lie in [0, 1]");
        if (spec.dimension_variability[d] < 0.0) throw Error(ErrorCode::ConfigError, "dimension_variability must be nonnegative");
    }
    if (spec.variability_scale < 0.0) throw Error(ErrorCode::ConfigError, "variability_scale must be nonnegative");
    if (spec.n < 1) throw Error(ErrorCode::ConfigError, "n must be positive");
    std::vector<ItemPlan> plan;
    for (const auto& item : scale.items) plan.push_back({static_cast<std::size_t>(item.dimension), &item});
    return plan;
}

double likert_level(const Likert& lk, double z) {
    const int levels = lk.max - lk.min + 1;
    const double width = 6.0 / levels;
    const int bin = std::clamp(static_cast<int>(std::floor((z + 3.0) / width)), 0, levels - 1);
    return static_cast<double>(lk.min + bin);
}

double keyed_probability(double rationality, double z, double shift) {
    if (rationality >= 1.0) return 1.0;
    if (rationality <= 0.0) return 0.0;
    return logistic(kLogisticSlope * z + shift);
}

ResponseMatrix empty_matrix(const PopulationSpec& spec, const ScaleDefinition& scale, const char* prefix) {
    std::vector<std::string> rows;
    for (std::size_t r = 0; r < spec.n; ++r) rows.push_back(prefix + std::to_string(r + 1));
    std::vector<std::string> cols;
    for (const auto& item : scale.items) cols.push_back(item.id);
    return ResponseMatrix(spec.group_label, std::move(rows), std::move(cols), {scale.name, scale.version});
}

}  // namespace

Eigen::MatrixXd equicorrelation(double rho, std::size_t size) {
    const auto s = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(s, s, rho);
    m.diagonal().setOnes();
    return m;
}

double logistic_shift(double target, double sd) {
    if (target <= 0.0) return -std::numeric_limits<double>::infinity();
    if (target >= 1.0) return std::numeric_limits<double>::infinity();
    // Midpoint rule on [-8, 8] for the normal expectation.
    constexpr int kNodes = 800;
    auto expected = [&](double b) {
        double total = 0.0;
        double weight = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            const double z = -8.0 + 16.0 * (i + 0.5) / kNodes;
            const double w = std::exp(-0.5 * z * z);
            total += w * logistic(kLogisticSlope * sd * z + b);
            weight += w;
        }
        return total / weight;
    };
    double lo = -60.0;
    double hi = 60.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (expected(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

ScaleDefinition synth_scale(const PopulationSpec& spec, int likert_levels) {
    ScaleDefinition scale;
    scale.name = "synthetic-scale";
    scale.version = "1.0";
    scale.hot_cold_partition = default_partition();
    const auto keyed = static_cast<std::size_t>(std::lround(spec.keyed_fraction * static_cast<double>(spec.items_per_dimension)));
    const char* keys[] = {"A", "B", "C", "D"};
    for (Dimension d : kDimensions) {
        for (std::size_t i = 0; i < spec.items_per_dimension; ++i) {
            Item item;
            item.id = std::string(to_string(d)).substr(0, 3) + "_" + std::to_string(i + 1);
            item.text = "[synthetic] " + std::string(to_string(d)) + " scenario " + std::to_string(i + 1);
            item.dimension = d;
            item.bias_name = std::string(to_string(d)) + " bias " + std::to_string(i + 1);
            if (i < keyed) {
                item.format = MultipleChoice{{"A", "B", "C", "D"}, keys[i % 4]};
            } else {
                item.format = Likert{1, likert_levels};
            }
            scale.bias_catalog.insert(item.bias_name);
            scale.items.push_back(std::move(item));
        }
    }
    return scale;
}

ResponseMatrix gen_population(const PopulationSpec& spec, const ScaleDefinition& scale) {
    const auto plan = check_and_plan(spec, scale);
    RngStream rng(spec.seed);
    const Eigen::MatrixXd factors = stats::mvn_sample(rng, Eigen::VectorXd::Zero(5), spec.factor_correlations, spec.n);

    std::array<double, 5> scale_by_dim{};
    std::array<double, 5> shift{};
    for (std::size_t d = 0; d < 5; ++d) {
        scale_by_dim[d] = spec.variability_scale * spec.dimension_variability[d];
        shift[d] = logistic_shift(spec.rationality[d], scale_by_dim[d]);
    }

    ResponseMatrix m = empty_matrix(spec, scale, "r");
    for (std::size_t r = 0; r < spec.n; ++r) {
        for (std::size_t j = 0; j < plan.size(); ++j) {
            const std::size_t d = plan[j].dim;
            const double lambda = spec.loadings[d];
            const double noise = rng.normal();
            const double u = rng.uniform();
            const double latent = lambda * factors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) +
                                  std::sqrt(1.0 - lambda * lambda) * noise;
            const double z = scale_by_dim[d] * latent;
            if (const auto* lk = std::get_if<Likert>(&plan[j].item->format)) {
                m.set(r, j, likert_level(*lk, z));
            } else {
                m.set(r, j, u < keyed_probability(spec.rationality[d], z, shift[d]) ? 1.0 : 0.0);
            }
        }
    }
    return m;
}

ResponseMatrix gen_llm_like(const PopulationSpec& spec, const ScaleDefinition& scale) {
    if (spec.variability_scale > 0.3) throw Error(ErrorCode::ConfigError, "LLM-like generation needs variability_scale <= 0.3");
    const auto plan = check_and_plan(spec, scale);
    RngStream rng(spec.seed);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
    const Eigen::MatrixXd shared_factor = stats::mvn_sample(rng, zero, spec.factor_correlations, 1);
    std::vector<double> shared_noise(plan.size());
    std::vector<double> shared_u(plan.size());
    for (std::size_t j = 0; j < plan.size(); ++j) {
        shared_noise[j] = rng.normal();
        shared_u[j] = rng.uniform();
    }
    const Eigen::MatrixXd run_factors = stats::mvn_sample(rng, zero, spec.factor_correlations, spec.n);

    std::array<double, 5> spread{};
    std::array<double, 5> shift{};
    for (std::size_t d = 0; d < 5; ++d) {
        spread[d] = spec.variability_scale * spec.dimension_variability[d];
        shift[d] = logistic_shift(spec.rationality[d], 1.0);
    }

    ResponseMatrix m = empty_matrix(spec, scale, "run-");
    for (std::size_t r = 0; r < spec.n; ++r) {
        for (std::size_t j = 0; j < plan.size(); ++j) {
            const std::size_t d = plan[j].dim;
            const double lambda = spec.loadings[d];
            const double w = spread[d];
            const double noise = rng.normal();
            const double fresh_u = rng.uniform();
            const double coin = rng.uniform();
            const double factor = shared_factor(0, static_cast<Eigen::Index>(d)) +
                                  w * run_factors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d));
            const double z = lambda * factor + std::sqrt(1.0 - lambda * lambda) * (shared_noise[j] + w * noise);
            if (const auto* lk = std::get_if<Likert>(&plan[j].item->format)) {
                m.set(r, j, likert_level(*lk, z));
            } else {
                const double u = coin < w ? fresh_u : shared_u[j];
                m.set(r, j, u < keyed_probability(spec.rationality[d], z, shift[d]) ? 1.0 : 0.0);
            }
        }
    }
    return m;
}

}  // namespace cogalign::synth
