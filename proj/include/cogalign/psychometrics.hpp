#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogalign/response_matrix.hpp"
#include "cogalign/stats.hpp"

namespace cogalign::psychometrics {

struct ItemReliability {
    std::string item_id;
    /// Empty when the item or the rest-score is constant.
    std::optional<double> corrected_item_total_r;
    /// Empty when fewer than 2 items would remain or the reduced total is constant.
    std::optional<double> alpha_if_deleted;
};

struct ReliabilityReport {
    double alpha = 0.0;
    std::size_t k = 0;
    /// Complete rows used.
    std::size_t n = 0;
    std::vector<ItemReliability> per_item;
};

/// Raw Cronbach alpha on complete rows, variance form.
[[nodiscard]] ReliabilityReport cronbach_alpha(const ResponseMatrix& m);

/// Alpha from the variance formula on a dense (rows = respondents) matrix.
[[nodiscard]] double alpha_variance_form(const Eigen::MatrixXd& data);

struct ParallelAnalysisResult {
    std::size_t retained = 0;
    std::vector<double> observed_eigs;
    std::vector<double> threshold_eigs;
    std::size_t n_sims = 0;
    double percentile = 95.0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultParallelSims = 1000;
inline constexpr double kDefaultParallelPercentile = 95.0;

/// Horn's parallel analysis against standard-normal data of identical shape (complete rows).
[[nodiscard]] ParallelAnalysisResult parallel_analysis(const ResponseMatrix& m, std::size_t n_sims,
                                                       double percentile, std::uint64_t seed);
[[nodiscard]] ParallelAnalysisResult parallel_analysis(const Eigen::MatrixXd& data, std::size_t n_sims,
                                                       double percentile, std::uint64_t seed);

enum class Rotation { None, Varimax };

struct FactorSolution {
    /// Items x factors.
    Eigen::MatrixXd loadings;
    /// All eigenvalues of the correlation matrix, descending.
    Eigen::VectorXd eigenvalues;
    Rotation rotation = Rotation::None;
    Eigen::VectorXd communalities;
    std::size_t varimax_sweeps = 0;
};

/// Principal-component extraction followed by varimax.
[[nodiscard]] FactorSolution efa(const ResponseMatrix& m, std::size_t n_factors, Rotation rotation = Rotation::Varimax);
[[nodiscard]] FactorSolution efa_from_correlation(const Eigen::MatrixXd& r, std::size_t n_factors,
                                                  Rotation rotation = Rotation::Varimax);

/// Pairwise (Kaiser-normalized) varimax. Applies the column sign convention on exit.
[[nodiscard]] Eigen::MatrixXd varimax(const Eigen::MatrixXd& loadings, std::size_t* sweeps = nullptr);

struct FitIndices {
    double chi2 = 0.0;
    int df = 0;
    double chi2_over_df = 0.0;
    double rmsea = 0.0;
    double cfi = 1.0;
    double tli = 1.0;
    std::size_t n = 0;
    bool converged = false;
    double baseline_chi2 = 0.0;
    int baseline_df = 0;
    double f_ml = 0.0;
    int iterations = 0;
};

struct CfaEstimates {
    std::vector<double> loadings;
    std::vector<double> uniquenesses;
    Eigen::MatrixXd factor_correlations;
};

struct CfaResult {
    FitIndices fit;
    CfaEstimates estimates;
};

/// item index -> factor index; factors are numbered 0..F-1.
using FactorMapping = std::vector<std::size_t>;

/// Maximum-likelihood CFA with simple structure on the item correlation matrix.
[[nodiscard]] CfaResult cfa(const ResponseMatrix& m, const FactorMapping& mapping);
[[nodiscard]] CfaResult cfa_from_matrix(const Eigen::MatrixXd& s, std::size_t n, const FactorMapping& mapping);

/// Mapping that assigns each item to its scale dimension (only dimensions present are used).
[[nodiscard]] FactorMapping dimension_mapping(const ResponseMatrix& m, const ScaleDefinition& scale);

/// ML discrepancy ln|Sigma| + tr(S Sigma^-1) - ln|S| - p, evaluated as sum(mu - 1 - ln mu) over the
/// eigenvalues mu of L^-1 S L^-T (Sigma = L L^T), which stays nonnegative near a perfect fit.
[[nodiscard]] double ml_discrepancy(const Eigen::MatrixXd& s, const Eigen::MatrixXd& sigma);

struct MdsResult {
    /// points x dims.
    Eigen::MatrixXd coordinates;
    Eigen::VectorXd eigenvalues;
    /// Sum of |lambda| over dropped negative eigenvalues; nonzero means the input is not Euclidean.
    double negative_eigen_mass = 0.0;
};

/// Torgerson classical scaling.
[[nodiscard]] MdsResult classical_mds(const Eigen::MatrixXd& d, std::size_t dims);

/// d(i, j) = sqrt(2 (1 - r_ij)).
[[nodiscard]] Eigen::MatrixXd correlation_distance(const Eigen::MatrixXd& r);

struct CriterionResult {
    std::string instrument;
    stats::CorrelationResult correlation;
};

/// Pairwise-complete Pearson between scale totals and each external instrument.
[[nodiscard]] std::vector<CriterionResult> criterion_validity(
    const std::map<std::string, double>& scale_scores,
    const std::map<std::string, std::map<std::string, std::optional<double>>>& external);

/// Per-respondent sum over non-missing cells; respondents with no answers are skipped.
[[nodiscard]] std::map<std::string, double> total_scores(const ResponseMatrix& m);

}  // namespace cogalign::psychometrics
