#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"

namespace cogalign::rsa {

enum class Space { ItemSpace, RespondentSpace };

std::string_view to_string(Space s);
std::optional<Space> parse_space(std::string_view label);

/// Symmetric similarity matrix; cells are empty where a correlation is undefined.
struct RSM {
    std::vector<std::string> labels;
    std::vector<std::optional<double>> values;  // row-major, labels.size()^2
    Space mode = Space::ItemSpace;
    std::string group_label;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] const std::optional<double>& at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
    void set(std::size_t i, std::size_t j, std::optional<double> v);
    [[nodiscard]] std::size_t defined_off_diagonal() const;
    bool operator==(const RSM&) const = default;
};

/// Pairwise-complete Pearson correlations between items (ItemSpace) or respondents.
[[nodiscard]] RSM build_rsm(const ResponseMatrix& m, Space mode);

/// Spearman correlation of the strict upper triangles, skipping cells missing in either.
[[nodiscard]] double rsm_compare(const RSM& a, const RSM& b);

/// Mean of defined strict-upper-triangle cells; empty if none.
[[nodiscard]] std::optional<double> mean_off_diagonal(const RSM& m);

struct GroupVariability {
    /// SD (n - 1 denominator) of per-respondent overall percent scores.
    double sd = 0.0;
    double mean = 0.0;
    std::size_t n = 0;
};

/// Per-respondent percent score = 100 * mean normalized cell value.
[[nodiscard]] std::vector<double> percent_scores(const ResponseMatrix& m, const ScaleDefinition& scale);
[[nodiscard]] GroupVariability group_variability(const ResponseMatrix& m, const ScaleDefinition& scale);

}  // namespace cogalign::rsa
