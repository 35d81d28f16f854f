#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cogalign/scale.hpp"

namespace cogalign {

struct ScaleRef {
    std::string name;
    std::string version;
    bool operator==(const ScaleRef&) const = default;
};

/// Respondents (or runs) x items grid of scored values; missing cells are empty.
class ResponseMatrix {
public:
    ResponseMatrix() = default;
    ResponseMatrix(std::string group_label, std::vector<std::string> respondent_ids,
                   std::vector<std::string> item_ids, ScaleRef scale_ref);

    std::string group_label;
    ScaleRef scale_ref;

    [[nodiscard]] const std::vector<std::string>& respondent_ids() const { return respondent_ids_; }
    [[nodiscard]] const std::vector<std::string>& item_ids() const { return item_ids_; }
    [[nodiscard]] std::size_t n() const { return respondent_ids_.size(); }
    [[nodiscard]] std::size_t k() const { return item_ids_.size(); }

    [[nodiscard]] const std::optional<double>& at(std::size_t row, std::size_t col) const;
    void set(std::size_t row, std::size_t col, std::optional<double> value);

    [[nodiscard]] std::vector<std::optional<double>> column(std::size_t col) const;
    [[nodiscard]] std::vector<std::optional<double>> row(std::size_t r) const;
    [[nodiscard]] std::optional<std::size_t> item_index(const std::string& item_id) const;
    [[nodiscard]] std::size_t missing_count() const;

    /// Rows with no missing cell.
    [[nodiscard]] ResponseMatrix listwise_complete() const;
    /// Complete rows as a dense matrix (listwise deletion).
    [[nodiscard]] Eigen::MatrixXd complete_data() const;
    /// Copy with rows/columns reordered; permutations index the source.
    [[nodiscard]] ResponseMatrix permuted(const std::vector<std::size_t>& row_order,
                                          const std::vector<std::size_t>& col_order) const;
    /// Rows of `other` appended below this matrix; item ids must match.
    [[nodiscard]] ResponseMatrix concatenated(const ResponseMatrix& other) const;

    bool operator==(const ResponseMatrix&) const = default;

private:
    std::vector<std::string> respondent_ids_;
    std::vector<std::string> item_ids_;
    std::vector<std::optional<double>> cells_;
};

struct AccuracyCounts {
    std::size_t correct = 0;
    std::size_t answered = 0;
};

/// Correct and non-missing cells over the matrix's keyed items.
[[nodiscard]] AccuracyCounts accuracy_counts(const ResponseMatrix& m, const ScaleDefinition& scale);

/// 100 * correct / answered over keyed items, rounded to 2 decimals. Throws NoKeyedItems.
[[nodiscard]] double accuracy(const ResponseMatrix& m, const ScaleDefinition& scale);

/// Percentage rounded half away from zero to 2 decimals.
[[nodiscard]] double round2(double value);

}  // namespace cogalign
