#include "cogalign/response_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "cogalign/errors.hpp"

namespace cogalign {

ResponseMatrix::ResponseMatrix(std::string group, std::vector<std::string> respondent_ids,
                               std::vector<std::string> item_ids, ScaleRef ref)
    : group_label(std::move(group)),
      scale_ref(std::move(ref)),
      respondent_ids_(std::move(respondent_ids)),
      item_ids_(std::move(item_ids)),
      cells_(respondent_ids_.size() * item_ids_.size()) {}

const std::optional<double>& ResponseMatrix::at(std::size_t row, std::size_t col) const {
    return cells_.at(row * item_ids_.size() + col);
}

void ResponseMatrix::set(std::size_t row, std::size_t col, std::optional<double> value) {
    cells_.at(row * item_ids_.size() + col) = value;
}

std::vector<std::optional<double>> ResponseMatrix::column(std::size_t col) const {
    std::vector<std::optional<double>> out(n());
    for (std::size_t r = 0; r < n(); ++r) out[r] = at(r, col);
    return out;
}

std::vector<std::optional<double>> ResponseMatrix::row(std::size_t r) const {
    std::vector<std::optional<double>> out(k());
    for (std::size_t c = 0; c < k(); ++c) out[c] = at(r, c);
    return out;
}

std::optional<std::size_t> ResponseMatrix::item_index(const std::string& item_id) const {
    const auto it = std::find(item_ids_.begin(), item_ids_.end(), item_id);
    if (it == item_ids_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - item_ids_.begin());
}

std::size_t ResponseMatrix::missing_count() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return !c.has_value(); }));
}

ResponseMatrix ResponseMatrix::listwise_complete() const {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < n(); ++r) {
        bool complete = true;
        for (std::size_t c = 0; c < k() && complete; ++c) complete = at(r, c).has_value();
        if (complete) keep.push_back(r);
    }
    std::vector<std::size_t> cols(k());
    for (std::size_t c = 0; c < k(); ++c) cols[c] = c;
    return permuted(keep, cols);
}

Eigen::MatrixXd ResponseMatrix::complete_data() const {
    const ResponseMatrix complete = listwise_complete();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(complete.n()), static_cast<Eigen::Index>(k()));
    for (std::size_t r = 0; r < complete.n(); ++r)
        for (std::size_t c = 0; c < k(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *complete.at(r, c);
    return out;
}

ResponseMatrix ResponseMatrix::permuted(const std::vector<std::size_t>& row_order,
                                        const std::vector<std::size_t>& col_order) const {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    for (auto r : row_order) rows.push_back(respondent_ids_.at(r));
    for (auto c : col_order) cols.push_back(item_ids_.at(c));
    ResponseMatrix out(group_label, std::move(rows), std::move(cols), scale_ref);
    for (std::size_t r = 0; r < row_order.size(); ++r)
        for (std::size_t c = 0; c < col_order.size(); ++c) out.set(r, c, at(row_order[r], col_order[c]));
    return out;
}

ResponseMatrix ResponseMatrix::concatenated(const ResponseMatrix& other) const {
    if (other.item_ids_ != item_ids_) {
        throw Error(ErrorCode::ItemSetMismatch, "cannot stack matrices with different items");
    }
    std::vector<std::string> rows = respondent_ids_;
    rows.insert(rows.end(), other.respondent_ids_.begin(), other.respondent_ids_.end());
    ResponseMatrix out(group_label, std::move(rows), item_ids_, scale_ref);
    out.cells_ = cells_;
    out.cells_.insert(out.cells_.end(), other.cells_.begin(), other.cells_.end());
    return out;
}

AccuracyCounts accuracy_counts(const ResponseMatrix& m, const ScaleDefinition& scale) {
    AccuracyCounts counts;
    for (std::size_t c = 0; c < m.k(); ++c) {
        const auto idx = scale.index_of(m.item_ids()[c]);
        if (!idx || !scale.items[*idx].keyed()) continue;
        for (std::size_t r = 0; r < m.n(); ++r) {
            const auto& cell = m.at(r, c);
            if (!cell) continue;
            ++counts.answered;
            if (*cell == 1.0) ++counts.correct;
        }
    }
    return counts;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

double accuracy(const ResponseMatrix& m, const ScaleDefinition& scale) {
    const auto counts = accuracy_counts(m, scale);
    if (counts.answered == 0) throw Error(ErrorCode::NoKeyedItems, "no answered keyed cells");
    return round2(100.0 * static_cast<double>(counts.correct) / static_cast<double>(counts.answered));
}

}  // namespace cogalign
