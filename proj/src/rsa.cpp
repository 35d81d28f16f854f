#include "cogalign/rsa.hpp"

#include "cogalign/errors.hpp"
#include "cogalign/stats.hpp"

namespace cogalign::rsa {

namespace {

using Vec = std::vector<std::optional<double>>;

std::optional<double> pairwise_complete_r(const Vec& a, const Vec& b) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) {
            x.push_back(*a[i]);
            y.push_back(*b[i]);
        }
    }
    if (x.size() < 2 || stats::is_constant(x) || stats::is_constant(y)) return std::nullopt;
    return stats::pearson(x, y).r;
}

bool defined_and_varying(const Vec& v) {
    std::vector<double> present;
    for (const auto& c : v)
        if (c) present.push_back(*c);
    return present.size() >= 2 && !stats::is_constant(present);
}

}  // namespace

std::string_view to_string(Space s) { return s == Space::ItemSpace ? "ItemSpace" : "RespondentSpace"; }

std::optional<Space> parse_space(std::string_view label) {
    if (label == "ItemSpace") return Space::ItemSpace;
    if (label == "RespondentSpace") return Space::RespondentSpace;
    return std::nullopt;
}

void RSM::set(std::size_t i, std::size_t j, std::optional<double> v) { values[i * size() + j] = v; }

std::size_t RSM::defined_off_diagonal() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j)
            if (at(i, j)) ++count;
    return count;
}

RSM build_rsm(const ResponseMatrix& m, Space mode) {
    std::vector<Vec> vectors;
    RSM out;
    out.mode = mode;
    out.group_label = m.group_label;
    if (mode == Space::ItemSpace) {
        if (m.n() < 3) throw Error(ErrorCode::TooFewObservations, "ItemSpace RSM needs at least 3 respondents");
        out.labels = m.item_ids();
        for (std::size_t c = 0; c < m.k(); ++c) vectors.push_back(m.column(c));
    } else {
        if (m.k() < 3) throw Error(ErrorCode::TooFewObservations, "RespondentSpace RSM needs at least 3 items");
        out.labels = m.respondent_ids();
        for (std::size_t r = 0; r < m.n(); ++r) vectors.push_back(m.row(r));
    }
    const std::size_t size = vectors.size();
    out.values.assign(size * size, std::nullopt);

    bool any_varying = false;
    for (std::size_t i = 0; i < size; ++i) {
        if (defined_and_varying(vectors[i])) {
            out.set(i, i, 1.0);
            any_varying = true;
        }
    }
    if (!any_varying) throw Error(ErrorCode::AllConstant, "every response vector is constant");
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = i + 1; j < size; ++j) {
            const auto r = pairwise_complete_r(vectors[i], vectors[j]);
            out.set(i, j, r);
            out.set(j, i, r);
        }
    }
    return out;
}

double rsm_compare(const RSM& a, const RSM& b) {
    if (a.labels != b.labels || a.mode != b.mode) throw Error(ErrorCode::LabelMismatch, "RSMs differ in labels or mode");
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if (a.at(i, j) && b.at(i, j)) {
                x.push_back(*a.at(i, j));
                y.push_back(*b.at(i, j));
            }
        }
    }
    if (x.size() < 3) throw Error(ErrorCode::InsufficientCells, "fewer than 3 shared defined cells");
    return stats::spearman(x, y).r;
}

std::optional<double> mean_off_diagonal(const RSM& m) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            if (m.at(i, j)) {
                sum += *m.at(i, j);
                ++count;
            }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::vector<double> percent_scores(const ResponseMatrix& m, const ScaleDefinition& scale) {
    std::vector<const Item*> items;
    for (const auto& id : m.item_ids()) items.push_back(&scale.item(id));
    std::vector<double> out;
    for (std::size_t r = 0; r < m.n(); ++r) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t c = 0; c < m.k(); ++c) {
            if (const auto& v = m.at(r, c)) {
                sum += normalized_score(*items[c], *v);
                ++count;
            }
        }
        if (count > 0) out.push_back(100.0 * sum / static_cast<double>(count));
    }
    return out;
}

GroupVariability group_variability(const ResponseMatrix& m, const ScaleDefinition& scale) {
    const auto scores = percent_scores(m, scale);
    if (scores.size() < 2) throw Error(ErrorCode::TooFewRespondents, "variability needs at least 2 scored respondents");
    GroupVariability out;
    out.n = scores.size();
    out.mean = stats::mean(scores);
    out.sd = stats::sample_sd(scores);
    return out;
}

}  // namespace cogalign::rsa
