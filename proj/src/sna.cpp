#include "cogalign/sna.hpp"

#include <algorithm>
#include <cmath>

#include "cogalign/errors.hpp"
#include "cogalign/stats.hpp"

namespace cogalign::sna {

CognitiveNetwork::CognitiveNetwork(std::vector<std::string> node_labels)
    : nodes(std::move(node_labels)), weights(nodes.size() * nodes.size()) {}

const std::optional<double>& CognitiveNetwork::weight(std::size_t i, std::size_t j) const {
    return weights.at(i * size() + j);
}

void CognitiveNetwork::set_weight(std::size_t i, std::size_t j, std::optional<double> w) {
    if (i == j) return;
    weights.at(i * size() + j) = w;
    weights.at(j * size() + i) = w;
}

std::optional<std::size_t> CognitiveNetwork::index_of(const std::string& node) const {
    const auto it = std::find(nodes.begin(), nodes.end(), node);
    if (it == nodes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
}

std::map<Dimension, std::vector<std::optional<double>>> dimension_scores(const ResponseMatrix& m,
                                                                         const ScaleDefinition& scale) {
    std::map<Dimension, std::vector<std::size_t>> columns;
    std::vector<const Item*> items;
    for (std::size_t c = 0; c < m.k(); ++c) {
        const Item& item = scale.item(m.item_ids()[c]);
        items.push_back(&item);
        columns[item.dimension].push_back(c);
    }
    std::map<Dimension, std::vector<std::optional<double>>> out;
    for (Dimension d : kDimensions) {
        const auto it = columns.find(d);
        if (it == columns.end()) continue;
        auto& scores = out[d];
        for (std::size_t r = 0; r < m.n(); ++r) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t c : it->second) {
                if (const auto& v = m.at(r, c)) {
                    sum += normalized_score(*items[c], *v);
                    ++count;
                }
            }
            scores.push_back(count ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt);
        }
    }
    return out;
}

CognitiveNetwork build_network(const ResponseMatrix& m, const ScaleDefinition& scale) {
    if (m.n() < 3) throw Error(ErrorCode::TooFewRespondents, "network needs at least 3 respondents");
    const auto scores = dimension_scores(m, scale);
    std::vector<std::string> labels;
    for (Dimension d : kDimensions) {
        if (!scores.contains(d)) {
            throw Error(ErrorCode::MissingDimension, std::string(to_string(d)) + " has no items in the matrix");
        }
        labels.emplace_back(to_string(d));
    }
    CognitiveNetwork net(std::move(labels));
    net.group_label = m.group_label;
    for (const auto& [dim, tag] : scale.hot_cold_partition) net.partition[std::string(to_string(dim))] = tag;

    for (std::size_t i = 0; i < kDimensions.size(); ++i) {
        for (std::size_t j = i + 1; j < kDimensions.size(); ++j) {
            const auto& a = scores.at(kDimensions[i]);
            const auto& b = scores.at(kDimensions[j]);
            std::vector<double> x;
            std::vector<double> y;
            for (std::size_t r = 0; r < a.size(); ++r) {
                if (a[r] && b[r]) {
                    x.push_back(*a[r]);
                    y.push_back(*b[r]);
                }
            }
            if (x.size() >= 2 && !stats::is_constant(x) && !stats::is_constant(y)) {
                net.set_weight(i, j, stats::pearson(x, y).r);
            }
        }
    }
    return net;
}

NetworkMetrics network_metrics(const CognitiveNetwork& net, double isolation_threshold, double density_threshold) {
    const std::size_t n = net.size();
    NetworkMetrics out;
    out.isolation_threshold = isolation_threshold;
    out.density_threshold = density_threshold;
    out.centrality.assign(n, 0.0);
    double sum = 0.0;
    double cross_sum = 0.0;
    std::size_t cross_count = 0;
    std::size_t dense = 0;
    std::size_t possible = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            ++possible;
            const auto& w = net.weight(i, j);
            if (!w) continue;
            const double mag = std::abs(*w);
            ++out.defined_edges;
            sum += mag;
            out.centrality[i] += mag;
            out.centrality[j] += mag;
            if (mag >= density_threshold) ++dense;
            const auto ti = net.partition.find(net.nodes[i]);
            const auto tj = net.partition.find(net.nodes[j]);
            if (ti != net.partition.end() && tj != net.partition.end() && ti->second != tj->second) {
                cross_sum += mag;
                ++cross_count;
            }
        }
    }
    if (out.defined_edges == 0) throw Error(ErrorCode::NoDefinedEdges, "network has no defined edge");
    out.avg_connectivity = sum / static_cast<double>(out.defined_edges);
    out.density = static_cast<double>(dense) / static_cast<double>(possible);
    if (cross_count > 0) out.hot_cold_integration = cross_sum / static_cast<double>(cross_count);

    std::size_t core = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (out.centrality[i] > out.centrality[core]) core = i;
    out.dominant_core = net.nodes[core];

    for (std::size_t i = 0; i < n; ++i) {
        bool isolated = true;
        for (std::size_t j = 0; j < n && isolated; ++j) {
            if (i == j) continue;
            const auto& w = net.weight(i, j);
            if (w && std::abs(*w) >= isolation_threshold) isolated = false;
        }
        if (isolated) out.isolated.push_back(net.nodes[i]);
    }
    return out;
}

StructureClass classify_structure(const NetworkMetrics& metrics) {
    StructureClass out;
    out.dominant_core = metrics.dominant_core;
    out.isolated_modules = metrics.isolated;
    const std::string info(to_string(Dimension::Information));
    out.information_isolated = std::find(metrics.isolated.begin(), metrics.isolated.end(), info) != metrics.isolated.end();
    return out;
}

}  // namespace cogalign::sna
