#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"

namespace cogalign::sna {

inline constexpr double kDefaultIsolationThreshold = 0.05;
inline constexpr double kDefaultDensityThreshold = 0.10;

/// Undirected weighted graph over labelled nodes. Node order is canonical for tie-breaking.
struct CognitiveNetwork {
    std::vector<std::string> nodes;
    /// Row-major nodes x nodes, symmetric, empty diagonal; empty = undefined edge.
    std::vector<std::optional<double>> weights;
    std::map<std::string, SystemTag> partition;
    std::string group_label;

    CognitiveNetwork() = default;
    explicit CognitiveNetwork(std::vector<std::string> node_labels);

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
    [[nodiscard]] const std::optional<double>& weight(std::size_t i, std::size_t j) const;
    void set_weight(std::size_t i, std::size_t j, std::optional<double> w);
    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& node) const;
    bool operator==(const CognitiveNetwork&) const = default;
};

/// Per-respondent mean normalized score for each dimension (empty if no answered item).
[[nodiscard]] std::map<Dimension, std::vector<std::optional<double>>> dimension_scores(
    const ResponseMatrix& m, const ScaleDefinition& scale);

/// Five dimension nodes; edge weights are pairwise-complete Pearson correlations of dimension scores.
[[nodiscard]] CognitiveNetwork build_network(const ResponseMatrix& m, const ScaleDefinition& scale);

struct NetworkMetrics {
    double avg_connectivity = 0.0;
    /// Strength centrality, aligned with the network's node order.
    std::vector<double> centrality;
    double density = 0.0;
    /// Empty when no defined edge crosses the hot/cold partition.
    std::optional<double> hot_cold_integration;
    std::string dominant_core;
    std::vector<std::string> isolated;
    double isolation_threshold = kDefaultIsolationThreshold;
    double density_threshold = kDefaultDensityThreshold;
    std::size_t defined_edges = 0;
};

/// Magnitude-based metrics; undefined edges are excluded from means and count as below both thresholds.
[[nodiscard]] NetworkMetrics network_metrics(const CognitiveNetwork& net,
                                             double isolation_threshold = kDefaultIsolationThreshold,
                                             double density_threshold = kDefaultDensityThreshold);

struct StructureClass {
    std::string dominant_core;
    std::vector<std::string> isolated_modules;
    bool information_isolated = false;
};

[[nodiscard]] StructureClass classify_structure(const NetworkMetrics& metrics);

}  // namespace cogalign::sna
