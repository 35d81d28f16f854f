#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogalign/llm_admin.hpp"
#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"
#include "cogalign/sna.hpp"
#include "cogalign/stats.hpp"

namespace cogalign::intervention {

struct AccuracyComparison {
    double pre_accuracy = 0.0;
    double post_accuracy = 0.0;
    /// post - pre in percentage points, 2 decimals.
    double delta = 0.0;
    std::vector<double> pre_run_accuracies;
    std::vector<double> post_run_accuracies;
    /// Welch t over per-run accuracies; empty with a note when it cannot be computed.
    std::optional<stats::TTestResult> ttest;
    std::string ttest_note;
};

/// Per-run accuracy is the t-test unit. Throws ScaleMismatch, NoKeyedItems.
[[nodiscard]] AccuracyComparison compare_accuracy(const std::vector<TranscriptRecord>& pre,
                                                  const std::vector<TranscriptRecord>& post,
                                                  const ScaleDefinition& scale);

struct NetworkDeltas {
    double avg_connectivity = 0.0;
    std::optional<double> hot_cold_integration;
    double density = 0.0;
};

struct StructureComparison {
    std::optional<double> rsm_similarity;
    std::string rsm_note;
    NetworkDeltas network_deltas;
    std::map<std::string, bool> isolation_resolved;
};

/// Throws ItemSetMismatch when the matrices do not share their item set.
[[nodiscard]] StructureComparison compare_structures(const ResponseMatrix& pre, const ResponseMatrix& post,
                                                     const ScaleDefinition& scale,
                                                     double isolation_threshold = sna::kDefaultIsolationThreshold,
                                                     double density_threshold = sna::kDefaultDensityThreshold);

struct InterventionReport {
    std::string model;
    std::string pre_condition;
    std::string post_condition;
    /// Source group labels of the two conditions.
    std::string pre_group;
    std::string post_group;
    AccuracyComparison accuracy;
    std::optional<StructureComparison> structure;
    std::string structure_note;
};

}  // namespace cogalign::intervention
