#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogalign/intervention.hpp"
#include "cogalign/io.hpp"
#include "cogalign/psychometrics.hpp"
#include "cogalign/rsa.hpp"
#include "cogalign/scale.hpp"
#include "cogalign/sna.hpp"

namespace cogalign {

enum class Stage { Psychometrics, Rsa, Sna, Intervention };

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view label);

enum class MissingPolicy { Pairwise, Listwise };

/// One response source. Exactly one of `responses` / `transcripts` is set.
struct GroupSource {
    std::string label;
    std::filesystem::path responses;
    Layout layout = Layout::Wide;
    std::filesystem::path transcripts;
    /// Optional transcript filters; empty keeps every record.
    std::string model;
    std::optional<PromptCondition> condition;
};

/// Pre/post pair referring to transcript-backed groups by label.
struct InterventionSpec {
    std::string model;
    std::string pre_group;
    std::string post_group;
};

struct PipelineConfig {
    std::filesystem::path scale_path;
    std::vector<GroupSource> groups;
    std::set<Stage> stages{Stage::Psychometrics, Stage::Rsa, Stage::Sna, Stage::Intervention};
    std::uint64_t seed = 20240601;
    double isolation_threshold = sna::kDefaultIsolationThreshold;
    double density_threshold = sna::kDefaultDensityThreshold;
    /// Overrides the scale's hot/cold partition when set.
    std::optional<Partition> partition;
    MissingPolicy missing_policy = MissingPolicy::Pairwise;
    std::size_t parallel_sims = psychometrics::kDefaultParallelSims;
    double parallel_percentile = psychometrics::kDefaultParallelPercentile;
    std::vector<InterventionSpec> interventions;
};

/// Reads a run configuration object; relative paths resolve against `base_dir`. Throws ConfigError.
[[nodiscard]] PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
[[nodiscard]] PipelineConfig load_config_file(const std::filesystem::path& path);
/// "Calculation=Cold,Belief=Hot,..." (unlisted dimensions keep the scale's tag when merged).
[[nodiscard]] Partition parse_partition(std::string_view text);

struct StageError {
    std::string stage;
    std::string code;
    std::string message;
};

struct GroupResult {
    std::string label;
    std::string source;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t missing_cells = 0;
    std::size_t unparseable_cells = 0;
    std::optional<double> accuracy;

    std::optional<psychometrics::ReliabilityReport> reliability;
    std::optional<psychometrics::ParallelAnalysisResult> parallel;
    std::optional<psychometrics::FitIndices> cfa_fit;

    std::optional<rsa::RSM> item_rsm;
    std::optional<rsa::GroupVariability> variability;

    std::optional<sna::CognitiveNetwork> network;
    std::optional<sna::NetworkMetrics> metrics;
    std::optional<sna::StructureClass> structure;

    std::vector<StageError> errors;
};

struct ReportMetadata {
    std::string tool_version;
    std::uint64_t seed = 0;
    double isolation_threshold = 0.0;
    double density_threshold = 0.0;
    Partition partition;
    MissingPolicy missing_policy = MissingPolicy::Pairwise;
    std::string prng;
    std::size_t parallel_sims = 0;
    double parallel_percentile = 0.0;
    std::vector<std::string> stages;
    ScaleRef scale;
};

struct AlignmentReport {
    ReportMetadata metadata;
    std::vector<GroupResult> groups;
    /// Pairwise rsm_compare over groups with an item-space RSM, in group order.
    std::vector<std::string> comparison_labels;
    std::vector<std::optional<double>> comparison;
    std::vector<intervention::InterventionReport> interventions;
    std::vector<StageError> intervention_errors;
};

/// Loads the scale and every source, then runs the requested stages. Stage failures are
/// recorded per group; input failures propagate annotated with the group label.
[[nodiscard]] AlignmentReport run_pipeline(const PipelineConfig& config);

/// Same as run_pipeline with an already-loaded scale and matrices (labels taken from the matrices).
[[nodiscard]] AlignmentReport run_pipeline_on(const PipelineConfig& config, const ScaleDefinition& scale,
                                              const std::vector<ResponseMatrix>& matrices,
                                              const std::map<std::string, std::vector<TranscriptRecord>>& transcripts = {});

[[nodiscard]] nlohmann::json report_to_json(const AlignmentReport& report);
/// Deterministic serialization (2-space indent, trailing newline).
[[nodiscard]] std::string serialize_report(const AlignmentReport& report);

enum class OutputFormat { Json, Csv, SvgHeatmap, DotGraph };

std::string_view to_string(OutputFormat f);
/// Throws UnsupportedFormat.
[[nodiscard]] OutputFormat parse_format(std::string_view label);
[[nodiscard]] std::set<OutputFormat> parse_formats(std::string_view comma_list);

struct ManifestEntry {
    std::string path;
    std::string kind;
    std::string sha256;
};

/// Writes the requested renderings into `dest` plus manifest.json. An empty format set writes nothing.
std::vector<ManifestEntry> emit_report(const AlignmentReport& report, const std::set<OutputFormat>& formats,
                                       const std::filesystem::path& dest);
/// Emission from a serialized report (used to re-render saved reports).
std::vector<ManifestEntry> emit_report_json(const nlohmann::json& report, const std::set<OutputFormat>& formats,
                                            const std::filesystem::path& dest);

/// Individual renderings, exposed for tests.
[[nodiscard]] std::string render_svg_heatmap(const nlohmann::json& rsm);
[[nodiscard]] std::string render_dot(const nlohmann::json& network, double isolation_threshold);
[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace cogalign
