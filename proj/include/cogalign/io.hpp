#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cogalign/llm_admin.hpp"
#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"

namespace cogalign {

// Scale files ---------------------------------------------------------------

/// Parses and validates a scale file. Throws ParseError (with line) or SchemaViolation (with field path).
[[nodiscard]] ScaleDefinition load_scale(std::istream& in);
[[nodiscard]] ScaleDefinition load_scale_file(const std::filesystem::path& path);
[[nodiscard]] ScaleDefinition scale_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json scale_to_json(const ScaleDefinition& scale);
[[nodiscard]] std::string serialize_scale(const ScaleDefinition& scale);

// Response tables -----------------------------------------------------------

enum class Layout { Wide, Long };

std::string_view to_string(Layout layout);
std::optional<Layout> parse_layout(std::string_view label);

struct LoadedResponses {
    ResponseMatrix matrix;
    /// Cells that could not be scored; they are stored as missing.
    std::size_t unparseable_cells = 0;
    std::vector<std::string> warnings;
};

/// Items are ordered as in the scale, respondents by first appearance.
[[nodiscard]] LoadedResponses load_responses(std::istream& in, const ScaleDefinition& scale, Layout layout,
                                             const std::string& group_label);
[[nodiscard]] LoadedResponses load_responses_file(const std::filesystem::path& path, const ScaleDefinition& scale,
                                                  Layout layout, const std::string& group_label);

/// Raw response table (option ids / integer levels); missing cells are empty (wide) or omitted (long).
[[nodiscard]] std::string write_responses(const ResponseMatrix& m, const ScaleDefinition& scale, Layout layout);

/// Splits one CSV record, honouring double-quoted fields.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

// Transcripts (JSONL) -------------------------------------------------------

[[nodiscard]] nlohmann::json transcript_to_json(const TranscriptRecord& rec);
[[nodiscard]] TranscriptRecord transcript_from_json(const nlohmann::json& j);
[[nodiscard]] std::string transcript_to_jsonl(const TranscriptRecord& rec);
/// Throws DuplicateCell when (model, condition, run_index, item_id) repeats.
[[nodiscard]] std::vector<TranscriptRecord> read_transcripts(std::istream& in);
[[nodiscard]] std::vector<TranscriptRecord> read_transcripts_file(const std::filesystem::path& path);

// Helpers -------------------------------------------------------------------

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for reports: truncate and write, IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);
/// Fixed 6-decimal rendering used in CSV outputs.
[[nodiscard]] std::string format_csv_number(double value);

}  // namespace cogalign
