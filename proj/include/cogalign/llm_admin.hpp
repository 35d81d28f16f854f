#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"

namespace cogalign {

enum class PromptCondition { Baseline, RolePlay, DualStrategy };

std::string_view to_string(PromptCondition c);
std::optional<PromptCondition> parse_condition(std::string_view label);

inline constexpr std::string_view kRolePlayInstruction = "Act as a senior cognitive scientist.";

/// Stand-in mitigation wording; overridable through SessionPlan.
inline constexpr std::string_view kDefaultMitigationBlock =
    "Before answering, identify any cognitive bias the scenario may trigger and deliberately "
    "counteract it; reason step by step; choose the option a fully rational agent would choose.";

struct RequestParams {
    double temperature = 0.9;
    int max_tokens = 2000;
    double top_p = 1.0;
    bool operator==(const RequestParams&) const = default;
};

struct EndpointConfig {
    std::string base_url;
    std::string model_name;
    /// Environment variable holding the bearer token; the token itself is never persisted.
    std::string auth_env;
    double timeout_seconds = 60.0;
    int max_retries = 3;
    int parallelism = 1;
    RequestParams request_params;
    double backoff_base_seconds = 1.0;
    double backoff_factor = 2.0;
};

struct SessionPlan {
    ScaleRef scale_ref;
    PromptCondition condition = PromptCondition::Baseline;
    int runs = 30;
    /// Labels runs and seeds backoff jitter; remote sampling stays stochastic.
    std::uint64_t seed = 0;
    std::string mitigation_block = std::string(kDefaultMitigationBlock);
};

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
};

[[nodiscard]] RenderedPrompt render_prompt(const Item& item, PromptCondition condition,
                                           std::string_view mitigation_block = kDefaultMitigationBlock);

/// First standalone option letter (MC) or first in-range integer (Likert); nullopt = Unparseable.
[[nodiscard]] std::optional<ScoredValue> parse_response(std::string_view raw_completion, const Item& item);

struct TranscriptRecord {
    std::string model;
    PromptCondition condition = PromptCondition::Baseline;
    int run_index = 0;
    std::string item_id;
    std::string system_text;
    std::string prompt_text;
    std::string raw_completion;
    /// Empty when the completion was unparseable or the request failed.
    std::optional<ScoredValue> parsed;
    std::string timestamp;
    RequestParams request_params;
    int retry_count = 0;
    /// "ok" or "failed".
    std::string status = "ok";
    std::string error;

    bool operator==(const TranscriptRecord&) const = default;
};

using TranscriptSink = std::function<void(const TranscriptRecord&)>;

struct SessionSummary {
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::size_t unparseable = 0;
    std::size_t total_retries = 0;
    std::vector<int> aborted_runs;
    std::optional<double> accuracy;
};

/// Runs every (run, item) pair against an OpenAI-compatible endpoint. Records are delivered to
/// `sink` in (run, item) order. Throws AuthFailure on 401/403 and EndpointUnreachable when the
/// transport still fails after the retry budget; records are flushed before either is thrown.
SessionSummary administer(const SessionPlan& plan, const EndpointConfig& endpoint,
                          const ScaleDefinition& scale, const TranscriptSink& sink);

/// Runs become rows ("run-<index>"); unparseable and failed cells are missing.
[[nodiscard]] ResponseMatrix transcripts_to_matrix(const std::vector<TranscriptRecord>& records,
                                                   const ScaleDefinition& scale,
                                                   const std::string& group_label);

}  // namespace cogalign
