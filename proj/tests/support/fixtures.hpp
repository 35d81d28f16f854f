#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "cogalign/llm_admin.hpp"
#include "cogalign/response_matrix.hpp"
#include "cogalign/scale.hpp"
#include "cogalign/sna.hpp"

namespace fixtures {

std::filesystem::path source_dir();
std::filesystem::path data_dir();
std::filesystem::path cli_path();
/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

/// A -- B 0.6, A -- C 0.2, B -- C 0.0 with A Hot and B, C Cold.
cogalign::sna::CognitiveNetwork three_node_network();

/// `count` four-option keyed items (K1..), dimensions assigned round-robin.
cogalign::ScaleDefinition keyed_scale(std::size_t count);

struct RunSpec {
    std::size_t correct = 0;
    std::size_t unparseable = 0;
};

/// One record per (run, keyed item): the first `correct` items answer the key, the next
/// `unparseable` answer free text, the rest answer a wrong option.
std::vector<cogalign::TranscriptRecord> make_session(const cogalign::ScaleDefinition& scale, const std::string& model,
                                                     cogalign::PromptCondition condition,
                                                     const std::vector<RunSpec>& runs);

/// Smallest run layout (>= 2 runs of `items_per_run`) whose pooled accuracy rounds to `target`.
std::vector<RunSpec> runs_for_accuracy(double target, std::size_t items_per_run);

cogalign::ResponseMatrix matrix_from(const Eigen::MatrixXd& data, const std::string& label = "group");

}  // namespace fixtures
