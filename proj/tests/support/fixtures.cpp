#include "fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace fixtures {

using namespace cogalign;

std::filesystem::path source_dir() { return COGALIGN_SOURCE_DIR; }
std::filesystem::path data_dir() { return source_dir() / "data"; }
std::filesystem::path cli_path() { return COGALIGN_CLI_PATH; }

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("cogalign_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

sna::CognitiveNetwork three_node_network() {
    sna::CognitiveNetwork net({"A", "B", "C"});
    net.set_weight(0, 1, 0.6);
    net.set_weight(0, 2, 0.2);
    net.set_weight(1, 2, 0.0);
    net.partition = {{"A", SystemTag::Hot}, {"B", SystemTag::Cold}, {"C", SystemTag::Cold}};
    net.group_label = "fixture";
    return net;
}

ScaleDefinition keyed_scale(std::size_t count) {
    ScaleDefinition scale;
    scale.name = "keyed-fixture";
    scale.version = "1";
    scale.hot_cold_partition = default_partition();
    scale.bias_catalog = {"Fixture bias"};
    for (std::size_t i = 0; i < count; ++i) {
        Item item;
        item.id = "K" + std::to_string(i + 1);
        item.text = "Fixture scenario " + std::to_string(i + 1) + ".";
        item.dimension = kDimensions[i % kDimensions.size()];
        item.bias_name = "Fixture bias";
        item.format = MultipleChoice{{"A", "B", "C", "D"}, "B"};
        scale.items.push_back(std::move(item));
    }
    return scale;
}

std::vector<TranscriptRecord> make_session(const ScaleDefinition& scale, const std::string& model,
                                           PromptCondition condition, const std::vector<RunSpec>& runs) {
    std::vector<TranscriptRecord> out;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        std::size_t position = 0;
        for (const auto& item : scale.items) {
            if (!item.keyed()) continue;
            const auto prompt = render_prompt(item, condition);
            TranscriptRecord rec;
            rec.model = model;
            rec.condition = condition;
            rec.run_index = static_cast<int>(r);
            rec.item_id = item.id;
            rec.system_text = prompt.system_text;
            rec.prompt_text = prompt.user_text;
            const auto& mc = std::get<MultipleChoice>(item.format);
            if (position < runs[r].correct) {
                rec.raw_completion = mc.rational_key;
            } else if (position < runs[r].correct + runs[r].unparseable) {
                rec.raw_completion = "I would rather not say.";
            } else {
                rec.raw_completion = mc.options[0] == mc.rational_key ? mc.options[1] : mc.options[0];
            }
            rec.parsed = parse_response(rec.raw_completion, item);
            rec.timestamp = "2024-01-01T00:00:00.000Z";
            out.push_back(std::move(rec));
            ++position;
        }
    }
    return out;
}

std::vector<RunSpec> runs_for_accuracy(double target, std::size_t items_per_run) {
    for (std::size_t runs = 2; runs <= 12; ++runs) {
        const std::size_t total = runs * items_per_run;
        for (std::size_t skipped = 0; skipped + 2 * runs <= total; ++skipped) {
            const std::size_t answered = total - skipped;
            const auto correct = static_cast<std::size_t>(std::llround(target * static_cast<double>(answered) / 100.0));
            if (correct > answered || round2(100.0 * static_cast<double>(correct) / static_cast<double>(answered)) != target) {
                continue;
            }
            std::vector<RunSpec> out(runs);
            for (std::size_t r = 0; r < runs; ++r) out[r].unparseable = skipped / runs + (r < skipped % runs ? 1 : 0);
            for (std::size_t r = 0; r < runs; ++r) out[r].correct = correct / runs + (r < correct % runs ? 1 : 0);
            // Move one correct answer between the first two runs so per-run accuracies differ.
            if (out[1].correct > 0 && out[0].correct + out[0].unparseable < items_per_run) {
                ++out[0].correct;
                --out[1].correct;
            }
            bool feasible = true;
            for (const auto& spec : out) feasible = feasible && spec.correct + spec.unparseable <= items_per_run;
            if (feasible) return out;
        }
    }
    throw std::runtime_error("no run layout reaches the requested accuracy");
}

ResponseMatrix matrix_from(const Eigen::MatrixXd& data, const std::string& label) {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    for (Eigen::Index i = 0; i < data.rows(); ++i) rows.push_back("r" + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < data.cols(); ++j) cols.push_back("i" + std::to_string(j + 1));
    ResponseMatrix m(label, rows, cols, {"fixture", "1"});
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), data(i, j));
        }
    }
    return m;
}

}  // namespace fixtures
