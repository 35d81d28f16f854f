// Regenerates the bundled example data under data/fixtures from fixed seeds.
// Usage: cogalign_make_fixtures <data-dir>

#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "cogalign/io.hpp"
#include "cogalign/llm_admin.hpp"
#include "cogalign/synthgen.hpp"

using namespace cogalign;
namespace fs = std::filesystem;

namespace {

Eigen::MatrixXd core_block(std::size_t core, double strong, double weak) {
    Eigen::MatrixXd phi = synth::equicorrelation(weak);
    for (Eigen::Index j = 0; j < 5; ++j) {
        if (j == static_cast<Eigen::Index>(core)) continue;
        phi(static_cast<Eigen::Index>(core), j) = phi(j, static_cast<Eigen::Index>(core)) = strong;
    }
    return phi;
}

std::string transcripts_from(const ResponseMatrix& m, const ScaleDefinition& scale, const std::string& model,
                             PromptCondition condition, std::size_t refuse_every) {
    std::string out;
    std::size_t cell = 0;
    for (std::size_t r = 0; r < m.n(); ++r) {
        for (std::size_t j = 0; j < m.k(); ++j, ++cell) {
            const Item& item = scale.item(m.item_ids()[j]);
            const auto prompt = render_prompt(item, condition);
            TranscriptRecord rec;
            rec.model = model;
            rec.condition = condition;
            rec.run_index = static_cast<int>(r);
            rec.item_id = item.id;
            rec.system_text = prompt.system_text;
            rec.prompt_text = prompt.user_text;
            rec.timestamp = "2024-06-01T00:00:00Z";
            // refusals stay off Information so its rigid runs stay identical
            if (refuse_every > 0 && cell % refuse_every == refuse_every - 1 && item.dimension != Dimension::Information) {
                rec.raw_completion = "I would rather not pick one.";
            } else {
                rec.raw_completion = "Answer: " + raw_for_score(item, *m.at(r, j));
            }
            rec.parsed = parse_response(rec.raw_completion, item);
            out += transcript_to_jsonl(rec);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: cogalign_make_fixtures <data-dir>\n";
        return 1;
    }
    const fs::path data = argv[1];
    const fs::path dir = data / "fixtures";
    fs::create_directories(dir);
    const ScaleDefinition scale = demo_scale();
    write_text_file(data / "demo_scale.json", serialize_scale(scale));

    synth::PopulationSpec younger;
    younger.n = 200;
    younger.seed = 101;
    younger.factor_correlations = core_block(0, 0.55, 0.15);
    younger.group_label = "younger";
    write_text_file(dir / "younger.csv", write_responses(synth::gen_population(younger, scale), scale, Layout::Wide));

    synth::PopulationSpec older = younger;
    older.seed = 102;
    older.factor_correlations = core_block(3, 0.55, 0.15);
    older.group_label = "older";
    write_text_file(dir / "older.csv", write_responses(synth::gen_population(older, scale), scale, Layout::Long));

    synth::PopulationSpec baseline;
    baseline.n = 12;
    baseline.seed = 201;
    baseline.variability_scale = 0.2;
    baseline.dimension_variability = {1.0, 1.0, 0.0, 1.0, 1.0};
    baseline.rationality = {0.45, 0.45, 0.45, 0.45, 0.45};
    write_text_file(dir / "v3_baseline.jsonl",
                    transcripts_from(synth::gen_llm_like(baseline, scale), scale, "fixture-v3",
                                     PromptCondition::Baseline, 37));

    synth::PopulationSpec dual = baseline;
    dual.seed = 202;
    dual.variability_scale = 0.25;
    dual.dimension_variability = {1.0, 1.0, 1.0, 1.0, 1.0};
    dual.rationality = {0.8, 0.8, 0.8, 0.8, 0.8};
    write_text_file(dir / "v3_dual.jsonl",
                    transcripts_from(synth::gen_llm_like(dual, scale), scale, "fixture-v3",
                                     PromptCondition::DualStrategy, 53));

    const nlohmann::json config = {
        {"scale", "../demo_scale.json"},
        {"groups",
         {{{"label", "younger"}, {"responses", "younger.csv"}},
          {{"label", "older"}, {"responses", "older.csv"}, {"layout", "long"}},
          {{"label", "v3-baseline"}, {"transcripts", "v3_baseline.jsonl"}},
          {{"label", "v3-dual"}, {"transcripts", "v3_dual.jsonl"}}}},
        {"seed", 20240601},
        {"parallel_analysis", {{"sims", 200}, {"percentile", 95}}},
        {"interventions", {{{"model", "fixture-v3"}, {"pre", "v3-baseline"}, {"post", "v3-dual"}}}}};
    write_text_file(dir / "config.json", config.dump(2) + "\n");
    std::cout << "wrote fixtures to " << dir.string() << "\n";
    return 0;
}
