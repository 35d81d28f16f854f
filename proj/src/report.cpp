#include "cogalign/report.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cogalign/errors.hpp"
#include "cogalign/rng.hpp"

#ifndef COGALIGN_VERSION
#define COGALIGN_VERSION "0.0.0"
#endif

namespace cogalign {

using nlohmann::json;

namespace {

constexpr std::string_view kStageNames[] = {"psychometrics", "rsa", "sna", "intervention"};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string_view to_string(MissingPolicy p) { return p == MissingPolicy::Pairwise ? "pairwise" : "listwise"; }

StageError capture(const std::string& stage, const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        return {stage, std::string(to_string(err->code())), err->what()};
    }
    return {stage, "InternalError", e.what()};
}

template <class F>
void guarded(GroupResult& g, const std::string& stage, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        g.errors.push_back(capture(stage, e));
    }
}

Partition effective_partition(const ScaleDefinition& scale, const PipelineConfig& config) {
    Partition p = scale.hot_cold_partition;
    if (config.partition) {
        for (const auto& [dim, tag] : *config.partition) p[dim] = tag;
    }
    return p;
}

ResponseMatrix load_group(const GroupSource& src, const ScaleDefinition& scale, std::size_t& unparseable,
                          std::vector<TranscriptRecord>* transcripts) {
    try {
        if (!src.responses.empty()) {
            auto loaded = load_responses_file(src.responses, scale, src.layout, src.label);
            unparseable = loaded.unparseable_cells;
            return std::move(loaded.matrix);
        }
        auto records = read_transcripts_file(src.transcripts);
        std::vector<TranscriptRecord> kept;
        for (auto& rec : records) {
            if (!src.model.empty() && rec.model != src.model) continue;
            if (src.condition && rec.condition != *src.condition) continue;
            if (rec.status == "ok" && !rec.parsed) ++unparseable;
            kept.push_back(std::move(rec));
        }
        if (kept.empty()) throw Error(ErrorCode::EmptyMatrix, "no transcript records match the group filters");
        auto m = transcripts_to_matrix(kept, scale, src.label);
        *transcripts = std::move(kept);
        return m;
    } catch (const Error& e) {
        throw Error(e.code(), "group '" + src.label + "': " + std::string(e.what()));
    }
}

json fit_to_json(const psychometrics::FitIndices& f) {
    return {{"chi2", f.chi2},
            {"df", f.df},
            {"chi2_over_df", f.chi2_over_df},
            {"rmsea", f.rmsea},
            {"cfi", f.cfi},
            {"tli", f.tli},
            {"n", f.n},
            {"converged", f.converged},
            {"baseline_chi2", f.baseline_chi2},
            {"baseline_df", f.baseline_df},
            {"f_ml", f.f_ml},
            {"iterations", f.iterations}};
}

json rsm_to_json(const rsa::RSM& m) {
    json values = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(opt(m.at(i, j)));
        values.push_back(std::move(row));
    }
    return {{"mode", rsa::to_string(m.mode)}, {"group", m.group_label}, {"labels", m.labels}, {"values", values}};
}

json network_to_json(const sna::CognitiveNetwork& net) {
    json weights = json::array();
    for (std::size_t i = 0; i < net.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < net.size(); ++j) row.push_back(opt(net.weight(i, j)));
        weights.push_back(std::move(row));
    }
    json partition = json::object();
    for (const auto& [node, tag] : net.partition) partition[node] = to_string(tag);
    return {{"group", net.group_label}, {"nodes", net.nodes}, {"partition", partition}, {"weights", weights}};
}

json metrics_to_json(const sna::NetworkMetrics& m, const std::vector<std::string>& nodes) {
    json centrality = json::object();
    for (std::size_t i = 0; i < nodes.size() && i < m.centrality.size(); ++i) centrality[nodes[i]] = m.centrality[i];
    return {{"avg_connectivity", m.avg_connectivity},
            {"centrality", centrality},
            {"density", m.density},
            {"hot_cold_integration", opt(m.hot_cold_integration)},
            {"dominant_core", m.dominant_core},
            {"isolated", m.isolated},
            {"isolation_threshold", m.isolation_threshold},
            {"density_threshold", m.density_threshold},
            {"defined_edges", m.defined_edges}};
}

json errors_to_json(const std::vector<StageError>& errors) {
    json out = json::array();
    for (const auto& e : errors) out.push_back({{"stage", e.stage}, {"code", e.code}, {"message", e.message}});
    return out;
}

json group_to_json(const GroupResult& g) {
    json j;
    j["label"] = g.label;
    j["source"] = g.source;
    j["n"] = g.n;
    j["k"] = g.k;
    j["missing_cells"] = g.missing_cells;
    j["unparseable_cells"] = g.unparseable_cells;
    j["accuracy"] = opt(g.accuracy);
    if (g.reliability) {
        json items = json::array();
        for (const auto& it : g.reliability->per_item) {
            items.push_back({{"item_id", it.item_id},
                             {"corrected_item_total_r", opt(it.corrected_item_total_r)},
                             {"alpha_if_deleted", opt(it.alpha_if_deleted)}});
        }
        j["reliability"] = {{"alpha", g.reliability->alpha}, {"k", g.reliability->k}, {"n", g.reliability->n},
                            {"per_item", items}};
    } else {
        j["reliability"] = nullptr;
    }
    if (g.parallel) {
        j["parallel_analysis"] = {{"retained", g.parallel->retained},
                                  {"observed_eigenvalues", g.parallel->observed_eigs},
                                  {"threshold_eigenvalues", g.parallel->threshold_eigs},
                                  {"n_sims", g.parallel->n_sims},
                                  {"percentile", g.parallel->percentile},
                                  {"seed", g.parallel->seed}};
    } else {
        j["parallel_analysis"] = nullptr;
    }
    j["cfa"] = g.cfa_fit ? fit_to_json(*g.cfa_fit) : json(nullptr);
    j["rsm"] = g.item_rsm ? rsm_to_json(*g.item_rsm) : json(nullptr);
    j["variability"] = g.variability ? json{{"sd", g.variability->sd}, {"mean", g.variability->mean}, {"n", g.variability->n}}
                                     : json(nullptr);
    j["network"] = g.network ? network_to_json(*g.network) : json(nullptr);
    j["metrics"] = g.metrics && g.network ? metrics_to_json(*g.metrics, g.network->nodes) : json(nullptr);
    if (g.structure) {
        j["structure"] = {{"dominant_core", g.structure->dominant_core},
                          {"isolated_modules", g.structure->isolated_modules},
                          {"information_isolated", g.structure->information_isolated}};
    } else {
        j["structure"] = nullptr;
    }
    j["errors"] = errors_to_json(g.errors);
    return j;
}

json ttest_to_json(const std::optional<stats::TTestResult>& t) {
    if (!t) return nullptr;
    return {{"t", t->t}, {"df", t->df}, {"p_two_sided", t->p}};
}

json intervention_to_json(const intervention::InterventionReport& r) {
    json j;
    j["model"] = r.model;
    j["pre_condition"] = r.pre_condition;
    j["post_condition"] = r.post_condition;
    j["pre_group"] = r.pre_group;
    j["post_group"] = r.post_group;
    j["pre_accuracy"] = r.accuracy.pre_accuracy;
    j["post_accuracy"] = r.accuracy.post_accuracy;
    j["delta"] = r.accuracy.delta;
    j["pre_run_accuracies"] = r.accuracy.pre_run_accuracies;
    j["post_run_accuracies"] = r.accuracy.post_run_accuracies;
    j["ttest_unit"] = "per-run accuracy";
    j["ttest"] = ttest_to_json(r.accuracy.ttest);
    j["ttest_note"] = r.accuracy.ttest_note;
    if (r.structure) {
        json resolved = json::object();
        for (const auto& [dim, flag] : r.structure->isolation_resolved) resolved[dim] = flag;
        j["structure"] = {{"rsm_similarity_pre_post", opt(r.structure->rsm_similarity)},
                          {"rsm_note", r.structure->rsm_note},
                          {"network_deltas",
                           {{"avg_connectivity", r.structure->network_deltas.avg_connectivity},
                            {"hot_cold_integration", opt(r.structure->network_deltas.hot_cold_integration)},
                            {"density", r.structure->network_deltas.density}}},
                          {"isolation_resolved", resolved}};
    } else {
        j["structure"] = nullptr;
    }
    j["structure_note"] = r.structure_note;
    return j;
}

void run_group_stages(const PipelineConfig& config, const ScaleDefinition& scale, const ResponseMatrix& raw,
                      std::size_t group_index, GroupResult& g) {
    g.label = raw.group_label;
    g.n = raw.n();
    g.k = raw.k();
    g.missing_cells = raw.missing_count();
    try {
        g.accuracy = accuracy(raw, scale);
    } catch (const Error&) {
        g.accuracy.reset();
    }

    const ResponseMatrix m = config.missing_policy == MissingPolicy::Listwise ? raw.listwise_complete() : raw;

    if (config.stages.contains(Stage::Psychometrics)) {
        guarded(g, "psychometrics.reliability", [&] { g.reliability = psychometrics::cronbach_alpha(m); });
        guarded(g, "psychometrics.parallel_analysis", [&] {
            g.parallel = psychometrics::parallel_analysis(m, config.parallel_sims, config.parallel_percentile,
                                                          derive_seed(config.seed, group_index));
        });
        guarded(g, "psychometrics.cfa", [&] {
            g.cfa_fit = psychometrics::cfa(m, psychometrics::dimension_mapping(m, scale)).fit;
        });
    }
    if (config.stages.contains(Stage::Rsa)) {
        guarded(g, "rsa.item_space", [&] { g.item_rsm = rsa::build_rsm(m, rsa::Space::ItemSpace); });
        guarded(g, "rsa.variability", [&] { g.variability = rsa::group_variability(m, scale); });
    }
    if (config.stages.contains(Stage::Sna)) {
        guarded(g, "sna", [&] {
            g.network = sna::build_network(m, scale);
            g.metrics = sna::network_metrics(*g.network, config.isolation_threshold, config.density_threshold);
            g.structure = sna::classify_structure(*g.metrics);
        });
    }
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<Stage> parse_stage(std::string_view label) {
    for (int i = 0; i < 4; ++i) {
        if (label == kStageNames[i]) return static_cast<Stage>(i);
    }
    return std::nullopt;
}

Partition parse_partition(std::string_view text) {
    Partition out;
    std::string s(text);
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos) config_error("partition entry '" + part + "' must be Dimension=Hot|Cold");
        const auto dim = parse_dimension(part.substr(0, eq));
        const auto tag = parse_system_tag(part.substr(eq + 1));
        if (!dim) config_error("unknown dimension in partition entry '" + part + "'");
        if (!tag) config_error("unknown system tag in partition entry '" + part + "'");
        out[*dim] = *tag;
    }
    return out;
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) config_error("configuration must be an object");
    static const std::set<std::string> known{"scale",     "groups",           "stages",         "seed",
                                             "isolation_threshold", "density_threshold", "partition",
                                             "missing_policy", "parallel_analysis", "interventions"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) config_error("unknown configuration key '" + key + "'");
    }
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    PipelineConfig c;
    try {
        if (j.contains("scale")) c.scale_path = resolve(j.at("scale").get<std::string>());
        if (j.contains("groups")) {
            for (const auto& gj : j.at("groups")) {
                GroupSource g;
                g.label = gj.at("label").get<std::string>();
                if (gj.contains("responses")) g.responses = resolve(gj.at("responses").get<std::string>());
                if (gj.contains("transcripts")) g.transcripts = resolve(gj.at("transcripts").get<std::string>());
                if (g.responses.empty() == g.transcripts.empty()) {
                    config_error("group '" + g.label + "' needs exactly one of responses / transcripts");
                }
                if (gj.contains("layout")) {
                    const auto layout = parse_layout(gj.at("layout").get<std::string>());
                    if (!layout) config_error("group '" + g.label + "': layout must be wide or long");
                    g.layout = *layout;
                }
                g.model = gj.value("model", "");
                if (gj.contains("condition")) {
                    g.condition = parse_condition(gj.at("condition").get<std::string>());
                    if (!g.condition) config_error("group '" + g.label + "': unknown condition");
                }
                c.groups.push_back(std::move(g));
            }
        }
        if (j.contains("stages")) {
            c.stages.clear();
            for (const auto& s : j.at("stages")) {
                const auto stage = parse_stage(s.get<std::string>());
                if (!stage) config_error("unknown stage '" + s.get<std::string>() + "'");
                c.stages.insert(*stage);
            }
        }
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        c.isolation_threshold = j.value("isolation_threshold", c.isolation_threshold);
        c.density_threshold = j.value("density_threshold", c.density_threshold);
        if (j.contains("partition")) {
            Partition p;
            for (const auto& [key, value] : j.at("partition").items()) {
                const auto dim = parse_dimension(key);
                const auto tag = parse_system_tag(value.get<std::string>());
                if (!dim || !tag) config_error("invalid partition entry '" + key + "'");
                p[*dim] = *tag;
            }
            c.partition = p;
        }
        if (j.contains("missing_policy")) {
            const auto p = j.at("missing_policy").get<std::string>();
            if (p == "pairwise") c.missing_policy = MissingPolicy::Pairwise;
            else if (p == "listwise") c.missing_policy = MissingPolicy::Listwise;
            else config_error("missing_policy must be pairwise or listwise");
        }
        if (j.contains("parallel_analysis")) {
            const auto& pa = j.at("parallel_analysis");
            c.parallel_sims = pa.value("sims", c.parallel_sims);
            c.parallel_percentile = pa.value("percentile", c.parallel_percentile);
        }
        if (j.contains("interventions")) {
            for (const auto& ij : j.at("interventions")) {
                c.interventions.push_back(
                    {ij.value("model", ""), ij.at("pre").get<std::string>(), ij.at("post").get<std::string>()});
            }
        }
    } catch (const json::exception& e) {
        config_error(std::string("malformed configuration: ") + e.what());
    }
    return c;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

AlignmentReport run_pipeline(const PipelineConfig& config) {
    if (config.scale_path.empty()) config_error("no scale file configured");
    if (config.groups.empty()) config_error("no response sources configured");
    std::set<std::string> labels;
    for (const auto& g : config.groups) {
        if (!labels.insert(g.label).second) config_error("duplicate group label '" + g.label + "'");
    }
    const ScaleDefinition scale = load_scale_file(config.scale_path);

    std::vector<ResponseMatrix> matrices;
    std::map<std::string, std::vector<TranscriptRecord>> transcripts;
    std::vector<std::size_t> unparseable;
    for (const auto& src : config.groups) {
        std::size_t bad = 0;
        std::vector<TranscriptRecord> records;
        matrices.push_back(load_group(src, scale, bad, &records));
        unparseable.push_back(bad);
        if (!src.transcripts.empty()) transcripts[src.label] = std::move(records);
    }
    AlignmentReport report = run_pipeline_on(config, scale, matrices, transcripts);
    for (std::size_t i = 0; i < report.groups.size(); ++i) {
        report.groups[i].unparseable_cells = unparseable[i];
        report.groups[i].source = config.groups[i].responses.empty() ? "transcripts" : "responses";
    }
    return report;
}

AlignmentReport run_pipeline_on(const PipelineConfig& config, const ScaleDefinition& base_scale,
                                const std::vector<ResponseMatrix>& matrices,
                                const std::map<std::string, std::vector<TranscriptRecord>>& transcripts) {
    if (matrices.empty()) config_error("no response sources configured");
    for (const auto& iv : config.interventions) {
        for (const auto& label : {iv.pre_group, iv.post_group}) {
            if (!transcripts.contains(label)) {
                config_error("intervention group '" + label + "' is not a transcript source");
            }
        }
    }

    ScaleDefinition scale = base_scale;
    scale.hot_cold_partition = effective_partition(base_scale, config);

    AlignmentReport report;
    auto& md = report.metadata;
    md.tool_version = COGALIGN_VERSION;
    md.seed = config.seed;
    md.isolation_threshold = config.isolation_threshold;
    md.density_threshold = config.density_threshold;
    md.partition = scale.hot_cold_partition;
    md.missing_policy = config.missing_policy;
    md.prng = std::string(kRngAlgorithm);
    md.parallel_sims = config.parallel_sims;
    md.parallel_percentile = config.parallel_percentile;
    for (const auto s : config.stages) md.stages.emplace_back(to_string(s));
    md.scale = {scale.name, scale.version};

    report.groups.resize(matrices.size());
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        report.groups[i].source = transcripts.contains(matrices[i].group_label) ? "transcripts" : "responses";
        run_group_stages(config, scale, matrices[i], i, report.groups[i]);
    }

    if (config.stages.contains(Stage::Rsa)) {
        std::vector<const rsa::RSM*> rsms;
        for (const auto& g : report.groups) {
            if (g.item_rsm) {
                report.comparison_labels.push_back(g.label);
                rsms.push_back(&*g.item_rsm);
            }
        }
        const std::size_t n = rsms.size();
        report.comparison.assign(n * n, std::nullopt);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                std::optional<double> v;
                try {
                    v = rsa::rsm_compare(*rsms[a], *rsms[b]);
                } catch (const Error&) {
                    v.reset();
                }
                report.comparison[a * n + b] = v;
                report.comparison[b * n + a] = v;
            }
        }
    }

    if (config.stages.contains(Stage::Intervention)) {
        auto matrix_of = [&](const std::string& label) -> const ResponseMatrix& {
            for (const auto& m : matrices) {
                if (m.group_label == label) return m;
            }
            config_error("unknown group '" + label + "'");
        };
        for (const auto& iv : config.interventions) {
            const auto& pre = transcripts.at(iv.pre_group);
            const auto& post = transcripts.at(iv.post_group);
            intervention::InterventionReport r;
            r.model = iv.model.empty() && !pre.empty() ? pre.front().model : iv.model;
            r.pre_condition = pre.empty() ? "" : std::string(to_string(pre.front().condition));
            r.post_condition = post.empty() ? "" : std::string(to_string(post.front().condition));
            r.pre_group = iv.pre_group;
            r.post_group = iv.post_group;
            try {
                r.accuracy = intervention::compare_accuracy(pre, post, scale);
            } catch (const std::exception& e) {
                report.intervention_errors.push_back(capture(iv.pre_group + "->" + iv.post_group, e));
                continue;
            }
            try {
                r.structure = intervention::compare_structures(matrix_of(iv.pre_group), matrix_of(iv.post_group), scale,
                                                               config.isolation_threshold, config.density_threshold);
            } catch (const std::exception& e) {
                r.structure_note = e.what();
            }
            report.interventions.push_back(std::move(r));
        }
    }
    return report;
}

json report_to_json(const AlignmentReport& report) {
    const auto& md = report.metadata;
    json partition = json::object();
    for (const auto& [dim, tag] : md.partition) partition[std::string(to_string(dim))] = to_string(tag);
    json j;
    j["metadata"] = {{"tool_version", md.tool_version},
                     {"seed", md.seed},
                     {"isolation_threshold", md.isolation_threshold},
                     {"density_threshold", md.density_threshold},
                     {"partition", partition},
                     {"missing_data_policy", to_string(md.missing_policy)},
                     {"psychometrics_rows", "listwise complete rows"},
                     {"prng", md.prng},
                     {"parallel_analysis", {{"sims", md.parallel_sims}, {"percentile", md.parallel_percentile}}},
                     {"stages", md.stages},
                     {"scale", {{"name", md.scale.name}, {"version", md.scale.version}}},
                     {"correlation", "pearson"},
                     {"p_values", "two-sided"},
                     {"ttest_unit", "per-run accuracy"},
                     {"alpha", "raw"},
                     {"efa", "principal components + varimax"},
                     {"cfa_input", "item correlation matrix"},
                     {"cfa_baseline", "independence"},
                     {"mds_distance", "sqrt(2(1-r))"}};

    json groups = json::array();
    json table1 = json::array();
    json table2 = json::array();
    for (const auto& g : report.groups) {
        groups.push_back(group_to_json(g));
        if (g.metrics) {
            table1.push_back({{"group", g.label},
                              {"avg_connectivity", g.metrics->avg_connectivity},
                              {"hot_cold_integration", opt(g.metrics->hot_cold_integration)},
                              {"density", g.metrics->density}});
        }
        if (g.structure) {
            table2.push_back({{"group", g.label},
                              {"dominant_core", g.structure->dominant_core},
                              {"information_isolated", g.structure->information_isolated},
                              {"isolated_modules", g.structure->isolated_modules}});
        }
    }
    j["groups"] = std::move(groups);

    const std::size_t n = report.comparison_labels.size();
    json values = json::array();
    for (std::size_t a = 0; a < n; ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < n; ++b) row.push_back(opt(report.comparison[a * n + b]));
        values.push_back(std::move(row));
    }
    j["rsm_comparison"] = {{"labels", report.comparison_labels}, {"values", values}};
    j["table1_connectivity"] = std::move(table1);
    j["table2_structure"] = std::move(table2);

    json interventions = json::array();
    for (const auto& r : report.interventions) interventions.push_back(intervention_to_json(r));
    j["interventions"] = std::move(interventions);
    j["intervention_errors"] = errors_to_json(report.intervention_errors);
    return j;
}

std::string serialize_report(const AlignmentReport& report) { return report_to_json(report).dump(2) + "\n"; }

}  // namespace cogalign
