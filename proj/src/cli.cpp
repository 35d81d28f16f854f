#include "cogalign/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cogalign/errors.hpp"
#include "cogalign/io.hpp"
#include "cogalign/llm_admin.hpp"
#include "cogalign/mock_server.hpp"
#include "cogalign/report.hpp"
#include "cogalign/synthgen.hpp"

#ifndef COGALIGN_VERSION
#define COGALIGN_VERSION "0.0.0"
#endif

namespace cogalign {

namespace {

[[noreturn]] void usage_error(const std::string& what) { throw Error(ErrorCode::UsageError, what); }

std::pair<std::string, std::string> split_assignment(const std::string& text, const std::string& flag) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        usage_error(flag + " expects <label>=<path>, got '" + text + "'");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

std::set<Stage> parse_stage_list(const std::string& text) {
    std::set<Stage> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        const auto stage = parse_stage(token);
        if (!stage) usage_error("unknown stage '" + token + "'");
        out.insert(*stage);
    }
    return out;
}

std::set<OutputFormat> formats_flag(const std::string& text) {
    try {
        return parse_formats(text);
    } catch (const Error& e) {
        usage_error(std::string(e.what()));
    }
}

Partition partition_flag(const std::string& text) {
    try {
        return parse_partition(text);
    } catch (const Error& e) {
        usage_error(std::string(e.what()));
    }
}

Layout layout_flag(const std::string& text) {
    const auto layout = parse_layout(text);
    if (!layout) usage_error("layout must be wide or long");
    return *layout;
}

std::optional<PromptCondition> condition_flag(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto c = parse_condition(text);
    if (!c) usage_error("unknown condition '" + text + "'");
    return c;
}

void print_manifest(std::ostream& out, const std::filesystem::path& dest, const std::vector<ManifestEntry>& manifest) {
    for (const auto& m : manifest) out << (dest / m.path).string() << '\n';
}

struct SynthArgs {
    std::string kind = "human";
    std::string scale_path;
    std::string scale_out;
    std::string out;
    std::string label;
    std::string layout = "wide";
    std::size_t n = 0;
    std::uint64_t seed = 1;
    double loading = 0.6;
    double factor_correlation = 0.0;
    double variability = -1.0;
    std::string dimension_variability;
    double keyed_fraction = 0.5;
    double rationality = 0.6;
    std::size_t items_per_dimension = 4;
    int likert_levels = 5;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    synth::PopulationSpec spec;
    const bool llm = a.kind == "llm";
    if (!llm && a.kind != "human") usage_error("--kind must be human or llm");
    spec.n = a.n > 0 ? a.n : (llm ? 30 : 330);
    spec.seed = a.seed;
    spec.loadings.fill(a.loading);
    spec.factor_correlations = synth::equicorrelation(a.factor_correlation);
    spec.variability_scale = a.variability >= 0.0 ? a.variability : (llm ? 0.2 : 1.0);
    spec.keyed_fraction = a.keyed_fraction;
    spec.rationality.fill(a.rationality);
    spec.items_per_dimension = a.items_per_dimension;
    spec.group_label = a.label.empty() ? a.kind : a.label;
    if (!a.dimension_variability.empty()) {
        std::stringstream ss(a.dimension_variability);
        std::string entry;
        while (std::getline(ss, entry, ',')) {
            const auto [dim_label, value] = split_assignment(entry, "--dimension-variability");
            const auto dim = parse_dimension(dim_label);
            if (!dim) usage_error("unknown dimension '" + dim_label + "'");
            try {
                spec.dimension_variability[static_cast<std::size_t>(*dim)] = std::stod(value);
            } catch (const std::exception&) {
                usage_error("--dimension-variability value '" + value + "' is not a number");
            }
        }
    }
    const ScaleDefinition scale = a.scale_path.empty() ? synth::synth_scale(spec, a.likert_levels)
                                                       : load_scale_file(a.scale_path);
    const ResponseMatrix m = llm ? synth::gen_llm_like(spec, scale) : synth::gen_population(spec, scale);
    write_text_file(a.out, write_responses(m, scale, layout_flag(a.layout)));
    if (!a.scale_out.empty()) write_text_file(a.scale_out, serialize_scale(scale));
    out << "wrote " << m.n() << " x " << m.k() << " responses to " << a.out << '\n';
    return kExitOk;
}

struct AdministerArgs {
    std::string scale_path;
    std::string endpoint;
    std::string model = "model";
    std::string auth_env;
    std::string condition = "baseline";
    int runs = 30;
    std::uint64_t seed = 0;
    int parallelism = 1;
    double timeout = 60.0;
    int max_retries = 3;
    double backoff_base = 1.0;
    std::string mitigation_file;
    std::string out;
};

int cmd_administer(const AdministerArgs& a, std::ostream& out) {
    const ScaleDefinition scale = load_scale_file(a.scale_path);
    SessionPlan plan;
    plan.scale_ref = {scale.name, scale.version};
    plan.condition = *condition_flag(a.condition);
    plan.runs = a.runs;
    plan.seed = a.seed;
    if (!a.mitigation_file.empty()) plan.mitigation_block = read_text_file(a.mitigation_file);

    EndpointConfig endpoint;
    endpoint.base_url = a.endpoint;
    endpoint.model_name = a.model;
    endpoint.auth_env = a.auth_env;
    endpoint.timeout_seconds = a.timeout;
    endpoint.max_retries = a.max_retries;
    endpoint.parallelism = a.parallelism;
    endpoint.backoff_base_seconds = a.backoff_base;

    std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + a.out);
    const SessionSummary summary = administer(plan, endpoint, scale, [&](const TranscriptRecord& rec) {
        file << transcript_to_jsonl(rec);
        file.flush();
    });
    out << "completed " << summary.completed << ", failed " << summary.failed << ", unparseable "
        << summary.unparseable << ", retries " << summary.total_retries;
    if (summary.accuracy) out << ", accuracy " << *summary.accuracy << "%";
    out << '\n';
    return kExitOk;
}

struct AnalyzeArgs {
    std::string config;
    std::string scale;
    std::vector<std::string> responses;
    std::vector<std::string> transcripts;
    std::string layout = "wide";
    std::string stages;
    std::optional<std::uint64_t> seed;
    std::optional<double> isolation_threshold;
    std::optional<double> density_threshold;
    std::string partition;
    std::string formats = "json";
    std::string out;
    bool listwise = false;
    std::optional<std::size_t> parallel_sims;
    std::vector<std::string> interventions;
};

void apply_overrides(const AnalyzeArgs& a, PipelineConfig& c) {
    if (!a.scale.empty()) c.scale_path = a.scale;
    if (!a.responses.empty() || !a.transcripts.empty()) c.groups.clear();
    for (const auto& r : a.responses) {
        const auto [label, path] = split_assignment(r, "--responses");
        GroupSource g;
        g.label = label;
        g.responses = path;
        g.layout = layout_flag(a.layout);
        c.groups.push_back(std::move(g));
    }
    for (const auto& t : a.transcripts) {
        const auto [label, path] = split_assignment(t, "--transcripts");
        GroupSource g;
        g.label = label;
        g.transcripts = path;
        c.groups.push_back(std::move(g));
    }
    if (!a.stages.empty()) c.stages = parse_stage_list(a.stages);
    if (a.seed) c.seed = *a.seed;
    if (a.isolation_threshold) c.isolation_threshold = *a.isolation_threshold;
    if (a.density_threshold) c.density_threshold = *a.density_threshold;
    if (!a.partition.empty()) c.partition = partition_flag(a.partition);
    if (a.listwise) c.missing_policy = MissingPolicy::Listwise;
    if (a.parallel_sims) c.parallel_sims = *a.parallel_sims;
    if (!a.interventions.empty()) c.interventions.clear();
    for (const auto& iv : a.interventions) {
        const auto [pre, post] = split_assignment(iv, "--intervention");
        c.interventions.push_back({"", pre, post});
    }
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto formats = formats_flag(a.formats);
    PipelineConfig config = a.config.empty() ? PipelineConfig{} : load_config_file(a.config);
    apply_overrides(a, config);
    const AlignmentReport report = run_pipeline(config);
    const auto manifest = emit_report(report, formats, a.out);
    print_manifest(out, a.out, manifest);
    return kExitOk;
}

struct InterveneArgs {
    std::string scale;
    std::string pre;
    std::string post;
    std::string model;
    std::string pre_condition;
    std::string post_condition;
    std::uint64_t seed = 20240601;
    double isolation_threshold = sna::kDefaultIsolationThreshold;
    double density_threshold = sna::kDefaultDensityThreshold;
    std::string formats = "json,csv";
    std::string out;
};

int cmd_intervene(const InterveneArgs& a, std::ostream& out) {
    const auto formats = formats_flag(a.formats);
    PipelineConfig config;
    config.scale_path = a.scale;
    config.seed = a.seed;
    config.isolation_threshold = a.isolation_threshold;
    config.density_threshold = a.density_threshold;
    config.stages = {Stage::Rsa, Stage::Sna, Stage::Intervention};
    GroupSource pre;
    pre.label = "pre";
    pre.transcripts = a.pre;
    pre.model = a.model;
    pre.condition = condition_flag(a.pre_condition);
    GroupSource post = pre;
    post.label = "post";
    post.transcripts = a.post;
    post.condition = condition_flag(a.post_condition);
    config.groups = {pre, post};
    config.interventions = {{a.model, "pre", "post"}};

    const AlignmentReport report = run_pipeline(config);
    for (const auto& e : report.intervention_errors) throw Error(ErrorCode::InsufficientData, e.message);
    const auto& r = report.interventions.at(0);
    char line[160];
    std::snprintf(line, sizeof line, "pre %.2f%% -> post %.2f%%, delta %+.2f points", r.accuracy.pre_accuracy,
                  r.accuracy.post_accuracy, r.accuracy.delta);
    out << line;
    if (r.accuracy.ttest) {
        std::snprintf(line, sizeof line, ", Welch t = %.4f, df = %.2f, p = %.4g", r.accuracy.ttest->t,
                      r.accuracy.ttest->df, r.accuracy.ttest->p);
        out << line;
    } else {
        out << " (" << r.accuracy.ttest_note << ")";
    }
    out << '\n';
    if (!a.out.empty()) print_manifest(out, a.out, emit_report(report, formats, a.out));
    return kExitOk;
}

int cmd_report(const std::string& input, const std::string& formats_text, const std::string& dest, std::ostream& out) {
    const auto formats = formats_flag(formats_text);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(input));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, input + ": " + e.what());
    }
    print_manifest(out, dest, emit_report_json(doc, formats, dest));
    return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
    const ScaleDefinition scale = load_scale_file(path);
    for (const auto& v : validate_scale(scale).violations) {
        if (v.warning) out << "warning: " << v.message << '\n';
    }
    out << scale.name << ' ' << scale.version << ": " << scale.items.size() << " items valid\n";
    return kExitOk;
}

int cmd_mock_server(const std::string& scale_path, const std::string& host, int port, const std::string& behavior,
                    const MockServer::Options& base, std::ostream& out) {
    MockServer::Options options = base;
    if (behavior == "echo-key") options.behavior = MockServer::Behavior::EchoKey;
    else if (behavior == "fixed") options.behavior = MockServer::Behavior::FixedAnswer;
    else if (behavior == "rate-limit") options.behavior = MockServer::Behavior::RateLimitThenSucceed;
    else if (behavior == "garbage") options.behavior = MockServer::Behavior::GarbageText;
    else usage_error("--behavior must be echo-key, fixed, rate-limit or garbage");
    MockServer server(load_scale_file(scale_path), options);
    out << "serving on http://" << host << ':' << port << "/v1\n" << std::flush;
    server.listen(host, port);
    return kExitOk;
}

int exit_code(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Usage: return kExitUsage;
        case ErrorCategory::Endpoint: return kExitEndpoint;
        case ErrorCategory::Data: return kExitData;
    }
    return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cognitive-bias alignment toolkit", "cogalign"};
    app.set_version_flag("--version", COGALIGN_VERSION);
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-scale", "Check a scale file");
    validate->add_option("scale", validate_path, "Scale file")->required();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic response file");
    synth->add_option("--kind", synth_args.kind, "human or llm")->capture_default_str();
    synth->add_option("--scale", synth_args.scale_path, "Existing scale (otherwise one is synthesized)");
    synth->add_option("--scale-out", synth_args.scale_out, "Write the scale used");
    synth->add_option("--out", synth_args.out, "Response file to write")->required();
    synth->add_option("--label", synth_args.label, "Group label");
    synth->add_option("--layout", synth_args.layout, "wide or long")->capture_default_str();
    synth->add_option("--n", synth_args.n, "Respondents or runs (default 330 human, 30 llm)");
    synth->add_option("--seed", synth_args.seed)->capture_default_str();
    synth->add_option("--loading", synth_args.loading)->capture_default_str();
    synth->add_option("--factor-correlation", synth_args.factor_correlation, "Common inter-factor correlation")
        ->capture_default_str();
    synth->add_option("--variability", synth_args.variability, "Dispersion multiplier (default 1 human, 0.2 llm)");
    synth->add_option("--dimension-variability", synth_args.dimension_variability, "e.g. Information=0");
    synth->add_option("--keyed-fraction", synth_args.keyed_fraction)->capture_default_str();
    synth->add_option("--rationality", synth_args.rationality)->capture_default_str();
    synth->add_option("--items-per-dimension", synth_args.items_per_dimension)->capture_default_str();
    synth->add_option("--likert-levels", synth_args.likert_levels)->capture_default_str();

    AdministerArgs adm;
    auto* administer_cmd = app.add_subcommand("administer", "Administer a scale to a chat-completions endpoint");
    administer_cmd->add_option("--scale", adm.scale_path)->required();
    administer_cmd->add_option("--endpoint", adm.endpoint, "Base URL, e.g. http://host/v1")->required();
    administer_cmd->add_option("--model", adm.model)->capture_default_str();
    administer_cmd->add_option("--auth-env", adm.auth_env, "Environment variable holding the bearer token");
    administer_cmd->add_option("--condition", adm.condition, "baseline, role-play or dual-strategy")
        ->capture_default_str();
    administer_cmd->add_option("--runs", adm.runs)->capture_default_str();
    administer_cmd->add_option("--seed", adm.seed)->capture_default_str();
    administer_cmd->add_option("--parallelism", adm.parallelism)->capture_default_str();
    administer_cmd->add_option("--timeout", adm.timeout, "Seconds")->capture_default_str();
    administer_cmd->add_option("--max-retries", adm.max_retries)->capture_default_str();
    administer_cmd->add_option("--backoff-base", adm.backoff_base, "Seconds")->capture_default_str();
    administer_cmd->add_option("--mitigation-file", adm.mitigation_file);
    administer_cmd->add_option("--out", adm.out, "Transcript file (JSONL)")->required();

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Run the analysis pipeline and emit a report");
    analyze->add_option("--config", an.config, "Run configuration file");
    analyze->add_option("--scale", an.scale);
    analyze->add_option("--responses", an.responses, "<label>=<path>")->take_all();
    analyze->add_option("--transcripts", an.transcripts, "<label>=<path>")->take_all();
    analyze->add_option("--layout", an.layout, "Layout of --responses files")->capture_default_str();
    analyze->add_option("--stages", an.stages, "psychometrics,rsa,sna,intervention");
    analyze->add_option("--seed", an.seed);
    analyze->add_option("--isolation-threshold", an.isolation_threshold);
    analyze->add_option("--density-threshold", an.density_threshold);
    analyze->add_option("--partition", an.partition, "e.g. Belief=Hot,Social=Hot,Calculation=Cold");
    analyze->add_option("--formats", an.formats, "json,csv,svg-heatmap,dot-graph")->capture_default_str();
    analyze->add_option("--out", an.out, "Output directory")->required();
    analyze->add_flag("--listwise", an.listwise, "Listwise instead of pairwise deletion");
    analyze->add_option("--parallel-sims", an.parallel_sims);
    analyze->add_option("--intervention", an.interventions, "<pre label>=<post label>")->take_all();

    InterveneArgs iv;
    auto* intervene = app.add_subcommand("intervene", "Compare two administration conditions");
    intervene->add_option("--scale", iv.scale)->required();
    intervene->add_option("--pre", iv.pre, "Pre-condition transcripts")->required();
    intervene->add_option("--post", iv.post, "Post-condition transcripts")->required();
    intervene->add_option("--model", iv.model, "Keep only this model's records");
    intervene->add_option("--pre-condition", iv.pre_condition);
    intervene->add_option("--post-condition", iv.post_condition);
    intervene->add_option("--seed", iv.seed)->capture_default_str();
    intervene->add_option("--isolation-threshold", iv.isolation_threshold)->capture_default_str();
    intervene->add_option("--density-threshold", iv.density_threshold)->capture_default_str();
    intervene->add_option("--formats", iv.formats)->capture_default_str();
    intervene->add_option("--out", iv.out, "Output directory (optional)");

    std::string report_input;
    std::string report_formats = "json,csv,svg-heatmap,dot-graph";
    std::string report_out;
    auto* report_cmd = app.add_subcommand("report", "Re-emit renderings from a saved JSON report");
    report_cmd->add_option("--input", report_input)->required();
    report_cmd->add_option("--formats", report_formats)->capture_default_str();
    report_cmd->add_option("--out", report_out)->required();

    std::string mock_scale;
    std::string mock_host = "127.0.0.1";
    int mock_port = 8089;
    std::string mock_behavior = "echo-key";
    MockServer::Options mock_options;
    auto* mock = app.add_subcommand("mock-server", "Serve a local chat-completions stand-in");
    mock->add_option("--scale", mock_scale)->required();
    mock->add_option("--host", mock_host)->capture_default_str();
    mock->add_option("--port", mock_port)->capture_default_str();
    mock->add_option("--behavior", mock_behavior, "echo-key, fixed, rate-limit, garbage")->capture_default_str();
    mock->add_option("--fixed-answer", mock_options.fixed_answer)->capture_default_str();
    mock->add_option("--rate-limit-count", mock_options.rate_limit_count)->capture_default_str();
    mock->add_option("--token", mock_options.required_token, "Required bearer token");

    std::vector<std::string> argv_store;
    argv_store.emplace_back("cogalign");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << COGALIGN_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(validate_path, out);
        if (synth->parsed()) return cmd_synth(synth_args, out);
        if (administer_cmd->parsed()) return cmd_administer(adm, out);
        if (analyze->parsed()) return cmd_analyze(an, out);
        if (intervene->parsed()) return cmd_intervene(iv, out);
        if (report_cmd->parsed()) return cmd_report(report_input, report_formats, report_out, out);
        if (mock->parsed()) return cmd_mock_server(mock_scale, mock_host, mock_port, mock_behavior, mock_options, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace cogalign
