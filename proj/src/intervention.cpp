#include "cogalign/intervention.hpp"

#include <algorithm>
#include <set>

#include "cogalign/errors.hpp"
#include "cogalign/rsa.hpp"

namespace cogalign::intervention {

namespace {

struct RunTally {
    std::size_t correct = 0;
    std::size_t answered = 0;
};

std::map<int, RunTally> tally_runs(const std::vector<TranscriptRecord>& records, const ScaleDefinition& scale) {
    std::map<int, RunTally> runs;
    for (const auto& rec : records) {
        const auto idx = scale.index_of(rec.item_id);
        if (!idx) throw Error(ErrorCode::ScaleMismatch, "item '" + rec.item_id + "' is not in scale " + scale.name);
        auto& tally = runs[rec.run_index];
        if (!scale.items[*idx].keyed() || rec.status != "ok" || !rec.parsed || !rec.parsed->correct) continue;
        ++tally.answered;
        if (*rec.parsed->correct) ++tally.correct;
    }
    return runs;
}

double overall(const std::map<int, RunTally>& runs, std::vector<double>& per_run) {
    RunTally total;
    for (const auto& [run, t] : runs) {
        total.correct += t.correct;
        total.answered += t.answered;
        if (t.answered > 0) per_run.push_back(100.0 * static_cast<double>(t.correct) / static_cast<double>(t.answered));
    }
    if (total.answered == 0) throw Error(ErrorCode::NoKeyedItems, "no parsed keyed responses");
    return round2(100.0 * static_cast<double>(total.correct) / static_cast<double>(total.answered));
}

}  // namespace

AccuracyComparison compare_accuracy(const std::vector<TranscriptRecord>& pre, const std::vector<TranscriptRecord>& post,
                                    const ScaleDefinition& scale) {
    if (pre.empty() || post.empty()) throw Error(ErrorCode::InsufficientData, "both transcript sets must be nonempty");
    AccuracyComparison out;
    out.pre_accuracy = overall(tally_runs(pre, scale), out.pre_run_accuracies);
    out.post_accuracy = overall(tally_runs(post, scale), out.post_run_accuracies);
    out.delta = round2(out.post_accuracy - out.pre_accuracy);
    if (out.pre_run_accuracies.size() < 2 || out.post_run_accuracies.size() < 2) {
        out.ttest_note = std::string(to_string(ErrorCode::TooFewRuns)) + ": each condition needs at least 2 runs";
        return out;
    }
    try {
        out.ttest = stats::welch_t(out.post_run_accuracies, out.pre_run_accuracies);
    } catch (const Error& e) {
        out.ttest_note = e.what();
    }
    return out;
}

StructureComparison compare_structures(const ResponseMatrix& pre, const ResponseMatrix& post,
                                       const ScaleDefinition& scale, double isolation_threshold,
                                       double density_threshold) {
    const std::set<std::string> pre_items(pre.item_ids().begin(), pre.item_ids().end());
    const std::set<std::string> post_items(post.item_ids().begin(), post.item_ids().end());
    if (pre_items != post_items) throw Error(ErrorCode::ItemSetMismatch, "pre and post matrices cover different items");

    // Align post columns with the pre order so the RSM labels coincide.
    std::vector<std::size_t> rows(post.n());
    for (std::size_t r = 0; r < post.n(); ++r) rows[r] = r;
    std::vector<std::size_t> cols;
    for (const auto& id : pre.item_ids()) cols.push_back(*post.item_index(id));
    const ResponseMatrix aligned = post.permuted(rows, cols);

    StructureComparison out;
    try {
        out.rsm_similarity = rsa::rsm_compare(rsa::build_rsm(pre, rsa::Space::ItemSpace),
                                              rsa::build_rsm(aligned, rsa::Space::ItemSpace));
    } catch (const Error& e) {
        out.rsm_note = e.what();
    }

    const auto pre_metrics = sna::network_metrics(sna::build_network(pre, scale), isolation_threshold, density_threshold);
    const auto post_net = sna::build_network(aligned, scale);
    const auto post_metrics = sna::network_metrics(post_net, isolation_threshold, density_threshold);
    out.network_deltas.avg_connectivity = post_metrics.avg_connectivity - pre_metrics.avg_connectivity;
    out.network_deltas.density = post_metrics.density - pre_metrics.density;
    if (pre_metrics.hot_cold_integration && post_metrics.hot_cold_integration) {
        out.network_deltas.hot_cold_integration = *post_metrics.hot_cold_integration - *pre_metrics.hot_cold_integration;
    }
    auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    for (const auto& node : post_net.nodes) {
        out.isolation_resolved[node] = contains(pre_metrics.isolated, node) && !contains(post_metrics.isolated, node);
    }
    return out;
}

}  // namespace cogalign::intervention
