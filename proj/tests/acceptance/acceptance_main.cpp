// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cogalign/errors.hpp"
#include "cogalign/intervention.hpp"
#include "cogalign/io.hpp"
#include "cogalign/llm_admin.hpp"
#include "cogalign/mock_server.hpp"
#include "cogalign/psychometrics.hpp"
#include "cogalign/report.hpp"
#include "cogalign/rng.hpp"
#include "cogalign/rsa.hpp"
#include "cogalign/sna.hpp"
#include "cogalign/stats.hpp"
#include "cogalign/synthgen.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cogalign;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: " << what << "; ";
            pass = false;
        }
    }
};

std::vector<double> draw(RngStream& rng, std::size_t n, bool ties) {
    std::vector<double> v(n);
    for (auto& x : v) x = ties ? std::floor(1.0 + 5.0 * rng.uniform()) : rng.normal();
    return v;
}

// -- 1 ---------------------------------------------------------------------

void kernel_exactness(Outcome& out) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RngStream rng(seed);
        const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform() * 56);
        const bool ties = seed % 2 == 0;
        const auto x = draw(rng, n, ties);
        auto y = draw(rng, n, ties);
        for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];

        const double e1 = std::abs(stats::pearson(x, y).r - oracle::pearson(x, y));
        const double e2 = std::abs(stats::spearman(x, y).r - oracle::spearman(x, y));
        const auto b = draw(rng, 4 + static_cast<std::size_t>(rng.uniform() * 30), false);
        const auto w = stats::welch_t(x, b);
        const auto o = oracle::welch(x, b);
        const double e3 = std::max({std::abs(w.t - o.t), std::abs(w.df - o.df), std::abs(w.p - o.p)});
        const double t = -6.0 + 12.0 * rng.uniform();
        const double df = 1.0 + 59.0 * rng.uniform();
        const double e4 = std::abs(stats::student_t_sf(t, df) - oracle::t_sf(t, df));
        const double e = std::max({e1, e2, e3, e4});
        worst = std::max(worst, e);
        out.require(e <= 1e-9, "seed " + std::to_string(seed) + " kernel error " + std::to_string(e));
    }
    double worst_eig = 0.0;
    for (std::uint64_t seed = 1; seed <= 49; ++seed) {
        RngStream rng(1000 + seed);
        const auto n = static_cast<Eigen::Index>(seed + 1);
        Eigen::MatrixXd a(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
        const auto e = stats::sym_eigen(a);
        const Eigen::MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        const double rel = (back - a).norm() / a.norm();
        worst_eig = std::max(worst_eig, rel);
        out.require(rel <= 1e-8, "sym_eigen " + std::to_string(n) + "x" + std::to_string(n));
    }
    const double secs = seconds_since(t0);
    out.require(secs < 10.0, "runtime");
    out.detail << "max kernel error " << worst << ", max eigen rel error " << worst_eig << ", " << secs << " s";
}

// -- 2 ---------------------------------------------------------------------

void reliability(Outcome& out) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RngStream rng(seed);
        Eigen::MatrixXd d(20, 10);
        const double common = 0.2 + rng.uniform();
        for (Eigen::Index i = 0; i < 20; ++i) {
            const double f = rng.normal();
            for (Eigen::Index j = 0; j < 10; ++j) d(i, j) = common * f + rng.normal();
        }
        const double e = std::abs(psychometrics::alpha_variance_form(d) - oracle::alpha_covariance(d));
        worst = std::max(worst, e);
        out.require(e <= 1e-12, "variance vs covariance form, seed " + std::to_string(seed));
    }
    Eigen::MatrixXd parallel(5, 3);
    parallel << 1, 1, 1, 2, 2, 2, 4, 4, 4, 3, 3, 3, 5, 5, 5;
    const double a1 = psychometrics::cronbach_alpha(fixtures::matrix_from(parallel)).alpha;
    out.require(a1 == 1.0, "alpha on parallel items");

    int monotone = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        // lengthening a test with parallel copies never lowers alpha
        RngStream rng(500 + seed);
        Eigen::MatrixXd d(30, 4);
        for (Eigen::Index i = 0; i < 30; ++i) {
            const double f = rng.normal();
            for (Eigen::Index j = 0; j < 4; ++j) d(i, j) = 0.7 * f + rng.normal();
        }
        Eigen::MatrixXd doubled(30, 8);
        doubled << d, d;
        Eigen::MatrixXd tripled(30, 12);
        tripled << d, d, d;
        const double x1 = psychometrics::alpha_variance_form(d);
        const double x2 = psychometrics::alpha_variance_form(doubled);
        const double x3 = psychometrics::alpha_variance_form(tripled);
        monotone += x1 <= x2 && x2 <= x3;
    }
    out.require(monotone == 20, "Spearman-Brown monotonicity");
    out.detail << "max form difference " << worst << ", parallel alpha " << a1 << ", monotone " << monotone << "/20";
}

// -- 3 ---------------------------------------------------------------------

void factor_recovery(Outcome& out) {
    const auto t0 = Clock::now();
    int five = 0;
    int fits = 0;
    int lower = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::PopulationSpec spec;
        spec.n = 330;
        spec.seed = seed;
        spec.keyed_fraction = 0.0;
        spec.factor_correlations = synth::equicorrelation(0.3);
        const auto scale = synth::synth_scale(spec);
        const auto m = synth::gen_population(spec, scale);
        five += psychometrics::parallel_analysis(m, 1000, 95.0, seed).retained == 5;
        const auto truth = psychometrics::cfa(m, psychometrics::dimension_mapping(m, scale)).fit;
        const auto one = psychometrics::cfa(m, psychometrics::FactorMapping(m.k(), 0)).fit;
        fits += truth.rmsea < 0.05 && truth.cfi > 0.95;
        lower += one.cfi < truth.cfi;
    }
    const double secs = seconds_since(t0);
    out.require(five >= 18, "parallel analysis retained 5");
    out.require(fits >= 18, "true-model fit");
    out.require(lower == 20, "one-factor CFI lower");
    out.require(secs < 120.0, "runtime");
    out.detail << "5 retained " << five << "/20, fit " << fits << "/20, 1-factor lower " << lower << "/20, " << secs
               << " s";
}

// -- 4 ---------------------------------------------------------------------

void degenerate_fit(Outcome& out) {
    for (int factors : {1, 2, 5}) {
        const int per = 4;
        const int p = factors * per;
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, factors);
        psychometrics::FactorMapping mapping(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            l(i, i / per) = 0.55 + 0.05 * (i % per);
            mapping[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i / per);
        }
        Eigen::MatrixXd phi = Eigen::MatrixXd::Constant(factors, factors, 0.3);
        phi.diagonal().setOnes();
        Eigen::MatrixXd s = l * phi * l.transpose();
        s.diagonal().setOnes();
        const auto fit = psychometrics::cfa_from_matrix(s, 330, mapping).fit;
        const std::string tag = std::to_string(factors) + " factor(s)";
        out.require(fit.chi2 == 0.0, tag + " chi2");
        out.require(fit.rmsea == 0.0, tag + " rmsea");
        out.require(fit.cfi == 1.0, tag + " cfi");
        out.require(fit.chi2_over_df == fit.chi2 / fit.df, tag + " chi2/df");
        out.detail << tag << ": chi2 " << fit.chi2 << " rmsea " << fit.rmsea << " cfi " << fit.cfi << "; ";
    }
}

// -- 5 ---------------------------------------------------------------------

bool invariants_hold(const rsa::RSM& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        // constant vectors leave the whole row undefined, diagonal included
        if (r.at(i, i) && *r.at(i, i) != 1.0) return false;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (!r.at(i, i) && r.at(i, j)) return false;
            if (r.at(i, j) != r.at(j, i)) return false;
            if (r.at(i, j) && (*r.at(i, j) < -1.0 || *r.at(i, j) > 1.0)) return false;
        }
    }
    return true;
}

void rsa_properties(Outcome& out) {
    std::vector<rsa::RSM> all;
    const auto report = run_pipeline(load_config_file(fixtures::data_dir() / "fixtures" / "config.json"));
    for (const auto& g : report.groups)
        if (g.item_rsm) all.push_back(*g.item_rsm);
    out.require(all.size() == report.groups.size(), "every fixture group has an RSM");

    RngStream rng(3);
    Eigen::MatrixXd d(10, 8);
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 8; ++j) d(i, j) = std::floor(1.0 + 5.0 * rng.uniform());
    const auto m = fixtures::matrix_from(d);
    const auto r = rsa::build_rsm(m, rsa::Space::ItemSpace);
    all.push_back(r);
    all.push_back(rsa::build_rsm(m, rsa::Space::RespondentSpace));

    double worst = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            if (i == j) continue;
            const auto expected = oracle::pairwise_pearson(m.column(i), m.column(j));
            out.require(expected.has_value() == r.at(i, j).has_value(), "defined cells agree");
            if (expected && r.at(i, j)) worst = std::max(worst, std::abs(*expected - *r.at(i, j)));
        }
    out.require(worst <= 1e-12, "brute-force pearson");

    std::size_t holding = 0;
    bool self_one = true;
    for (const auto& x : all) {
        holding += invariants_hold(x);
        self_one = self_one && rsa::rsm_compare(x, x) == 1.0;
    }
    out.require(holding == all.size(), "symmetry / unit diagonal / range");
    out.require(self_one, "rsm_compare(A, A) == 1");
    std::size_t undefined_rows = 0;
    for (const auto& x : all)
        for (std::size_t i = 0; i < x.size(); ++i) undefined_rows += !x.at(i, i).has_value();
    out.detail << "invariants on " << holding << "/" << all.size() << " RSMs (" << undefined_rows
               << " constant-vector rows flagged missing), self-similarity 1: "
               << (self_one ? "yes" : "no") << ", max brute-force error " << worst;
}

// -- 6 ---------------------------------------------------------------------

void sna_fixture(Outcome& out) {
    const auto m = sna::network_metrics(fixtures::three_node_network(), 0.05, 0.1);
    const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
    // 0.26667 is 0.8 / 3 rounded to five places
    out.require(near(m.avg_connectivity, 0.8 / 3.0), "avg connectivity");
    out.require(std::abs(m.avg_connectivity - 0.26667) < 5e-6, "avg connectivity rounds to 0.26667");
    out.require(m.centrality.size() == 3 && near(m.centrality[0], 0.8) && near(m.centrality[1], 0.6) &&
                    near(m.centrality[2], 0.2),
                "strengths");
    out.require(m.dominant_core == "A", "dominant core");
    out.require(near(m.density, 2.0 / 3.0), "density");
    out.require(m.hot_cold_integration && near(*m.hot_cold_integration, 0.4), "hot-cold integration");
    out.detail << "avg " << m.avg_connectivity << ", strengths";
    for (double c : m.centrality) out.detail << ' ' << c;
    out.detail << ", core " << m.dominant_core << ", density " << m.density << ", hot-cold "
               << m.hot_cold_integration.value_or(-1.0);
}

// -- 7 ---------------------------------------------------------------------

void structural_signature(Outcome& out) {
    Eigen::MatrixXd phi = synth::equicorrelation(0.2);
    for (Eigen::Index j = 1; j < 5; ++j) phi(0, j) = phi(j, 0) = 0.5;
    const auto scale = demo_scale();
    int sd_ok = 0;
    int core_ok = 0;
    int iso_ok = 0;
    int all_ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::PopulationSpec human;
        human.seed = seed;
        human.factor_correlations = phi;
        human.group_label = "human";
        synth::PopulationSpec llm = human;
        llm.n = 30;
        llm.seed = 1000 + seed;
        llm.variability_scale = 0.2;
        llm.dimension_variability = {1.0, 1.0, 0.0, 1.0, 1.0};
        llm.group_label = "llm";
        const auto h = synth::gen_population(human, scale);
        const auto l = synth::gen_llm_like(llm, scale);
        const bool a = rsa::group_variability(h, scale).sd > rsa::group_variability(l, scale).sd;
        const auto ch = sna::classify_structure(sna::network_metrics(sna::build_network(h, scale)));
        const auto cl = sna::classify_structure(sna::network_metrics(sna::build_network(l, scale)));
        const bool b = ch.dominant_core == "Calculation";
        const bool c = cl.information_isolated && !ch.information_isolated;
        sd_ok += a;
        core_ok += b;
        iso_ok += c;
        all_ok += a && b && c;
    }
    out.require(sd_ok >= 18, "sd(human) > sd(llm)");
    out.require(core_ok >= 18, "Calculation core");
    out.require(iso_ok >= 18, "Information isolated only for llm-like");
    out.detail << "sd " << sd_ok << "/20, core " << core_ok << "/20, isolation " << iso_ok << "/20, all three "
               << all_ok << "/20";
}

// -- 8 ---------------------------------------------------------------------

void intervention_fixtures(Outcome& out) {
    const auto scale = fixtures::keyed_scale(37);
    // 36 of 74, and 133 of 170 answered (15 unparseable excluded)
    const auto pre = fixtures::make_session(scale, "v3", PromptCondition::Baseline, {{19, 0}, {17, 0}});
    const auto post = fixtures::make_session(scale, "v3", PromptCondition::DualStrategy,
                                             {{27, 3}, {27, 3}, {27, 3}, {27, 3}, {25, 3}});
    const auto v3 = intervention::compare_accuracy(pre, post, scale);
    out.require(v3.pre_accuracy == 48.65 && v3.post_accuracy == 78.24, "48.65 -> 78.24");
    out.require(v3.delta == 29.59, "delta +29.59");

    const auto r1_pre =
        fixtures::make_session(scale, "r1", PromptCondition::Baseline, fixtures::runs_for_accuracy(70.43, 37));
    const auto r1_post =
        fixtures::make_session(scale, "r1", PromptCondition::DualStrategy, fixtures::runs_for_accuracy(84.86, 37));
    const auto r1 = intervention::compare_accuracy(r1_pre, r1_post, scale);
    out.require(r1.pre_accuracy == 70.43 && r1.post_accuracy == 84.86, "70.43 -> 84.86");
    out.require(r1.delta == 14.43, "delta +14.43");

    const auto same = intervention::compare_accuracy(pre, pre, scale);
    out.require(same.delta == 0.0, "self delta 0");
    out.require(same.ttest && same.ttest->t == 0.0, "self t 0");
    out.detail << v3.pre_accuracy << " -> " << v3.post_accuracy << " (" << v3.delta << "), " << r1.pre_accuracy
               << " -> " << r1.post_accuracy << " (" << r1.delta << "), self delta " << same.delta << " t "
               << (same.ttest ? same.ttest->t : -1.0);
}

// -- 9 ---------------------------------------------------------------------

EndpointConfig endpoint_for(const MockServer& server) {
    EndpointConfig e;
    e.base_url = server.base_url();
    e.model_name = "mock-model";
    e.timeout_seconds = 5.0;
    e.backoff_base_seconds = 0.01;
    return e;
}

void administration(Outcome& out) {
    const auto t0 = Clock::now();
    const auto scale = demo_scale();
    SessionPlan plan;
    plan.scale_ref = {scale.name, scale.version};
    plan.runs = 3;

    MockServer server(scale, {});
    server.start();
    std::vector<TranscriptRecord> records;
    (void)administer(plan, endpoint_for(server), scale, [&](const TranscriptRecord& r) { records.push_back(r); });
    server.stop();
    out.require(records.size() == 60, "60 transcripts");
    bool params = true;
    for (const auto& r : records)
        params = params && r.request_params.temperature == 0.9 && r.request_params.max_tokens == 2000 &&
                 r.request_params.top_p == 1.0;
    out.require(params, "request params");

    MockServer::Options options;
    options.behavior = MockServer::Behavior::RateLimitThenSucceed;
    options.rate_limit_count = 2;
    MockServer limited(scale, options);
    limited.start();
    std::vector<TranscriptRecord> retried;
    (void)administer(plan, endpoint_for(limited), scale, [&](const TranscriptRecord& r) { retried.push_back(r); });
    limited.stop();
    bool identical = retried.size() == records.size();
    for (std::size_t i = 0; identical && i < retried.size(); ++i) identical = retried[i].parsed == records[i].parsed;
    out.require(identical, "identical parsed results after 429s");
    const int first_retries = retried.empty() ? -1 : retried.front().retry_count;
    out.require(first_retries == 2, "retry_count recorded");

    const double secs = seconds_since(t0);
    out.require(secs < 30.0, "runtime");
    out.detail << records.size() << " transcripts, params exact: " << (params ? "yes" : "no")
               << ", 429 retries recorded " << first_retries << ", parsed identical: " << (identical ? "yes" : "no")
               << ", " << secs << " s";
}

// -- 10 --------------------------------------------------------------------

void determinism(Outcome& out) {
    const auto config = fixtures::data_dir() / "fixtures" / "config.json";
    std::vector<std::string> reports;
    for (const char* name : {"determinism_a", "determinism_b"}) {
        const auto dir = fixtures::temp_dir(name);
        const std::string cmd = "\"" + fixtures::cli_path().string() + "\" analyze --config \"" + config.string() +
                                "\" --out \"" + dir.string() + "\" > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        out.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "analyze exit status");
        reports.push_back(fs::exists(dir / "report.json") ? read_text_file(dir / "report.json") : std::string());
    }
    out.require(!reports[0].empty() && reports[0] == reports[1], "byte-identical reports");
    const auto golden = read_text_file(fixtures::source_dir() / "tests" / "golden" / "report.json");
    out.require(reports[0] == golden, "golden report");
    out.detail << reports[0].size() << " bytes, runs identical: " << (reports[0] == reports[1] ? "yes" : "no")
               << ", golden match: " << (reports[0] == golden ? "yes" : "no");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"statistical kernel exactness", kernel_exactness},
        {"reliability correctness", reliability},
        {"factor recovery", factor_recovery},
        {"fit-index degenerate cases", degenerate_fit},
        {"RSA properties", rsa_properties},
        {"SNA hand fixture", sna_fixture},
        {"structural signature discrimination", structural_signature},
        {"intervention fixtures", intervention_fixtures},
        {"administration protocol", administration},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            criteria[i].second(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        failed += !out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": "
                  << out.detail.str() << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
