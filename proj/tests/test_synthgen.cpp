#include <catch_amalgamated.hpp>

#include <cmath>

#include "cogalign/errors.hpp"
#include "cogalign/psychometrics.hpp"
#include "cogalign/rsa.hpp"
#include "cogalign/sna.hpp"
#include "cogalign/synthgen.hpp"

using namespace cogalign;
using namespace cogalign::synth;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::UsageError;
}

}  // namespace

TEST_CASE("synthetic scale layout", "[synthgen]") {
    PopulationSpec spec;
    const auto scale = synth_scale(spec);
    CHECK(validate_scale(scale).valid());
    CHECK(scale.items.size() == 20);
    for (Dimension d : kDimensions) {
        const auto items = scale.items_in(d);
        REQUIRE(items.size() == 4);
        CHECK(scale.items[items[0]].keyed());
        CHECK(scale.items[items[1]].keyed());
        CHECK_FALSE(scale.items[items[2]].keyed());
        CHECK(std::get<Likert>(scale.items[items[3]].format) == Likert{1, 5});
    }
    spec.keyed_fraction = 0.0;
    spec.items_per_dimension = 3;
    const auto likert = synth_scale(spec, 7);
    CHECK(likert.items.size() == 15);
    for (const auto& item : likert.items) CHECK(std::get<Likert>(item.format) == Likert{1, 7});
}

TEST_CASE("generation is deterministic per seed", "[synthgen]") {
    PopulationSpec spec;
    spec.n = 50;
    spec.seed = 77;
    const auto scale = synth_scale(spec);
    CHECK(gen_population(spec, scale) == gen_population(spec, scale));
    PopulationSpec llm = spec;
    llm.variability_scale = 0.2;
    CHECK(gen_llm_like(llm, scale) == gen_llm_like(llm, scale));
    PopulationSpec other = spec;
    other.seed = 78;
    CHECK_FALSE(gen_population(other, scale) == gen_population(spec, scale));
}

TEST_CASE("unit loadings make dimension blocks of ones", "[synthgen]") {
    PopulationSpec spec;
    spec.n = 100;
    spec.keyed_fraction = 0.0;
    spec.loadings = {1.0, 1.0, 1.0, 1.0, 1.0};
    const auto scale = synth_scale(spec);
    const auto rsm = rsa::build_rsm(gen_population(spec, scale), rsa::Space::ItemSpace);
    for (std::size_t i = 0; i < rsm.size(); ++i)
        for (std::size_t j = 0; j < rsm.size(); ++j)
            if (i / 4 == j / 4) CHECK(*rsm.at(i, j) == 1.0);
}

TEST_CASE("independent factors give near-zero cross-dimension correlations", "[synthgen]") {
    PopulationSpec spec;
    spec.n = 1000;
    spec.seed = 5;
    const auto scale = synth_scale(spec);
    const auto rsm = rsa::build_rsm(gen_population(spec, scale), rsa::Space::ItemSpace);
    double between = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < rsm.size(); ++i)
        for (std::size_t j = i + 1; j < rsm.size(); ++j)
            if (i / 4 != j / 4) {
                between += *rsm.at(i, j);
                ++count;
            }
    CHECK(std::abs(between / count) < 0.05);
}

TEST_CASE("llm-like runs vary less than human-like respondents", "[synthgen]") {
    int ordered = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PopulationSpec human;
        human.n = 30;
        human.seed = seed;
        const auto scale = synth_scale(human);
        PopulationSpec llm = human;
        llm.variability_scale = 0.2;
        const auto h = rsa::group_variability(gen_population(human, scale), scale).sd;
        const auto l = rsa::group_variability(gen_llm_like(llm, scale), scale).sd;
        ordered += l < h;
    }
    CHECK(ordered == 20);
}

TEST_CASE("llm-like edge cases", "[synthgen]") {
    PopulationSpec spec;
    spec.n = 30;
    spec.variability_scale = 0.0;
    const auto scale = synth_scale(spec);
    CHECK(rsa::group_variability(gen_llm_like(spec, scale), scale).sd == 0.0);

    PopulationSpec keyed;
    keyed.keyed_fraction = 1.0;
    keyed.rationality = {1.0, 1.0, 1.0, 1.0, 1.0};
    keyed.variability_scale = 0.2;
    keyed.n = 30;
    const auto keyed_scale = synth_scale(keyed);
    CHECK(accuracy(gen_llm_like(keyed, keyed_scale), keyed_scale) == 100.0);
    CHECK(accuracy(gen_population(keyed, keyed_scale), keyed_scale) == 100.0);

    PopulationSpec loud = spec;
    loud.variability_scale = 0.5;
    CHECK(code_of([&] { (void)gen_llm_like(loud, scale); }) == ErrorCode::ConfigError);
}

TEST_CASE("rationality sets mean correctness", "[synthgen]") {
    PopulationSpec spec;
    spec.n = 2000;
    spec.keyed_fraction = 1.0;
    spec.rationality = {0.3, 0.5, 0.7, 0.9, 0.6};
    const auto scale = synth_scale(spec);
    const auto m = gen_population(spec, scale);
    for (std::size_t d = 0; d < 5; ++d) {
        double correct = 0.0;
        double total = 0.0;
        for (auto j : scale.items_in(kDimensions[d])) {
            for (std::size_t r = 0; r < m.n(); ++r) {
                correct += *m.at(r, j);
                total += 1.0;
            }
        }
        CHECK_THAT(correct / total, WithinAbs(spec.rationality[d], 0.03));
    }
}

TEST_CASE("logistic shift hits its target", "[synthgen]") {
    for (double target : {0.2, 0.5, 0.8}) {
        for (double sd : {0.0, 0.5, 1.0}) {
            const double b = logistic_shift(target, sd);
            // E[logistic(1.7 sd Z + b)] by midpoint quadrature
            double acc = 0.0;
            const int steps = 4000;
            for (int i = 0; i < steps; ++i) {
                const double z = -8.0 + 16.0 * (i + 0.5) / steps;
                const double w = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI) * 16.0 / steps;
                acc += w / (1.0 + std::exp(-(1.7 * sd * z + b)));
            }
            CHECK_THAT(acc, WithinAbs(target, 1e-6));
        }
    }
}

TEST_CASE("dispersion grows with variability on likert items", "[synthgen][property]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        double previous = -1.0;
        for (double v : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
            PopulationSpec spec;
            spec.n = 60;
            spec.seed = seed;
            spec.keyed_fraction = 0.0;
            spec.variability_scale = v;
            const auto scale = synth_scale(spec);
            const double sd = rsa::group_variability(gen_population(spec, scale), scale).sd;
            CHECK(sd >= previous);
            previous = sd;
        }
    }
}

TEST_CASE("mean dispersion over a seed family grows with variability", "[synthgen][property]") {
    // keyed items keep Bernoulli noise at any variability, so single seeds can dip
    double previous = -1.0;
    for (double v : {0.0, 0.5, 1.0, 1.5}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            PopulationSpec spec;
            spec.n = 60;
            spec.seed = seed;
            spec.variability_scale = v;
            const auto scale = synth_scale(spec);
            total += rsa::group_variability(gen_population(spec, scale), scale).sd;
        }
        CHECK(total / 20.0 >= previous);
        previous = total / 20.0;
    }
}

TEST_CASE("strongest factor correlation becomes the strongest edge", "[synthgen]") {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PopulationSpec spec;
        spec.seed = seed;
        spec.keyed_fraction = 0.0;
        Eigen::MatrixXd phi = equicorrelation(0.3);
        phi(1, 4) = phi(4, 1) = 0.6;  // Belief -- Memory
        spec.factor_correlations = phi;
        const auto scale = synth_scale(spec);
        const auto net = sna::build_network(gen_population(spec, scale), scale);
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = i + 1; j < 5; ++j)
                if (net.weight(i, j) && std::abs(*net.weight(i, j)) > best) {
                    best = std::abs(*net.weight(i, j));
                    bi = i;
                    bj = j;
                }
        hits += bi == 1 && bj == 4;
    }
    CHECK(hits >= 18);
}

TEST_CASE("rigid dimensions isolate their node", "[synthgen]") {
    PopulationSpec spec;
    spec.n = 30;
    spec.variability_scale = 0.2;
    spec.dimension_variability = {1.0, 1.0, 0.0, 1.0, 1.0};
    const auto scale = synth_scale(spec);
    const auto net = sna::build_network(gen_llm_like(spec, scale), scale);
    const auto metrics = sna::network_metrics(net);
    CHECK(sna::classify_structure(metrics).information_isolated);
}

TEST_CASE("spec and scale must agree", "[synthgen]") {
    PopulationSpec spec;
    auto scale = synth_scale(spec);
    scale.items.pop_back();
    CHECK(code_of([&] { (void)gen_population(spec, scale); }) == ErrorCode::SpecScaleMismatch);
    PopulationSpec bad;
    bad.factor_correlations = Eigen::MatrixXd::Identity(4, 4);
    CHECK(code_of([&] { (void)gen_population(bad, synth_scale(bad)); }) == ErrorCode::SpecScaleMismatch);
    PopulationSpec loads;
    loads.loadings[2] = 1.2;
    CHECK(code_of([&] { (void)gen_population(loads, synth_scale(loads)); }) == ErrorCode::ConfigError);
}
