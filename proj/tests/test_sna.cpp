#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "cogalign/errors.hpp"
#include "cogalign/rng.hpp"
#include "cogalign/sna.hpp"
#include "cogalign/synthgen.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cogalign;
using namespace cogalign::sna;
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

// Two Likert 1..5 items per dimension, canonical dimension order: L1,L2 Calculation, L3,L4 Belief, ...
ScaleDefinition two_per_dimension() {
    ScaleDefinition s;
    s.name = "network-fixture";
    s.version = "1";
    s.hot_cold_partition = default_partition();
    s.bias_catalog = {"Fixture bias"};
    for (std::size_t i = 0; i < 10; ++i) {
        Item item;
        item.id = "L" + std::to_string(i + 1);
        item.text = "Fixture item.";
        item.dimension = kDimensions[i / 2];
        item.bias_name = "Fixture bias";
        item.format = Likert{1, 5};
        s.items.push_back(item);
    }
    return s;
}

ResponseMatrix matrix_for(const ScaleDefinition& s, const Eigen::MatrixXd& d) {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    for (Eigen::Index i = 0; i < d.rows(); ++i) rows.push_back("p" + std::to_string(i + 1));
    for (const auto& item : s.items) cols.push_back(item.id);
    ResponseMatrix m("g", rows, cols, {s.name, s.version});
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), d(i, j));
    return m;
}

Eigen::MatrixXd random_likert(RngStream& rng, Eigen::Index n) {
    Eigen::MatrixXd d(n, 10);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < 10; ++j) d(i, j) = std::floor(1.0 + 5.0 * rng.uniform());
    return d;
}

CognitiveNetwork five_node(const std::vector<double>& upper) {
    CognitiveNetwork net({"Calculation", "Belief", "Information", "Social", "Memory"});
    std::size_t k = 0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) net.set_weight(i, j, upper[k++]);
    for (auto d : kDimensions) net.partition[std::string(to_string(d))] = default_partition().at(d);
    return net;
}

}  // namespace

TEST_CASE("three-node fixture metrics", "[sna]") {
    const auto m = network_metrics(fixtures::three_node_network(), 0.05, 0.1);
    CHECK_THAT(m.avg_connectivity, WithinAbs(0.8 / 3.0, 1e-12));
    REQUIRE(m.centrality.size() == 3);
    CHECK_THAT(m.centrality[0], WithinAbs(0.8, 1e-12));
    CHECK_THAT(m.centrality[1], WithinAbs(0.6, 1e-12));
    CHECK_THAT(m.centrality[2], WithinAbs(0.2, 1e-12));
    CHECK(m.dominant_core == "A");
    CHECK_THAT(m.density, WithinAbs(2.0 / 3.0, 1e-12));
    REQUIRE(m.hot_cold_integration.has_value());
    CHECK_THAT(*m.hot_cold_integration, WithinAbs(0.4, 1e-12));
    CHECK(m.isolated.empty());
    CHECK(m.defined_edges == 3);
}

TEST_CASE("all-zero weights isolate every node", "[sna]") {
    const auto net = five_node(std::vector<double>(10, 0.0));
    for (double threshold : {1e-9, 0.05, 0.5}) {
        const auto m = network_metrics(net, threshold, 0.1);
        CHECK(m.avg_connectivity == 0.0);
        CHECK(m.isolated.size() == 5);
    }
}

TEST_CASE("network metrics require a defined edge", "[sna]") {
    CognitiveNetwork net({"A", "B"});
    CHECK(code_of([&] { (void)network_metrics(net); }) == ErrorCode::NoDefinedEdges);
}

TEST_CASE("missing edges count below both thresholds", "[sna]") {
    auto net = fixtures::three_node_network();
    net.set_weight(0, 2, std::nullopt);
    const auto m = network_metrics(net, 0.05, 0.1);
    CHECK_THAT(m.avg_connectivity, WithinAbs(0.3, 1e-12));
    CHECK_THAT(m.density, WithinAbs(1.0 / 3.0, 1e-12));
    CHECK(m.isolated == std::vector<std::string>{"C"});
    CHECK(m.defined_edges == 2);
}

TEST_CASE("dominant core ties follow node order", "[sna]") {
    auto net = five_node({0.3, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    // Calculation 0.6, Belief 0.3, Information 0.3
    CHECK(network_metrics(net).dominant_core == "Calculation");
    auto hub = five_node({0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.4, 0.0, 0.0});
    // Belief-Social and Information-Social
    CHECK(network_metrics(hub).dominant_core == "Social");
    auto tie = five_node({0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.0, 0.0});
    CHECK(network_metrics(tie).dominant_core == "Belief");
    auto flat = five_node(std::vector<double>(10, 0.2));
    CHECK(network_metrics(flat).dominant_core == "Calculation");
}

TEST_CASE("metrics ignore edge signs", "[sna][property]") {
    RngStream rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> w(10);
        for (auto& x : w) x = 2.0 * rng.uniform() - 1.0;
        auto flipped = w;
        for (auto& x : flipped)
            if (rng.uniform() < 0.5) x = -x;
        const auto a = network_metrics(five_node(w));
        const auto b = network_metrics(five_node(flipped));
        CHECK(a.avg_connectivity == b.avg_connectivity);
        CHECK(*a.hot_cold_integration == *b.hot_cold_integration);
        CHECK(a.density == b.density);
        CHECK(a.dominant_core == b.dominant_core);
    }
}

TEST_CASE("thresholds act monotonically", "[sna][property]") {
    RngStream rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> w(10);
        for (auto& x : w) x = 0.3 * (2.0 * rng.uniform() - 1.0);
        const auto net = five_node(w);
        double previous_density = 2.0;
        std::size_t previous_isolated = 0;
        for (double t : {0.0, 0.02, 0.05, 0.1, 0.2, 0.3}) {
            const auto m = network_metrics(net, t, t);
            CHECK(m.density <= previous_density);
            CHECK(m.isolated.size() >= previous_isolated);
            previous_density = m.density;
            previous_isolated = m.isolated.size();
        }
    }
}

TEST_CASE("metrics follow node relabeling", "[sna][property]") {
    const auto net = fixtures::three_node_network();
    CognitiveNetwork relabeled({"C", "A", "B"});
    relabeled.set_weight(1, 2, 0.6);
    relabeled.set_weight(1, 0, 0.2);
    relabeled.set_weight(2, 0, 0.0);
    relabeled.partition = net.partition;
    const auto a = network_metrics(net);
    const auto b = network_metrics(relabeled);
    CHECK(b.dominant_core == "A");
    CHECK(b.centrality[1] == a.centrality[0]);
    CHECK(b.centrality[0] == a.centrality[2]);
    CHECK(b.avg_connectivity == a.avg_connectivity);
    CHECK(*b.hot_cold_integration == *a.hot_cold_integration);
}

TEST_CASE("build_network matches hand-extracted dimension means", "[sna]") {
    const auto scale = two_per_dimension();
    RngStream rng(8);
    const Eigen::MatrixXd d = random_likert(rng, 10);
    const auto net = build_network(matrix_for(scale, d), scale);
    REQUIRE(net.nodes == std::vector<std::string>{"Calculation", "Belief", "Information", "Social", "Memory"});
    std::vector<std::vector<double>> means(5);
    for (Eigen::Index i = 0; i < 10; ++i)
        for (int dim = 0; dim < 5; ++dim)
            means[static_cast<std::size_t>(dim)].push_back(((d(i, 2 * dim) - 1.0) / 4.0 + (d(i, 2 * dim + 1) - 1.0) / 4.0) / 2.0);
    for (std::size_t a = 0; a < 5; ++a) {
        CHECK_FALSE(net.weight(a, a).has_value());
        for (std::size_t b = a + 1; b < 5; ++b) {
            REQUIRE(net.weight(a, b).has_value());
            CHECK_THAT(*net.weight(a, b), WithinAbs(oracle::pearson(means[a], means[b]), 1e-12));
            CHECK(*net.weight(a, b) == *net.weight(b, a));
        }
    }
    CHECK(net.partition.at("Social") == SystemTag::Hot);
    CHECK(net.partition.at("Memory") == SystemTag::Cold);
}

TEST_CASE("build_network examples", "[sna]") {
    const auto scale = two_per_dimension();
    RngStream rng(12);
    Eigen::MatrixXd d = random_likert(rng, 8);
    d.col(2) = d.col(0);  // Belief copies Calculation
    d.col(3) = d.col(1);
    d.col(4).setConstant(3.0);  // Information constant
    d.col(5).setConstant(2.0);
    const auto net = build_network(matrix_for(scale, d), scale);
    CHECK_THAT(*net.weight(0, 1), WithinAbs(1.0, 1e-12));
    for (std::size_t j = 0; j < 5; ++j) CHECK_FALSE(net.weight(2, j).has_value());
    const auto metrics = network_metrics(net);
    CHECK(std::find(metrics.isolated.begin(), metrics.isolated.end(), "Information") != metrics.isolated.end());
    CHECK(classify_structure(metrics).information_isolated);
}

TEST_CASE("build_network errors", "[sna]") {
    const auto scale = two_per_dimension();
    RngStream rng(1);
    const Eigen::MatrixXd two = random_likert(rng, 2);
    CHECK(code_of([&] { (void)build_network(matrix_for(scale, two), scale); }) == ErrorCode::TooFewRespondents);
    auto partial = scale;
    partial.items.resize(8);  // drop Memory
    const Eigen::MatrixXd d = random_likert(rng, 5).leftCols(8);
    CHECK(code_of([&] { (void)build_network(matrix_for(partial, d), scale); }) == ErrorCode::MissingDimension);
}

TEST_CASE("classify structure", "[sna]") {
    NetworkMetrics m;
    m.dominant_core = "Social";
    auto c = classify_structure(m);
    CHECK(c.dominant_core == "Social");
    CHECK_FALSE(c.information_isolated);
    CHECK(c.isolated_modules.empty());
    m.isolated = {"Information"};
    m.dominant_core = "Calculation";
    c = classify_structure(m);
    CHECK(c.information_isolated);
    CHECK(c.isolated_modules == std::vector<std::string>{"Information"});
}

TEST_CASE("a strong calculation block makes it the core", "[sna]") {
    synth::PopulationSpec spec;
    spec.seed = 30;
    spec.keyed_fraction = 0.0;
    Eigen::MatrixXd phi = synth::equicorrelation(0.1);
    for (int j = 1; j < 5; ++j) phi(0, j) = phi(j, 0) = 0.5;
    spec.factor_correlations = phi;
    const auto scale = synth::synth_scale(spec);
    const auto net = build_network(synth::gen_population(spec, scale), scale);
    CHECK(network_metrics(net).dominant_core == "Calculation");
}
