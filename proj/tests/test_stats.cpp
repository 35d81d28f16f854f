#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cogalign/errors.hpp"
#include "cogalign/rng.hpp"
#include "cogalign/stats.hpp"
#include "oracles.hpp"

using namespace cogalign;
using Catch::Approx;

namespace {

std::vector<double> draw(RngStream& rng, std::size_t n, double scale = 1.0, double shift = 0.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = shift + scale * rng.normal();
    return v;
}

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

TEST_CASE("pearson worked examples", "[stats][pearson]") {
    REQUIRE(stats::pearson(std::vector{1.0, 2.0, 3.0}, std::vector{2.0, 4.0, 6.0}).r == Approx(1.0).margin(1e-15));
    REQUIRE(stats::pearson(std::vector{1.0, 2.0, 3.0}, std::vector{6.0, 4.0, 2.0}).r == Approx(-1.0).margin(1e-15));
    REQUIRE(stats::pearson(std::vector{1.0, 2.0, 3.0, 4.0}, std::vector{1.0, 3.0, 2.0, 4.0}).r ==
            Approx(0.8).margin(1e-15));
}

TEST_CASE("pearson errors", "[stats][pearson]") {
    REQUIRE(code_of([] { (void)stats::pearson(std::vector{1.0, 2.0}, std::vector{1.0, 2.0, 3.0}); }) ==
            ErrorCode::LengthMismatch);
    REQUIRE(code_of([] { (void)stats::pearson(std::vector{1.0, 1.0, 1.0}, std::vector{1.0, 2.0, 3.0}); }) ==
            ErrorCode::ConstantInput);
    REQUIRE(code_of([] { (void)stats::pearson(std::vector{1.0}, std::vector{2.0}); }) == ErrorCode::InsufficientData);
}

TEST_CASE("pearson p-value is absent below three points", "[stats][pearson]") {
    const auto r = stats::pearson(std::vector{1.0, 2.0}, std::vector{3.0, 1.0});
    REQUIRE_FALSE(r.p.has_value());
    REQUIRE(r.n == 2);
}

TEST_CASE("pearson matches the oracle on random inputs", "[stats][pearson]") {
    RngStream rng(101);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 3 + rng.below(60);
        auto x = draw(rng, n, 1.0 + rng.uniform() * 5, rng.normal());
        auto y = draw(rng, n);
        for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
        const auto res = stats::pearson(x, y);
        REQUIRE(std::abs(res.r - oracle::pearson(x, y)) < 1e-12);
        const double t = res.r * std::sqrt((n - 2.0) / (1.0 - res.r * res.r));
        REQUIRE(std::abs(*res.p - 2 * oracle::t_sf(std::abs(t), n - 2.0)) < 1e-9);
    }
}

TEST_CASE("pearson symmetry and affine invariance", "[stats][pearson][property]") {
    RngStream rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = draw(rng, 25);
        const auto y = draw(rng, 25);
        const double r = stats::pearson(x, y).r;
        REQUIRE(stats::pearson(y, x).r == r);
        std::vector<double> ax(x.size());
        std::vector<double> nx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            ax[i] = 3.5 * x[i] + 2.0;
            nx[i] = -0.5 * x[i] + 1.0;
        }
        REQUIRE(std::abs(stats::pearson(ax, y).r - r) < 1e-12);
        REQUIRE(std::abs(stats::pearson(nx, y).r + r) < 1e-12);
    }
}

TEST_CASE("spearman worked examples and ties", "[stats][spearman]") {
    REQUIRE(stats::spearman(std::vector{1.0, 2.0, 3.0}, std::vector{10.0, 20.0, 30.0}).r == Approx(1.0));
    REQUIRE(stats::spearman(std::vector{1.0, 2.0, 3.0}, std::vector{3.0, 2.0, 1.0}).r == Approx(-1.0));
    const std::vector x{1.0, 2.0, 2.0, 4.0};
    const std::vector y{1.0, 3.0, 2.0, 4.0};
    REQUIRE(stats::average_ranks(x) == std::vector{1.0, 2.5, 2.5, 4.0});
    REQUIRE(std::abs(stats::spearman(x, y).r - oracle::pearson({1, 2.5, 2.5, 4}, {1, 3, 2, 4})) < 1e-15);
}

TEST_CASE("spearman matches the oracle on random tied inputs", "[stats][spearman]") {
    RngStream rng(202);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 3 + rng.below(40);
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng.below(6));
            y[i] = std::round(x[i] + 2 * rng.normal());
        }
        if (stats::is_constant(x) || stats::is_constant(y)) continue;
        REQUIRE(std::abs(stats::spearman(x, y).r - oracle::spearman(x, y)) < 1e-12);
    }
}

TEST_CASE("spearman is invariant under monotone transforms", "[stats][spearman][property]") {
    RngStream rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        const auto x = draw(rng, 30);
        const auto y = draw(rng, 30);
        std::vector<double> ex(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) ex[i] = std::exp(x[i]) * 10 + std::pow(x[i], 3);
        REQUIRE(std::abs(stats::spearman(ex, y).r - stats::spearman(x, y).r) < 1e-12);
    }
}

TEST_CASE("welch examples", "[stats][welch]") {
    const auto same = stats::welch_t(std::vector{1.0, 2.0, 3.0}, std::vector{1.0, 2.0, 3.0});
    REQUIRE(same.t == 0.0);
    REQUIRE(same.p == Approx(1.0).margin(1e-15));

    const auto far = stats::welch_t(std::vector{0.0, 1e-9, 0.0, -1e-9}, std::vector{1.0, 1.0 + 1e-9, 1.0, 1.0 - 1e-9});
    REQUIRE(std::abs(far.t) > 1e6);
    REQUIRE(far.p < 1e-12);

    const std::vector a{2.0, 4.0, 6.0, 8.0};
    const std::vector b{1.0, 2.0, 3.0};
    const auto w = stats::welch_t(a, b);
    const auto o = oracle::welch(a, b);
    REQUIRE(std::abs(w.t - o.t) < 1e-12);
    REQUIRE(std::abs(w.df - o.df) < 1e-12);
    REQUIRE(std::abs(w.p - o.p) < 1e-9);
}

TEST_CASE("welch errors", "[stats][welch]") {
    REQUIRE(code_of([] { (void)stats::welch_t(std::vector{1.0}, std::vector{1.0, 2.0}); }) ==
            ErrorCode::InsufficientData);
    REQUIRE(code_of([] { (void)stats::welch_t(std::vector{2.0, 2.0}, std::vector{2.0, 2.0}); }) ==
            ErrorCode::BothConstantEqual);
}

TEST_CASE("welch antisymmetry", "[stats][welch][property]") {
    RngStream rng(33);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = draw(rng, 2 + rng.below(20), 2.0);
        const auto b = draw(rng, 2 + rng.below(20), 1.0, 0.5);
        const auto ab = stats::welch_t(a, b);
        const auto ba = stats::welch_t(b, a);
        REQUIRE(ab.t == -ba.t);
        REQUIRE(ab.p == ba.p);
        REQUIRE(ab.df == ba.df);
    }
}

TEST_CASE("student t survival function", "[stats][t]") {
    REQUIRE(stats::student_t_sf(0.0, 3.0) == 0.5);
    REQUIRE(stats::student_t_sf(0.0, 0.7) == 0.5);
    REQUIRE(stats::student_t_sf(1e6, 5.0) < 1e-20);
    REQUIRE(std::abs(stats::student_t_sf(2.0, 10.0) - oracle::t_sf(2.0, 10.0)) < 1e-6);
    REQUIRE_THROWS_AS(stats::student_t_sf(1.0, 0.0), Error);
    REQUIRE_THROWS_AS(stats::student_t_sf(1.0, -2.0), Error);

    RngStream rng(44);
    for (int rep = 0; rep < 100; ++rep) {
        const double t = (rng.uniform() - 0.5) * 12;
        const double df = 0.5 + rng.uniform() * 60;
        REQUIRE(std::abs(stats::student_t_sf(t, df) - oracle::t_sf(t, df)) < 1e-9);
        REQUIRE(std::abs(stats::student_t_sf(t, df) + stats::student_t_sf(-t, df) - 1.0) < 1e-12);
    }
}

TEST_CASE("incomplete beta endpoints and symmetry", "[stats][beta]") {
    REQUIRE(stats::incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    REQUIRE(stats::incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1, 1) = x and I_x(a, b) = 1 - I_{1-x}(b, a)
    REQUIRE(stats::incomplete_beta(1.0, 1.0, 0.3) == Approx(0.3).margin(1e-14));
    REQUIRE(stats::incomplete_beta(2.5, 0.5, 0.4) == Approx(1.0 - stats::incomplete_beta(0.5, 2.5, 0.6)).margin(1e-13));
}

TEST_CASE("sym_eigen examples", "[stats][eigen]") {
    auto id = stats::sym_eigen(Eigen::MatrixXd::Identity(3, 3));
    REQUIRE(id.values.isApprox(Eigen::Vector3d(1, 1, 1)));

    Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
    REQUIRE(stats::sym_eigen(d).values.isApprox(Eigen::Vector3d(3, 2, 1)));

    Eigen::MatrixXd m(2, 2);
    m << 2, 1, 1, 2;
    const auto e = stats::sym_eigen(m);
    REQUIRE(e.values(0) == Approx(3.0));
    REQUIRE(e.values(1) == Approx(1.0));
    const double h = 1 / std::sqrt(2.0);
    REQUIRE(std::abs(e.vectors(0, 0) - h) < 1e-12);
    REQUIRE(std::abs(e.vectors(1, 0) - h) < 1e-12);
    REQUIRE(std::abs(std::abs(e.vectors(0, 1)) - h) < 1e-12);
    REQUIRE(e.vectors(0, 1) * e.vectors(1, 1) < 0);
}

TEST_CASE("sym_eigen errors", "[stats][eigen]") {
    REQUIRE(code_of([] { (void)stats::sym_eigen(Eigen::MatrixXd::Zero(2, 3)); }) == ErrorCode::NotSquare);
    Eigen::MatrixXd m(2, 2);
    m << 1, 0.5, 0.4, 1;
    REQUIRE(code_of([&] { (void)stats::sym_eigen(m); }) == ErrorCode::NotSymmetric);
}

TEST_CASE("sym_eigen agrees with a reference solver", "[stats][eigen]") {
    RngStream rng(55);
    for (int size : {1, 2, 5, 17, 50}) {
        Eigen::MatrixXd a(size, size);
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j) a(i, j) = rng.normal();
        }
        const Eigen::MatrixXd m = (a + a.transpose()) / 2;
        const auto e = stats::sym_eigen(m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
        const Eigen::VectorXd ref_desc = ref.eigenvalues().reverse();
        REQUIRE((e.values - ref_desc).norm() < 1e-9 * std::max(1.0, ref_desc.norm()));
        const Eigen::MatrixXd rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        REQUIRE((rebuilt - m).norm() / m.norm() < 1e-8);
        REQUIRE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(size, size)).norm() < 1e-8);
        REQUIRE(std::abs(e.values.sum() - m.trace()) < 1e-8);
        for (int c = 0; c < size; ++c) {
            Eigen::Index idx;
            e.vectors.col(c).cwiseAbs().maxCoeff(&idx);
            REQUIRE(e.vectors(idx, c) > 0);
        }
    }
}

TEST_CASE("mvn_sample", "[stats][mvn]") {
    RngStream zero_rng(1);
    const Eigen::Vector3d mu(1, -2, 3);
    const auto z = stats::mvn_sample(zero_rng, mu, Eigen::MatrixXd::Zero(3, 3), 5);
    for (int i = 0; i < 5; ++i) REQUIRE(z.row(i).transpose() == mu);

    RngStream rng(2);
    const auto x = stats::mvn_sample(rng, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4), 10000);
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 9999.0;
    REQUIRE((cov - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.1);

    RngStream a(9);
    RngStream b(9);
    Eigen::MatrixXd c(2, 2);
    c << 1, 0.5, 0.5, 1;
    REQUIRE(stats::mvn_sample(a, Eigen::VectorXd::Zero(2), c, 50) == stats::mvn_sample(b, Eigen::VectorXd::Zero(2), c, 50));

    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    RngStream r(1);
    REQUIRE(code_of([&] { (void)stats::mvn_sample(r, Eigen::VectorXd::Zero(2), bad, 3); }) == ErrorCode::NotPSD);
}

TEST_CASE("percentile interpolates linearly", "[stats]") {
    REQUIRE(stats::percentile({1, 2, 3, 4, 5}, 50) == 3.0);
    REQUIRE(stats::percentile({1, 2, 3, 4}, 50) == 2.5);
    REQUIRE(stats::percentile({10, 20}, 95) == Approx(19.5));
}
