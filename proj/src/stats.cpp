#include "cogalign/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cogalign/errors.hpp"

namespace cogalign::stats {

namespace {

constexpr double kBetaTolerance = 1e-12;
constexpr int kBetaMaxIterations = 300;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b); valid when x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kBetaTolerance) break;
    }
    return h;
}

// I_x(a, b) with the complement y = 1 - x supplied separately to avoid cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(y);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

void require_same_length(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "vectors of length " + std::to_string(x.size()) +
                                                   " and " + std::to_string(y.size()));
    }
}

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorCode::InsufficientData, "mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "variance needs at least 2 values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        // positions i..j (0-based) share rank mean((i+1)..(j+1))
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::InsufficientData, "percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "correlation needs at least 2 pairs");
    if (is_constant(x) || is_constant(y)) {
        throw Error(ErrorCode::ConstantInput, "zero variance input, correlation undefined");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    CorrelationResult out;
    out.n = x.size();
    // sqrt(sxx * sxx) == sxx in IEEE arithmetic, so r(x, x) is exactly 1.
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (out.n >= 3) {
        const double df = static_cast<double>(out.n - 2);
        const double one_minus_r2 = 1.0 - out.r * out.r;
        if (one_minus_r2 <= 0.0) {
            out.p = 0.0;
        } else {
            out.p = student_t_two_sided_p(out.r * std::sqrt(df / one_minus_r2), df);
        }
    }
    return out;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

TTestResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "each group needs at least 2 values");
    }
    const double ma = mean(a);
    const double mb = mean(b);
    const double va = sample_variance(a) / static_cast<double>(a.size());
    const double vb = sample_variance(b) / static_cast<double>(b.size());
    const double se2 = va + vb;
    if (se2 == 0.0) {
        if (ma == mb) throw Error(ErrorCode::BothConstantEqual, "both groups constant and equal");
        throw Error(ErrorCode::ConstantInput, "both groups constant, t unbounded");
    }
    TTestResult out;
    out.t = (ma - mb) / std::sqrt(se2);
    const double na1 = static_cast<double>(a.size() - 1);
    const double nb1 = static_cast<double>(b.size() - 1);
    out.df = se2 * se2 / (va * va / na1 + vb * vb / nb1);
    out.p = student_t_two_sided_p(out.t, out.df);
    return out;
}

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw Error(ErrorCode::InvalidDf, "incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidDf, "degrees of freedom must be positive");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double t2 = t * t;
    const double denom = df + t2;
    // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    const double two_tail = incomplete_beta_xy(0.5 * df, 0.5, df / denom, t2 / denom);
    const double upper = 0.5 * two_tail;
    return t >= 0.0 ? upper : 1.0 - upper;
}

double student_t_two_sided_p(double t, double df) {
    return std::min(1.0, 2.0 * student_t_sf(std::abs(t), df));
}

EigenResult sym_eigen(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::NotSquare, "eigendecomposition needs a square matrix");
    const Eigen::Index n = m.rows();
    const double scale = std::max(1.0, n > 0 ? m.cwiseAbs().maxCoeff() : 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale) {
                throw Error(ErrorCode::NotSymmetric, "matrix not symmetric within 1e-10");
            }
        }
    }
    Eigen::MatrixXd a = 0.5 * (m + m.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double total = a.squaredNorm();

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off == 0.0 || off <= 1e-32 * total) break;

        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

    EigenResult out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src);
        Eigen::VectorXd col = v.col(src);
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(col(i)) > best + 1e-12) {
                best = std::abs(col(i));
                arg = i;
            }
        }
        if (col(arg) < 0.0) col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

Eigen::MatrixXd mvn_sample(RngStream& rng, const Eigen::VectorXd& mean_vec,
                           const Eigen::MatrixXd& cov, std::size_t n) {
    if (cov.rows() != cov.cols()) throw Error(ErrorCode::NotSquare, "covariance must be square");
    if (cov.rows() != mean_vec.size()) {
        throw Error(ErrorCode::LengthMismatch, "mean and covariance dimensions differ");
    }
    const Eigen::Index p = cov.rows();
    const auto eig = sym_eigen(cov);
    const double tol = 1e-10;
    Eigen::VectorXd root(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double lambda = eig.values(k);
        if (lambda < -tol) throw Error(ErrorCode::NotPSD, "covariance has eigenvalue " + std::to_string(lambda));
        root(k) = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
    }
    const Eigen::MatrixXd factor = eig.vectors * root.asDiagonal();

    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), p);
    Eigen::VectorXd z(p);
    for (std::size_t row = 0; row < n; ++row) {
        for (Eigen::Index k = 0; k < p; ++k) z(k) = rng.normal();
        out.row(static_cast<Eigen::Index>(row)) = (mean_vec + factor * z).transpose();
    }
    return out;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data) {
    const Eigen::Index n = data.rows();
    const Eigen::Index k = data.cols();
    if (n < 2) throw Error(ErrorCode::InsufficientData, "correlation matrix needs at least 2 rows");
    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::VectorXd norms = centered.colwise().norm();
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto col = data.col(j);
        if ((col.array() == col(0)).all()) {
            throw Error(ErrorCode::ConstantInput, "column " + std::to_string(j) + " is constant");
        }
    }
    Eigen::MatrixXd r = centered.transpose() * centered;
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) r(i, j) /= norms(i) * norms(j);
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < k; ++j) {
            const double v = std::clamp(0.5 * (r(i, j) + r(j, i)), -1.0, 1.0);
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

}  // namespace cogalign::stats
