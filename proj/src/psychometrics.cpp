#include "cogalign/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cogalign/errors.hpp"
#include "cogalign/rng.hpp"

namespace cogalign::psychometrics {

namespace {

constexpr double kUniquenessFloor = 0.005;

Eigen::MatrixXd correlation_or_degenerate(const Eigen::MatrixXd& data) {
    try {
        return stats::correlation_matrix(data);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConstantInput) {
            throw Error(ErrorCode::DegenerateCorrelationMatrix, "an item has zero variance");
        }
        throw;
    }
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& data, Eigen::Index col) {
    Eigen::MatrixXd out(data.rows(), data.cols() - 1);
    for (Eigen::Index j = 0, dst = 0; j < data.cols(); ++j) {
        if (j == col) continue;
        out.col(dst++) = data.col(j);
    }
    return out;
}

void apply_sign_convention(Eigen::MatrixXd& loadings) {
    for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
            if (std::abs(loadings(i, j)) > best + 1e-12) {
                best = std::abs(loadings(i, j));
                arg = i;
            }
        }
        if (loadings(arg, j) < 0.0) loadings.col(j) = -loadings.col(j);
    }
}

double varimax_criterion(const Eigen::MatrixXd& a) {
    const double p = static_cast<double>(a.rows());
    double total = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const Eigen::ArrayXd sq = a.col(j).array().square();
        total += (p * sq.square().sum() - sq.sum() * sq.sum()) / (p * p);
    }
    return total;
}

// Parameter layout: [loadings (p) | log(uniqueness - floor) (p) | Cholesky raw entries (F(F-1)/2)].
struct CfaModel {
    Eigen::MatrixXd s;
    FactorMapping mapping;
    std::size_t p = 0;
    std::size_t factors = 0;
    double log_det_s = 0.0;

    [[nodiscard]] std::size_t n_params() const { return 2 * p + factors * (factors - 1) / 2; }

    [[nodiscard]] Eigen::MatrixXd phi(const Eigen::VectorXd& theta) const {
        const auto f = static_cast<Eigen::Index>(factors);
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(f, f);
        Eigen::Index idx = static_cast<Eigen::Index>(2 * p);
        for (Eigen::Index i = 0; i < f; ++i) {
            for (Eigen::Index j = 0; j < i; ++j) l(i, j) = theta(idx++);
            l(i, i) = 1.0;
            l.row(i) /= l.row(i).norm();
        }
        return l * l.transpose();
    }

    [[nodiscard]] Eigen::MatrixXd sigma(const Eigen::VectorXd& theta) const {
        const auto pp = static_cast<Eigen::Index>(p);
        Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(pp, static_cast<Eigen::Index>(factors));
        for (Eigen::Index i = 0; i < pp; ++i) lambda(i, static_cast<Eigen::Index>(mapping[static_cast<std::size_t>(i)])) = theta(i);
        Eigen::MatrixXd out = lambda * phi(theta) * lambda.transpose();
        for (Eigen::Index i = 0; i < pp; ++i) out(i, i) += uniqueness(theta, i);
        return out;
    }

    [[nodiscard]] double uniqueness(const Eigen::VectorXd& theta, Eigen::Index i) const {
        return kUniquenessFloor + std::exp(theta(static_cast<Eigen::Index>(p) + i));
    }

    [[nodiscard]] double objective(const Eigen::VectorXd& theta) const {
        const Eigen::MatrixXd sig = sigma(theta);
        Eigen::LLT<Eigen::MatrixXd> llt(sig);
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd lower = llt.matrixL();
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < lower.rows(); ++i) {
            if (!(lower(i, i) > 0.0)) return std::numeric_limits<double>::infinity();
            log_det += 2.0 * std::log(lower(i, i));
        }
        const double trace = llt.solve(s).trace();
        return log_det + trace - log_det_s - static_cast<double>(p);
    }

    [[nodiscard]] Eigen::VectorXd start() const {
        Eigen::VectorXd theta(static_cast<Eigen::Index>(n_params()));
        const auto pp = static_cast<Eigen::Index>(p);
        for (Eigen::Index i = 0; i < pp; ++i) {
            theta(i) = 0.7;
            theta(pp + i) = std::log(0.51 - kUniquenessFloor);
        }
        const auto f = static_cast<Eigen::Index>(factors);
        Eigen::MatrixXd phi0 = Eigen::MatrixXd::Constant(f, f, 0.3);
        phi0.diagonal().setOnes();
        const Eigen::MatrixXd l = phi0.llt().matrixL();
        Eigen::Index idx = 2 * pp;
        for (Eigen::Index i = 0; i < f; ++i)
            for (Eigen::Index j = 0; j < i; ++j) theta(idx++) = l(i, j) / l(i, i);
        return theta;
    }
};

Eigen::VectorXd numeric_gradient(const CfaModel& model, const Eigen::VectorXd& theta) {
    Eigen::VectorXd g(theta.size());
    Eigen::VectorXd probe = theta;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(theta(i)));
        probe(i) = theta(i) + h;
        const double up = model.objective(probe);
        probe(i) = theta(i) - h;
        const double down = model.objective(probe);
        probe(i) = theta(i);
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

struct BfgsOutcome {
    Eigen::VectorXd theta;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

BfgsOutcome minimize_bfgs(const CfaModel& model, Eigen::VectorXd theta) {
    constexpr int kMaxIterations = 2000;
    constexpr double kValueTolerance = 1e-9;
    constexpr double kGradientTolerance = 1e-6;

    const Eigen::Index dim = theta.size();
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
    double value = model.objective(theta);
    Eigen::VectorXd grad = numeric_gradient(model, theta);

    BfgsOutcome out;
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        out.iterations = iter;
        if (grad.cwiseAbs().maxCoeff() < kGradientTolerance) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd dir = -h_inv * grad;
        double slope = grad.dot(dir);
        if (!(slope < 0.0)) {
            h_inv.setIdentity();
            dir = -grad;
            slope = grad.dot(dir);
        }
        double step = 1.0;
        Eigen::VectorXd next;
        double next_value = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            next = theta + step * dir;
            next_value = model.objective(next);
            if (std::isfinite(next_value) && next_value <= value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent possible along the quasi-Newton direction at roundoff scale.
            out.converged = grad.cwiseAbs().maxCoeff() < 1e3 * kGradientTolerance;
            break;
        }
        const Eigen::VectorXd next_grad = numeric_gradient(model, next);
        const Eigen::VectorXd s = next - theta;
        const Eigen::VectorXd y = next_grad - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(dim, dim);
            h_inv = (ident - rho * s * y.transpose()) * h_inv * (ident - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
        const double change = std::abs(value - next_value);
        theta = next;
        value = next_value;
        grad = next_grad;
        if (change < kValueTolerance) {
            out.converged = true;
            break;
        }
    }
    out.theta = theta;
    out.value = value;
    return out;
}

// F_ML as sum(mu - 1 - log mu) over eigenvalues mu of Sigma^-1 S; every term is nonnegative and
// vanishes to roundoff when Sigma reproduces S, unlike the log-determinant difference form.
double eigen_discrepancy(const Eigen::MatrixXd& s, const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd lower = llt.matrixL();
    const Eigen::MatrixXd half = lower.triangularView<Eigen::Lower>().solve(s);
    Eigen::MatrixXd w = lower.triangularView<Eigen::Lower>().solve(half.transpose());
    w = (w + w.transpose()).eval() / 2.0;
    const auto eig = stats::sym_eigen(w);
    double f = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double mu = eig.values(i);
        if (!(mu > 0.0)) return std::numeric_limits<double>::infinity();
        f += (mu - 1.0) - std::log1p(mu - 1.0);
    }
    return f;
}

// Fisher scoring from the quasi-Newton optimum: analytic score tr(Sigma^-1 (Sigma - S) Sigma^-1 dSigma)
// with a differenced Jacobian of Sigma. Moves only when the discrepancy does not increase.
Eigen::VectorXd fisher_polish(const CfaModel& model, Eigen::VectorXd theta, double& value) {
    const Eigen::Index dim = theta.size();
    const auto pp = static_cast<Eigen::Index>(model.p);
    value = eigen_discrepancy(model.s, model.sigma(theta));
    for (int step = 0; step < 25 && value > 0.0; ++step) {
        const Eigen::MatrixXd sig = model.sigma(theta);
        Eigen::LLT<Eigen::MatrixXd> llt(sig);
        if (llt.info() != Eigen::Success) break;
        const Eigen::MatrixXd sinv = llt.solve(Eigen::MatrixXd::Identity(pp, pp));
        const Eigen::MatrixXd b = sinv * (sig - model.s) * sinv;
        std::vector<Eigen::MatrixXd> a(static_cast<std::size_t>(dim));
        Eigen::VectorXd g(dim);
        Eigen::VectorXd probe = theta;
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(theta(k)));
            probe(k) = theta(k) + h;
            const Eigen::MatrixXd up = model.sigma(probe);
            probe(k) = theta(k) - h;
            const Eigen::MatrixXd jk = (up - model.sigma(probe)) / (2.0 * h);
            probe(k) = theta(k);
            g(k) = (b.cwiseProduct(jk)).sum();
            a[static_cast<std::size_t>(k)] = sinv * jk;
        }
        Eigen::MatrixXd info(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            for (Eigen::Index l = k; l < dim; ++l) {
                info(k, l) = info(l, k) =
                    (a[static_cast<std::size_t>(k)].cwiseProduct(a[static_cast<std::size_t>(l)].transpose())).sum();
            }
        }
        const Eigen::VectorXd delta = info.ldlt().solve(-g);
        if (!delta.allFinite()) break;
        bool moved = false;
        for (double t = 1.0; t > 1e-3; t *= 0.5) {
            const Eigen::VectorXd next = theta + t * delta;
            const double next_value = eigen_discrepancy(model.s, model.sigma(next));
            if (next_value <= value) {
                moved = next_value < value;
                theta = next;
                value = next_value;
                break;
            }
        }
        if (!moved) break;
    }
    return theta;
}

}  // namespace

double alpha_variance_form(const Eigen::MatrixXd& data) {
    const Eigen::Index k = data.cols();
    if (k < 2) throw Error(ErrorCode::TooFewItems, "alpha needs at least 2 items");
    if (data.rows() < 2) throw Error(ErrorCode::TooFewRespondents, "alpha needs at least 2 respondents");
    const double n1 = static_cast<double>(data.rows() - 1);
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    const double item_var_sum = centered.colwise().squaredNorm().sum() / n1;
    const Eigen::VectorXd total = centered.rowwise().sum();
    const double total_var = total.squaredNorm() / n1;
    if (!(total_var > 0.0)) throw Error(ErrorCode::ZeroTotalVariance, "total score has zero variance");
    const double kd = static_cast<double>(k);
    return kd / (kd - 1.0) * (1.0 - item_var_sum / total_var);
}

ReliabilityReport cronbach_alpha(const ResponseMatrix& m) {
    if (m.k() < 2) throw Error(ErrorCode::TooFewItems, "alpha needs at least 2 items");
    const Eigen::MatrixXd data = m.complete_data();
    ReliabilityReport out;
    out.k = m.k();
    out.n = static_cast<std::size_t>(data.rows());
    out.alpha = alpha_variance_form(data);
    const Eigen::VectorXd total = data.rowwise().sum();
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        ItemReliability item;
        item.item_id = m.item_ids()[static_cast<std::size_t>(j)];
        const Eigen::VectorXd col = data.col(j);
        const Eigen::VectorXd rest = total - col;
        try {
            item.corrected_item_total_r =
                stats::pearson(std::span(col.data(), static_cast<std::size_t>(col.size())),
                               std::span(rest.data(), static_cast<std::size_t>(rest.size())))
                    .r;
        } catch (const Error&) {
        }
        if (data.cols() > 2) {
            try {
                item.alpha_if_deleted = alpha_variance_form(drop_column(data, j));
            } catch (const Error&) {
            }
        }
        out.per_item.push_back(std::move(item));
    }
    return out;
}

ParallelAnalysisResult parallel_analysis(const ResponseMatrix& m, std::size_t n_sims, double percentile,
                                         std::uint64_t seed) {
    if (m.k() < 2) throw Error(ErrorCode::TooFewItems, "parallel analysis needs at least 2 items");
    return parallel_analysis(m.complete_data(), n_sims, percentile, seed);
}

ParallelAnalysisResult parallel_analysis(const Eigen::MatrixXd& data, std::size_t n_sims, double percentile,
                                         std::uint64_t seed) {
    const Eigen::Index n = data.rows();
    const Eigen::Index k = data.cols();
    if (k < 2) throw Error(ErrorCode::TooFewItems, "parallel analysis needs at least 2 items");
    if (n < 3) throw Error(ErrorCode::TooFewRespondents, "parallel analysis needs at least 3 complete rows");
    if (n_sims < 100) throw Error(ErrorCode::InsufficientData, "parallel analysis needs at least 100 simulations");

    ParallelAnalysisResult out;
    out.n_sims = n_sims;
    out.percentile = percentile;
    out.seed = seed;
    const auto observed = stats::sym_eigen(correlation_or_degenerate(data)).values;
    out.observed_eigs.assign(observed.data(), observed.data() + observed.size());

    std::vector<std::vector<double>> by_rank(static_cast<std::size_t>(k), std::vector<double>(n_sims));
    Eigen::MatrixXd sim(n, k);
    for (std::size_t s = 0; s < n_sims; ++s) {
        RngStream rng(derive_seed(seed, s));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < k; ++j) sim(i, j) = rng.normal();
        const auto eigs = stats::sym_eigen(stats::correlation_matrix(sim)).values;
        for (Eigen::Index r = 0; r < k; ++r) by_rank[static_cast<std::size_t>(r)][s] = eigs(r);
    }
    for (auto& values : by_rank) out.threshold_eigs.push_back(stats::percentile(std::move(values), percentile));

    while (out.retained < out.observed_eigs.size() &&
           out.observed_eigs[out.retained] > out.threshold_eigs[out.retained]) {
        ++out.retained;
    }
    return out;
}

Eigen::MatrixXd varimax(const Eigen::MatrixXd& loadings, std::size_t* sweeps) {
    constexpr std::size_t kMaxSweeps = 200;
    constexpr double kTolerance = 1e-8;
    const Eigen::Index p = loadings.rows();
    const Eigen::Index m = loadings.cols();
    const double pd = static_cast<double>(p);

    Eigen::VectorXd h = loadings.rowwise().norm();
    Eigen::MatrixXd a = loadings;
    for (Eigen::Index i = 0; i < p; ++i)
        if (h(i) > 0.0) a.row(i) /= h(i);

    double criterion = varimax_criterion(a);
    std::size_t sweep = 0;
    for (; sweep < kMaxSweeps && m > 1; ++sweep) {
        for (Eigen::Index j = 0; j < m - 1; ++j) {
            for (Eigen::Index l = j + 1; l < m; ++l) {
                const Eigen::ArrayXd x = a.col(j).array();
                const Eigen::ArrayXd y = a.col(l).array();
                const Eigen::ArrayXd u = x.square() - y.square();
                const Eigen::ArrayXd v = 2.0 * x * y;
                const double sum_u = u.sum();
                const double sum_v = v.sum();
                const double c = (u.square() - v.square()).sum();
                const double d = 2.0 * (u * v).sum();
                const double num = d - 2.0 * sum_u * sum_v / pd;
                const double den = c - (sum_u * sum_u - sum_v * sum_v) / pd;
                const double phi = 0.25 * std::atan2(num, den);
                if (std::abs(phi) < 1e-15) continue;
                const double cs = std::cos(phi);
                const double sn = std::sin(phi);
                a.col(j) = (cs * x + sn * y).matrix();
                a.col(l) = (-sn * x + cs * y).matrix();
            }
        }
        const double next = varimax_criterion(a);
        const double change = std::abs(next - criterion);
        criterion = next;
        if (change < kTolerance) {
            ++sweep;
            break;
        }
    }
    if (sweeps) *sweeps = sweep;
    for (Eigen::Index i = 0; i < p; ++i) a.row(i) *= h(i);
    apply_sign_convention(a);
    return a;
}

FactorSolution efa(const ResponseMatrix& m, std::size_t n_factors, Rotation rotation) {
    if (n_factors >= m.k()) throw Error(ErrorCode::TooManyFactors, "n_factors must be below the item count");
    return efa_from_correlation(correlation_or_degenerate(m.complete_data()), n_factors, rotation);
}

FactorSolution efa_from_correlation(const Eigen::MatrixXd& r, std::size_t n_factors, Rotation rotation) {
    const auto k = static_cast<std::size_t>(r.rows());
    if (n_factors < 1 || n_factors >= k) {
        throw Error(ErrorCode::TooManyFactors, "need 1 <= n_factors < " + std::to_string(k));
    }
    const auto eig = stats::sym_eigen(r);
    FactorSolution out;
    out.eigenvalues = eig.values;
    const auto nf = static_cast<Eigen::Index>(n_factors);
    out.loadings.resize(r.rows(), nf);
    for (Eigen::Index j = 0; j < nf; ++j) {
        out.loadings.col(j) = eig.vectors.col(j) * std::sqrt(std::max(eig.values(j), 0.0));
    }
    out.rotation = rotation;
    if (rotation == Rotation::Varimax) {
        out.loadings = varimax(out.loadings, &out.varimax_sweeps);
    } else {
        apply_sign_convention(out.loadings);
    }
    out.communalities = out.loadings.rowwise().squaredNorm();
    return out;
}

double ml_discrepancy(const Eigen::MatrixXd& s, const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> ls(s);
    Eigen::LLT<Eigen::MatrixXd> lsig(sigma);
    if (ls.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveDefiniteS, "S not positive definite");
    if (lsig.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveDefiniteS, "Sigma not positive definite");
    return eigen_discrepancy(s, sigma);
}

FactorMapping dimension_mapping(const ResponseMatrix& m, const ScaleDefinition& scale) {
    std::vector<Dimension> dims;
    for (const auto& id : m.item_ids()) dims.push_back(scale.item(id).dimension);
    std::set<Dimension> present(dims.begin(), dims.end());
    std::map<Dimension, std::size_t> index;
    for (Dimension d : kDimensions)
        if (present.contains(d)) index.emplace(d, index.size());
    FactorMapping mapping;
    for (Dimension d : dims) mapping.push_back(index.at(d));
    return mapping;
}

CfaResult cfa(const ResponseMatrix& m, const FactorMapping& mapping) {
    const Eigen::MatrixXd data = m.complete_data();
    return cfa_from_matrix(correlation_or_degenerate(data), static_cast<std::size_t>(data.rows()), mapping);
}

CfaResult cfa_from_matrix(const Eigen::MatrixXd& s, std::size_t n, const FactorMapping& mapping) {
    const auto p = static_cast<std::size_t>(s.rows());
    if (s.rows() != s.cols()) throw Error(ErrorCode::NotSquare, "S must be square");
    if (mapping.size() != p) throw Error(ErrorCode::LengthMismatch, "mapping must cover every item");
    const std::size_t factors = *std::max_element(mapping.begin(), mapping.end()) + 1;
    for (std::size_t f = 0; f < factors; ++f) {
        if (std::find(mapping.begin(), mapping.end(), f) == mapping.end()) {
            throw Error(ErrorCode::UnidentifiedModel, "factor " + std::to_string(f) + " has no indicators");
        }
    }

    CfaModel model;
    model.s = s;
    model.mapping = mapping;
    model.p = p;
    model.factors = factors;
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveDefiniteS, "sample matrix not positive definite");
    const Eigen::MatrixXd ls = llt.matrixL();
    model.log_det_s = 2.0 * ls.diagonal().array().log().sum();

    const int moments = static_cast<int>(p * (p + 1) / 2);
    const int df = moments - static_cast<int>(model.n_params());
    if (df < 1) throw Error(ErrorCode::UnidentifiedModel, "model has " + std::to_string(df) + " degrees of freedom");
    if (n <= model.n_params()) {
        throw Error(ErrorCode::InsufficientData, "n must exceed the " + std::to_string(model.n_params()) + " free parameters");
    }

    BfgsOutcome fit = minimize_bfgs(model, model.start());
    fit.theta = fisher_polish(model, fit.theta, fit.value);

    CfaResult out;
    FitIndices& ix = out.fit;
    ix.n = n;
    ix.df = df;
    ix.converged = fit.converged;
    ix.iterations = fit.iterations;
    // Eigenvalues of Sigma^-1 S carry ~eps relative error, so F below p*(64 eps)^2 is roundoff.
    const double roundoff = static_cast<double>(p) * std::pow(64.0 * std::numeric_limits<double>::epsilon(), 2);
    ix.f_ml = fit.value > roundoff ? fit.value : 0.0;
    const double n1 = static_cast<double>(n - 1);
    ix.chi2 = n1 * ix.f_ml;
    ix.chi2_over_df = ix.chi2 / static_cast<double>(df);
    ix.rmsea = std::sqrt(std::max(ix.chi2 - df, 0.0) / (static_cast<double>(df) * n1));

    double log_diag = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) log_diag += std::log(s(i, i));
    ix.baseline_chi2 = n1 * (log_diag - model.log_det_s);
    ix.baseline_df = static_cast<int>(p * (p - 1) / 2);
    const double excess = std::max(ix.chi2 - df, 0.0);
    const double base_excess = ix.baseline_chi2 - ix.baseline_df;
    ix.cfi = std::clamp(1.0 - excess / std::max({base_excess, ix.chi2 - df, 1e-12}), 0.0, 1.0);
    const double base_ratio = ix.baseline_chi2 / ix.baseline_df;
    ix.tli = (base_ratio - ix.chi2_over_df) / (base_ratio - 1.0);

    for (std::size_t i = 0; i < p; ++i) {
        out.estimates.loadings.push_back(fit.theta(static_cast<Eigen::Index>(i)));
        out.estimates.uniquenesses.push_back(model.uniqueness(fit.theta, static_cast<Eigen::Index>(i)));
    }
    out.estimates.factor_correlations = model.phi(fit.theta);
    return out;
}

MdsResult classical_mds(const Eigen::MatrixXd& d, std::size_t dims) {
    const Eigen::Index n = d.rows();
    if (d.rows() != d.cols() || n == 0) throw Error(ErrorCode::InvalidDistanceMatrix, "distance matrix must be square");
    if (dims < 1 || dims > static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::InvalidDistanceMatrix, "dims must lie in 1..n");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(d(i, i)) > 1e-12) throw Error(ErrorCode::InvalidDistanceMatrix, "nonzero diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (d(i, j) < 0.0 || !std::isfinite(d(i, j))) throw Error(ErrorCode::InvalidDistanceMatrix, "negative or non-finite distance");
            if (std::abs(d(i, j) - d(j, i)) > 1e-10) throw Error(ErrorCode::InvalidDistanceMatrix, "not symmetric");
        }
    }
    const Eigen::MatrixXd d2 = d.array().square().matrix();
    const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::MatrixXd b = -0.5 * j * d2 * j;
    b = 0.5 * (b + b.transpose());
    const auto eig = stats::sym_eigen(b);

    MdsResult out;
    out.eigenvalues = eig.values;
    const double tol = 1e-12 * std::max(1.0, std::abs(eig.values(0)));
    for (Eigen::Index k = 0; k < n; ++k)
        if (eig.values(k) < -tol) out.negative_eigen_mass += -eig.values(k);
    const auto nd = static_cast<Eigen::Index>(dims);
    out.coordinates = Eigen::MatrixXd::Zero(n, nd);
    for (Eigen::Index k = 0; k < nd; ++k) {
        if (eig.values(k) > tol) out.coordinates.col(k) = eig.vectors.col(k) * std::sqrt(eig.values(k));
    }
    return out;
}

Eigen::MatrixXd correlation_distance(const Eigen::MatrixXd& r) {
    Eigen::MatrixXd d = (2.0 * (1.0 - r.array())).max(0.0).sqrt().matrix();
    d.diagonal().setZero();
    return 0.5 * (d + d.transpose());
}

std::vector<CriterionResult> criterion_validity(
    const std::map<std::string, double>& scale_scores,
    const std::map<std::string, std::map<std::string, std::optional<double>>>& external) {
    std::vector<CriterionResult> out;
    for (const auto& [instrument, values] : external) {
        std::vector<double> x;
        std::vector<double> y;
        for (const auto& [id, score] : scale_scores) {
            const auto it = values.find(id);
            if (it == values.end() || !it->second) continue;
            x.push_back(score);
            y.push_back(*it->second);
        }
        if (x.size() < 3) {
            throw Error(ErrorCode::NoOverlap, instrument + " shares only " + std::to_string(x.size()) + " respondents");
        }
        out.push_back({instrument, stats::pearson(x, y)});
    }
    return out;
}

std::map<std::string, double> total_scores(const ResponseMatrix& m) {
    std::map<std::string, double> out;
    for (std::size_t r = 0; r < m.n(); ++r) {
        double sum = 0.0;
        bool any = false;
        for (std::size_t c = 0; c < m.k(); ++c) {
            if (const auto& v = m.at(r, c)) {
                sum += *v;
                any = true;
            }
        }
        if (any) out[m.respondent_ids()[r]] = sum;
    }
    return out;
}

}  // namespace cogalign::psychometrics
