#include <hdsparse/objectives.hpp>
#include <hdsparse/simulate.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace hdsparse {

std::string to_string(SignalKind k)
{
    switch (k) {
    case SignalKind::four_fixed: return "four_fixed";
    case SignalKind::five_blocks: return "five_blocks";
    case SignalKind::screening_recipe: return "screening_recipe";
    }
    return "five_blocks";
}

std::string to_string(OutcomeKind k)
{
    switch (k) {
    case OutcomeKind::linear: return "linear";
    case OutcomeKind::logistic: return "logistic";
    case OutcomeKind::screening_continuous: return "screening_continuous";
    case OutcomeKind::screening_binary_original: return "screening_binary_original";
    case OutcomeKind::screening_binary_translated: return "screening_binary_translated";
    }
    return "linear";
}

SignalKind signal_kind_from_string(const std::string& s)
{
    for (auto k : {SignalKind::four_fixed, SignalKind::five_blocks, SignalKind::screening_recipe})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown signal '" + s + "' (expected four_fixed|five_blocks|screening_recipe)");
}

OutcomeKind outcome_kind_from_string(const std::string& s)
{
    for (auto k : {OutcomeKind::linear, OutcomeKind::logistic, OutcomeKind::screening_continuous,
                   OutcomeKind::screening_binary_original, OutcomeKind::screening_binary_translated})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown outcome '" + s + "'");
}

bool SimSpec::binary() const
{
    return outcome == OutcomeKind::logistic || outcome == OutcomeKind::screening_binary_original ||
           outcome == OutcomeKind::screening_binary_translated;
}

void SimSpec::validate() const
{
    require(n >= 2, "SimSpec: n must be >= 2");
    require(p >= 1, "SimSpec: p must be >= 1");
    require(tau >= 0.0 && tau < 1.0, "SimSpec: tau must lie in [0, 1)");
    require(snr > 0.0, "SimSpec: snr must be positive");
    require(noise_df >= 0.0, "SimSpec: noise_df must be >= 0");
    const bool screening_outcome = outcome != OutcomeKind::linear && outcome != OutcomeKind::logistic;
    require(screening_outcome == (signal == SignalKind::screening_recipe),
            "SimSpec: screening outcomes go with the screening_recipe signal and only with it");
    if (signal == SignalKind::screening_recipe) require(p_true >= 1 && p_true <= p, "SimSpec: need 1 <= p_true <= p");
    if (signal == SignalKind::four_fixed) require(p >= 4, "SimSpec: four_fixed needs p >= 4");
    if (signal == SignalKind::five_blocks) require(p >= 50, "SimSpec: five_blocks needs p >= 50");
}

FeatureMatrix gen_design(const SimSpec& spec)
{
    spec.validate();
    Rng rng(derive_seed(spec.seed, 0));
    std::normal_distribution<double> z(0.0, 1.0);
    // Row-wise x = L z with L the Cholesky factor of the AR(1) Toeplitz matrix,
    // which reduces to the recursion x_j = tau x_{j-1} + sqrt(1 - tau^2) z_j.
    const double c = std::sqrt(1.0 - spec.tau * spec.tau);
    MatrixXd X(spec.n, spec.p);
    for (Index i = 0; i < spec.n; ++i) {
        double prev = z(rng);
        X(i, 0) = prev;
        for (Index j = 1; j < spec.p; ++j) {
            prev = spec.tau * prev + c * z(rng);
            X(i, j) = prev;
        }
    }
    return standardize_columns(FeatureMatrix(std::move(X))).first;
}

std::vector<Index> five_block_starts(Index p)
{
    require(p >= 50, "five_blocks: layout needs p >= 50");
    const Index gap = (p - 50) / 4;
    std::vector<Index> s;
    for (Index b = 0; b < 5; ++b) s.push_back(b * (10 + gap));
    return s;
}

std::vector<Index> four_fixed_positions(Index p)
{
    require(p >= 4, "four_fixed: layout needs p >= 4");
    std::vector<Index> s;
    for (Index k = 0; k < 4; ++k) s.push_back((2 * k + 1) * p / 8);
    return s;
}

VectorXd gen_signal(const SimSpec& spec)
{
    spec.validate();
    Rng rng(derive_seed(spec.seed, 1));
    std::normal_distribution<double> z(0.0, 1.0);
    VectorXd beta = VectorXd::Zero(spec.p);
    const bool logistic = spec.outcome == OutcomeKind::logistic;

    switch (spec.signal) {
    case SignalKind::four_fixed: {
        const std::array<double, 4> lin{2.0, -2.0, 8.0, -8.0};
        const std::array<double, 4> logit{0.5, -0.5, 0.8, -0.8};
        const auto pos = four_fixed_positions(spec.p);
        for (std::size_t k = 0; k < 4; ++k) beta[pos[k]] = logistic ? logit[k] : lin[k];
        break;
    }
    case SignalKind::five_blocks: {
        // (mean, variance) per block
        const std::array<std::pair<double, double>, 5> lin{{{0.5, 1}, {5, 2}, {10, 3}, {20, 4}, {50, 5}}};
        const std::array<std::pair<double, double>, 5> logit{{{0.5, 1}, {0.5, 1}, {-0.5, 1}, {-0.5, 1}, {1, 1}}};
        const auto starts = five_block_starts(spec.p);
        for (std::size_t b = 0; b < 5; ++b) {
            const auto [mu, var] = logistic ? logit[b] : lin[b];
            for (Index t = 0; t < 10; ++t) beta[starts[b] + t] = mu + std::sqrt(var) * z(rng);
        }
        break;
    }
    case SignalKind::screening_recipe: {
        std::vector<Index> cols(static_cast<std::size_t>(spec.p));
        std::iota(cols.begin(), cols.end(), Index{0});
        // Partial Fisher-Yates with explicit draws keeps the choice portable across standard libraries.
        for (Index k = 0; k < spec.p_true; ++k) {
            const auto r = static_cast<Index>(rng() % static_cast<std::uint64_t>(spec.p - k));
            std::swap(cols[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(k + r)]);
        }
        std::sort(cols.begin(), cols.begin() + spec.p_true);
        // beta_true ~ N(1, 0.6-Toeplitz) via the same AR(1) recursion as the design.
        const double c = std::sqrt(1.0 - 0.36);
        double prev = z(rng);
        beta[cols[0]] = 1.0 + prev;
        for (Index k = 1; k < spec.p_true; ++k) {
            prev = 0.6 * prev + c * z(rng);
            beta[cols[static_cast<std::size_t>(k)]] = 1.0 + prev;
        }
        break;
    }
    }
    return beta;
}

double toeplitz_quadratic_form(const VectorXd& beta, double tau)
{
    std::vector<Index> s;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) s.push_back(j);
    double q = 0.0;
    for (Index a : s)
        for (Index b : s) q += beta[a] * beta[b] * std::pow(tau, static_cast<double>(std::abs(a - b)));
    return q;
}

namespace {

VectorXd standardize(const VectorXd& v)
{
    const double m = v.mean();
    const double sd = std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
    if (!(sd > 0.0)) throw NumericalError("simulate: constant linear predictor cannot be standardized");
    return (v.array() - m) / sd;
}

VectorXd draw_noise(const SimSpec& spec, Rng& rng)
{
    VectorXd e(spec.n);
    if (spec.noise_df > 0.0) {
        std::student_t_distribution<double> t(spec.noise_df);
        for (Index i = 0; i < spec.n; ++i) e[i] = t(rng);
    } else {
        std::normal_distribution<double> z(0.0, 1.0);
        for (Index i = 0; i < spec.n; ++i) e[i] = z(rng);
    }
    return e;
}

ResponseVector bernoulli_outcome(const VectorXd& eta, Rng& rng, Warnings* warnings)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 1; attempt <= 10; ++attempt) {
        VectorXd y(eta.size());
        for (Index i = 0; i < eta.size(); ++i) y[i] = u(rng) < sigmoid(eta[i]) ? 1.0 : 0.0;
        const double ones = y.sum();
        if (ones > 0.0 && ones < static_cast<double>(y.size())) return ResponseVector(std::move(y), ResponseKind::binary);
        if (warnings) warnings->push_back("simulate: all outcomes in one class, resampling (attempt " + std::to_string(attempt) + ")");
    }
    throw NumericalError("simulate: binary outcome degenerate after 10 attempts");
}

} // namespace

ResponseVector gen_outcome(const SimSpec& spec, const FeatureMatrix& X, const VectorXd& beta, Warnings* warnings,
                           double* sigma_used)
{
    spec.validate();
    require(X.rows() == spec.n && X.cols() == beta.size(), "gen_outcome: shapes do not match SimSpec n and p");
    Rng rng(derive_seed(spec.seed, 2));
    double sigma = 0.0;
    ResponseVector out;

    if (spec.signal != SignalKind::screening_recipe) {
        const VectorXd mu = X.values() * beta;
        sigma = std::isinf(spec.snr) ? 0.0 : std::sqrt(toeplitz_quadratic_form(beta, spec.tau)) / spec.snr;
        const VectorXd eta = mu + sigma * draw_noise(spec, rng);
        if (spec.outcome == OutcomeKind::linear) out = ResponseVector(eta, ResponseKind::continuous);
        else out = bernoulli_outcome(eta, rng, warnings);
    } else {
        std::vector<Index> cols;
        for (Index j = 0; j < beta.size(); ++j)
            if (beta[j] != 0.0) cols.push_back(j);
        MatrixXd Xt(spec.n, static_cast<Index>(cols.size()));
        VectorXd bt(static_cast<Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            Xt.col(static_cast<Index>(k)) = standardize(X.values().col(cols[k]));
            if (spec.nonlinear) Xt.col(static_cast<Index>(k)) = standardize(Xt.col(static_cast<Index>(k)).array().square().matrix());
            bt[static_cast<Index>(k)] = beta[cols[k]];
        }
        const VectorXd lin = Xt * bt;
        if (spec.outcome == OutcomeKind::screening_continuous) {
            // Noise scale from the empirical signal second moment, so sqrt(b'X'Xb / n) / sigma = SNR.
            sigma = std::isinf(spec.snr) ? 0.0 : std::sqrt(lin.squaredNorm() / static_cast<double>(spec.n)) / spec.snr;
            out = ResponseVector(lin + sigma * draw_noise(spec, rng), ResponseKind::continuous);
        } else {
            VectorXd t = standardize(lin);
            if (spec.outcome == OutcomeKind::screening_binary_translated) t.array() += std::atanh(std::sqrt(1.0 / 3.0));
            out = bernoulli_outcome(t, rng, warnings);
        }
    }
    if (sigma_used) *sigma_used = sigma;
    return out;
}

SimData simulate(const SimSpec& spec)
{
    SimData d;
    d.X = gen_design(spec);
    d.beta = gen_signal(spec);
    d.y = gen_outcome(spec, d.X, d.beta, &d.warnings, &d.sigma);
    d.support.resize(static_cast<std::size_t>(spec.p));
    for (Index j = 0; j < spec.p; ++j) d.support[static_cast<std::size_t>(j)] = d.beta[j] != 0.0;
    return d;
}

} // namespace hdsparse
