#include "support.hpp"

#include <hdsparse/metrics.hpp>
#include <hdsparse/screening.hpp>
#include <hdsparse/simulate.hpp>

#include <cmath>
#include <limits>

using namespace hdsparse;
using namespace testing;

namespace {

double dense_quadratic_form(const VectorXd& b, double tau)
{
    const Index p = b.size();
    MatrixXd S(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) S(i, j) = std::pow(tau, static_cast<double>(std::abs(i - j)));
    return b.dot(S * b);
}

/// Fraction of (positive, negative) pairs ordered correctly, ties counted as half.
double auroc_pairs(const std::vector<double>& s, const std::vector<bool>& truth)
{
    double good = 0, total = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (truth[i] && !truth[j]) {
                total += 1;
                good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return good / total;
}

double column_corr(const MatrixXd& X, Index a, Index b)
{
    const VectorXd u = X.col(a).array() - X.col(a).mean();
    const VectorXd v = X.col(b).array() - X.col(b).mean();
    return u.dot(v) / (u.norm() * v.norm());
}

} // namespace

TEST_CASE("signal layouts")
{
    CHECK(five_block_starts(400) == std::vector<Index>{0, 97, 194, 291, 388});
    CHECK(five_block_starts(50) == std::vector<Index>{0, 10, 20, 30, 40});
    CHECK(four_fixed_positions(400) == std::vector<Index>{50, 150, 250, 350});
    CHECK(four_fixed_positions(8) == std::vector<Index>{1, 3, 5, 7});

    SimSpec s;
    s.signal = SignalKind::four_fixed;
    s.p = 400;
    const VectorXd b = gen_signal(s);
    CHECK(b[50] == 2.0);
    CHECK(b[150] == -2.0);
    CHECK(b[250] == 8.0);
    CHECK(b[350] == -8.0);
    CHECK((b.array() != 0.0).count() == 4);
    s.outcome = OutcomeKind::logistic;
    CHECK(gen_signal(s)[250] == 0.8);

    s = SimSpec{};
    const VectorXd fb = gen_signal(s);
    CHECK((fb.array() != 0.0).count() == 50);
    for (Index st : five_block_starts(s.p)) CHECK((fb.segment(st, 10).array() != 0.0).all());
    // Block means 0.5 and 50 are far apart relative to the block sd.
    CHECK(fb.segment(388, 10).mean() > 40.0);
}

TEST_CASE("design columns are standardized and AR(1)-correlated")
{
    SimSpec s;
    s.n = 20000;
    s.p = 6;
    s.tau = 0.7;
    s.signal = SignalKind::four_fixed;
    const MatrixXd X = gen_design(s).values();
    for (Index j = 0; j < s.p; ++j) {
        CHECK(std::abs(X.col(j).mean()) <= 1e-10);
        CHECK(std::abs(X.col(j).squaredNorm() / static_cast<double>(s.n - 1) - 1.0) <= 1e-10);
    }
    for (Index j = 0; j + 2 < s.p; ++j) {
        CHECK(std::abs(column_corr(X, j, j + 1) - 0.7) <= 0.02);
        CHECK(std::abs(column_corr(X, j, j + 2) - 0.49) <= 0.02);
    }
}

TEST_CASE("simulate is deterministic and its parts use separate streams")
{
    SimSpec s;
    s.n = 60;
    s.p = 80;
    s.seed = 17;
    const auto a = simulate(s), b = simulate(s);
    CHECK(a.X.values() == b.X.values());
    CHECK(a.y.values() == b.y.values());
    CHECK(a.beta == b.beta);

    SimSpec t = s;
    t.snr = 10.0;
    const auto c = simulate(t);
    CHECK(c.X.values() == a.X.values());
    CHECK(c.beta == a.beta);
    CHECK(c.y.values() != a.y.values());
    t.seed = 18;
    CHECK(simulate(t).X.values() != a.X.values());
}

TEST_CASE("noise scale follows the SNR definition")
{
    auto rng = rng_for(70);
    for (int t = 0; t < 10; ++t) {
        SimSpec s;
        s.n = 50;
        s.p = uniform_index(rng, 50, 120);
        s.tau = uniform(rng, 0.0, 0.9);
        s.snr = uniform(rng, 0.5, 10.0);
        s.seed = static_cast<std::uint64_t>(t);
        const auto d = simulate(s);
        CHECK(d.sigma == doctest::Approx(std::sqrt(dense_quadratic_form(d.beta, s.tau)) / s.snr).epsilon(1e-12));
        CHECK(toeplitz_quadratic_form(d.beta, s.tau) ==
              doctest::Approx(dense_quadratic_form(d.beta, s.tau)).epsilon(1e-12));
    }
    SimSpec s;
    s.signal = SignalKind::four_fixed;
    s.snr = std::numeric_limits<double>::infinity();
    const auto d = simulate(s);
    CHECK(d.sigma == 0.0);
    CHECK(d.y.values() == d.X.values() * d.beta);

    // Student-t(5) noise has sd sigma sqrt(5/3).
    s.snr = 2.0;
    s.n = 20000;
    s.p = 8;
    s.noise_df = 5.0;
    const auto e = simulate(s);
    const VectorXd r = e.y.values() - e.X.values() * e.beta;
    CHECK(std::abs(std::sqrt(r.squaredNorm() / static_cast<double>(s.n)) / e.sigma - std::sqrt(5.0 / 3.0)) <= 0.05);
}

TEST_CASE("screening recipe outcomes")
{
    SimSpec s;
    s.signal = SignalKind::screening_recipe;
    s.outcome = OutcomeKind::screening_continuous;
    s.n = 200;
    s.p = 300;
    s.p_true = 10;
    s.snr = 2.0;
    for (bool nonlinear : {false, true}) {
        s.nonlinear = nonlinear;
        const auto d = simulate(s);
        CHECK((d.beta.array() != 0.0).count() == 10);
        CHECK(std::count(d.support.begin(), d.support.end(), true) == 10);
        VectorXd lin = VectorXd::Zero(s.n);
        for (Index j = 0; j < s.p; ++j) {
            if (d.beta[j] == 0.0) continue;
            VectorXd c = d.X.values().col(j);
            if (nonlinear) {
                c = c.array().square();
                c = (c.array() - c.mean()) / std::sqrt((c.array() - c.mean()).square().sum() / (s.n - 1.0));
            }
            lin += d.beta[j] * c;
        }
        CHECK(d.sigma == doctest::Approx(std::sqrt(lin.squaredNorm() / s.n) / s.snr).epsilon(1e-9));
    }
    for (auto o : {OutcomeKind::screening_binary_original, OutcomeKind::screening_binary_translated}) {
        s.outcome = o;
        const auto d = simulate(s);
        CHECK(d.y.kind() == ResponseKind::binary);
        CHECK(((d.y.values().array() == 0.0) || (d.y.values().array() == 1.0)).all());
        CHECK(d.y.values().sum() > 0.0);
    }
    s.signal = SignalKind::five_blocks;
    CHECK_THROWS_AS(simulate(s), InvalidArgument);
    CHECK(outcome_kind_from_string("screening_binary_translated") == OutcomeKind::screening_binary_translated);
    CHECK_THROWS_AS(signal_kind_from_string("blocks"), InvalidArgument);
}

TEST_CASE("metrics hand cases")
{
    std::vector<bool> truth(14, false), sel(14, false);
    truth[0] = truth[2] = true;
    sel[0] = sel[1] = true;
    const auto pv = ppv_npv(sel, truth);
    CHECK(*pv.ppv == 0.5);
    CHECK(*pv.npv == doctest::Approx(11.0 / 12.0));
    CHECK_FALSE(ppv_npv(std::vector<bool>(14, false), truth).ppv);
    CHECK_FALSE(ppv_npv(std::vector<bool>(14, true), truth).npv);

    VectorXd bt(2), bh(2);
    bt << 3, 4;
    bh << 3, 0;
    CHECK(scaled_estimation_error(bt, bh) == doctest::Approx(16.0 / 25.0));
    CHECK(*iterations_to_threshold({5, 3, 1, 0.5}, 1.0) == 3);
    CHECK_FALSE(iterations_to_threshold({5, 3}, 1.0));
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    const auto m = mean_se({1, 2, 3, 4});
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(mean_se({7}).se == 0.0);
    CHECK(support_of(bh) == std::vector<bool>{true, false});
}

TEST_CASE("selection_auroc hand case, ties and pairwise oracle")
{
    CHECK(selection_auroc({0.9, 0.8, 0.7, 0.1}, {true, false, true, false}) == doctest::Approx(0.75));
    CHECK(selection_auroc({1, 1, 1, 1}, {true, false, true, false}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(selection_auroc({1, 2}, {true, true}), InvalidArgument);
    auto rng = rng_for(71);
    for (int t = 0; t < 200; ++t) {
        const auto n = static_cast<std::size_t>(uniform_index(rng, 2, 60));
        std::vector<double> s(n);
        std::vector<bool> truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(uniform_index(rng, 0, 8)); // frequent ties
            truth[i] = uniform(rng, 0, 1) < 0.3;
        }
        truth[0] = true;
        truth[1] = false;
        CHECK(selection_auroc(s, truth) == doctest::Approx(auroc_pairs(s, truth)).epsilon(1e-12));
    }
}

TEST_CASE("screen_all: ranking order, failure handling and worker independence")
{
    auto rng = rng_for(72);
    MatrixXd X = normal_matrix(rng, 120, 12);
    const VectorXd y = X.col(3) + 0.3 * normal_vector(rng, 120);
    X.col(7).setConstant(2.0);
    X.col(5) = X.col(3);
    const FeatureMatrix fm(X);
    const ResponseVector rv(y, ResponseKind::continuous);
    for (auto method : {MIMethod::FFTKDE, MIMethod::Binning, MIMethod::KNN, MIMethod::Pearson}) {
        ScreenOptions one, many;
        many.workers = 4;
        const auto a = screen_all(fm, rv, method, one);
        const auto b = screen_all(fm, rv, method, many);
        CHECK(a.scores == b.scores);
        CHECK(a.ranking == b.ranking);
        // Duplicate columns tie; the lower index ranks first.
        CHECK(a.ranking[0].first == 3);
        CHECK(a.ranking[1].first == 5);
        for (std::size_t k = 1; k < a.ranking.size(); ++k) CHECK(a.ranking[k].second <= a.ranking[k - 1].second);
        if (method == MIMethod::Pearson || method == MIMethod::FFTKDE) {
            REQUIRE(a.failures.size() == 1);
            CHECK(a.failures[0].first == 7);
            CHECK(std::isinf(a.scores[7]));
            CHECK(a.ranking.back().first == 7);
        }
    }
}
