#include "support.hpp"

#include <hdsparse/schedule.hpp>

#include <cmath>

using namespace hdsparse;
using namespace testing;

TEST_CASE("schedule_optimal: first terms and the defining quadratic")
{
    const auto s = schedule_optimal(2.0, 50);
    CHECK(s.alphas[0] == 1.0);
    CHECK(std::abs(s.alphas[1] - (std::sqrt(5.0) - 1.0) / 2.0) <= 1e-12);
    for (Index k = 1; k < s.size(); ++k) {
        // alpha_{k+1} is the positive root of a^2 = alpha_k^2 (1 - a).
        const double a = s.alphas[k], prev = s.alphas[k - 1];
        CHECK(std::abs(a * a - prev * prev * (1.0 - a)) <= 1e-15);
        CHECK(std::abs(s.gammas[k] - a * a) <= 1e-14);
        CHECK(s.omegas[k] == doctest::Approx(1.0 / 3.0));
        CHECK(s.deltas[k] * a == doctest::Approx(s.omegas[k]).epsilon(1e-14));
    }
}

TEST_CASE("schedule_optimal lies inside the damping sandwich")
{
    const auto s = schedule_optimal(1.0, 100000);
    for (Index k = 8; k <= s.size(); k += (k < 1000 ? 1 : 97)) {
        const double kk = static_cast<double>(k);
        const auto ab = optimal_ab(kk);
        const auto lower = damping_lower_bound(kk, ab.a, ab.b);
        CHECK(lower.value < s.alphas[k - 1]);
        CHECK(s.alphas[k - 1] <= 2.0 / (kk + 1.0));
    }
}

TEST_CASE("optimal_ab sits on the admissibility boundary")
{
    for (double k : {8.0, 20.0, 1e3, 1e6}) {
        const auto ab = optimal_ab(k);
        CHECK(ab.b > 0.0);
        CHECK(ab.b < 1.0);
        const double lhs = ab.a * (1 - ab.b) * std::pow(2.0, 2 - ab.b) - ab.a * ab.b * (1 - ab.b) * std::pow(2.0, -ab.b) - 1;
        CHECK(std::abs(lhs) <= 1e-12);
        CHECK(admissible_ab(ab.a * (1 + 1e-9), ab.b));
        CHECK_FALSE(admissible_ab(ab.a * 0.99, ab.b));
    }
    CHECK_THROWS_AS(optimal_ab(7.0), InvalidArgument);
    CHECK_FALSE(admissible_ab(1.0, 1.0));
    CHECK_FALSE(damping_lower_bound(10, -1, 0.5).admissible);
}

TEST_CASE("schedule_original closed forms")
{
    const auto s = schedule_original(4.0, 30);
    for (Index k = 1; k <= 30; ++k) {
        const double kk = static_cast<double>(k);
        CHECK(s.alphas[k - 1] == doctest::Approx(2.0 / (kk + 1.0)));
        CHECK(s.gammas[k - 1] == doctest::Approx(2.0 / (kk * (kk + 1.0))));
        CHECK(s.deltas[k - 1] == doctest::Approx(kk / 16.0));
    }
}

TEST_CASE("verify_schedule accepts generated schedules")
{
    for (double L : {0.01, 1.0, 250.0}) {
        CHECK(verify_schedule(schedule_optimal(L, 3000), L).ok);
        CHECK(verify_schedule(schedule_original(L, 3000), L).ok);
    }
}

TEST_CASE("verify_schedule reports the first violated condition and index")
{
    const double L = 1.0;
    struct Case {
        const char* condition;
        Index index;
        std::function<void(AGSchedule&)> mutate;
    };
    const std::vector<Case> cases{
        {"convcond1-lower", 4, [](AGSchedule& s) { s.deltas[3] = 1.01 * s.omegas[3] / s.alphas[3]; }},
        {"convcond1-lower", 1, [](AGSchedule& s) { s.deltas[0] = 2.0 * s.omegas[0]; }},
        {"convcond1-strict", 3, [&](AGSchedule& s) { s.omegas[2] = 1.0 / L; s.deltas[2] = 0.5 * s.deltas[2]; }},
        {"convcond2", 5, [](AGSchedule& s) { s.deltas[4] *= 0.5; }},
        {"convcond2", 2, [](AGSchedule& s) { s.deltas[1] *= 0.9; }},
        {"alpha1", 1, [](AGSchedule& s) { s.alphas[0] = 0.9; s.refresh_gammas(); }},
    };
    for (const auto& c : cases) {
        auto s = schedule_original(L, 10);
        c.mutate(s);
        const auto r = verify_schedule(s, L);
        CHECK_FALSE(r.ok);
        CHECK(r.condition == c.condition);
        CHECK(r.index == c.index);
    }
    auto bad = schedule_optimal(L, 10);
    bad.gammas[6] *= 1.1;
    CHECK(verify_schedule(bad, L).condition == "gamma-recursion");
}

TEST_CASE("complexity_bound single-step hand value")
{
    AGSchedule s;
    s.alphas = VectorXd::Constant(1, 1.0);
    s.deltas = VectorXd::Constant(1, 0.5);
    s.omegas = VectorXd::Constant(1, 0.25);
    s.refresh_gammas();
    VectorXd x0(2), xs(2);
    x0 << 1.0, 0.0;
    xs << 0.0, 2.0;
    // denom = 0.25 * (1 - 0.25); num = 5 / 0.5 + 2 * 0.5 * (4 + 1)
    const double expect = (10.0 + 5.0) / (0.25 * 0.75);
    CHECK(complexity_bound(s, 1.0, 0.5, x0, xs, 1.0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK_THROWS_AS(complexity_bound(s, 4.0, 0.5, x0, xs, 1.0), InvalidArgument);
}

TEST_CASE("schedule property: random L and N always verify and stay decreasing")
{
    auto rng = rng_for(20);
    for (int t = 0; t < 40; ++t) {
        const double L = std::exp(uniform(rng, -6.0, 6.0));
        const Index N = uniform_index(rng, 1, 400);
        const auto s = schedule_optimal(L, N);
        CHECK(verify_schedule(s, L).ok);
        for (Index k = 1; k < N; ++k) CHECK(s.alphas[k] < s.alphas[k - 1]);
    }
}
