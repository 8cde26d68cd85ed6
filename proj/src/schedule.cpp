#include <hdsparse/schedule.hpp>

#include <cmath>

namespace hdsparse {

namespace {
constexpr double kRelSlack = 1e-10;

bool leq(double a, double b) { return a <= b + kRelSlack * std::max(std::abs(a), std::abs(b)); }
} // namespace

void AGSchedule::refresh_gammas()
{
    gammas.resize(alphas.size());
    for (Index k = 0; k < alphas.size(); ++k)
        gammas[k] = k == 0 ? 1.0 : (1.0 - alphas[k]) * gammas[k - 1];
}

AGSchedule schedule_optimal(double L, Index N)
{
    require(L > 0.0 && std::isfinite(L), "schedule_optimal: L must be positive");
    require(N >= 1, "schedule_optimal: N must be >= 1");
    AGSchedule s;
    s.alphas.resize(N);
    s.deltas.resize(N);
    s.omegas.setConstant(N, 2.0 / (3.0 * L));
    const double w = s.omegas[0];
    s.alphas[0] = 1.0;
    s.deltas[0] = w;
    for (Index k = 1; k < N; ++k) {
        const double a = s.alphas[k - 1];
        s.alphas[k] = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (a * a)));
        s.deltas[k] = w / s.alphas[k];
    }
    s.refresh_gammas();
    return s;
}

AGSchedule schedule_original(double L, Index N)
{
    require(L > 0.0 && std::isfinite(L), "schedule_original: L must be positive");
    require(N >= 1, "schedule_original: N must be >= 1");
    AGSchedule s;
    s.alphas.resize(N);
    s.deltas.resize(N);
    s.omegas.setConstant(N, 1.0 / (2.0 * L));
    for (Index k = 0; k < N; ++k) {
        const double kk = static_cast<double>(k + 1);
        s.alphas[k] = 2.0 / (kk + 1.0);
        s.deltas[k] = kk * s.omegas[k] / 2.0;
    }
    s.refresh_gammas();
    const auto chk = verify_schedule(s, L);
    if (!chk.ok) throw InvalidArgument("schedule_original failed verification: " + chk.message);
    return s;
}

ScheduleCheck verify_schedule(const AGSchedule& s, double L)
{
    ScheduleCheck r;
    const Index N = s.size();
    auto fail = [&](const char* cond, Index k, const std::string& msg) {
        r.ok = false;
        r.condition = cond;
        r.index = k + 1;
        r.message = std::string(cond) + " violated at k=" + std::to_string(k + 1) + ": " + msg;
        return r;
    };
    if (N == 0 || s.deltas.size() != N || s.omegas.size() != N || s.gammas.size() != N) {
        r.ok = false;
        r.condition = "shape";
        r.message = "schedule vectors are empty or have mismatched lengths";
        return r;
    }
    if (s.alphas[0] != 1.0) return fail("alpha1", 0, "alpha_1 must equal 1");
    if (std::abs(s.gammas[0] - 1.0) > kRelSlack) return fail("gamma-recursion", 0, "Gamma_1 must equal 1");
    double prev_ratio = 0.0;
    for (Index k = 0; k < N; ++k) {
        const double a = s.alphas[k], d = s.deltas[k], w = s.omegas[k];
        if (k > 0 && !(a > 0.0 && a < 1.0)) return fail("alpha-range", k, "alpha_k must lie in (0,1)");
        if (!(d > 0.0) || !(w > 0.0)) return fail("alpha-range", k, "delta_k and omega_k must be positive");
        if (k > 0) {
            const double expect = (1.0 - a) * s.gammas[k - 1];
            if (std::abs(s.gammas[k] - expect) > kRelSlack * std::abs(expect))
                return fail("gamma-recursion", k, "Gamma_k != (1 - alpha_k) Gamma_{k-1}");
        }
        if (!leq(a * d, w)) return fail("convcond1-lower", k, "alpha_k delta_k > omega_k");
        if (!(w * L < 1.0)) return fail("convcond1-strict", k, "omega_k >= 1/L");
        const double ratio = a / (d * s.gammas[k]);
        if (k > 0 && !leq(ratio, prev_ratio))
            return fail("convcond2", k, "alpha_k/(delta_k Gamma_k) increased");
        prev_ratio = ratio;
    }
    return r;
}

bool admissible_ab(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0 && b < 1.0)) return false;
    return a * (1.0 - b) * std::pow(2.0, 2.0 - b) - a * b * (1.0 - b) * std::pow(2.0, -b) - 1.0 >= 0.0;
}

DampingBound damping_lower_bound(double k, double a, double b)
{
    DampingBound r;
    r.value = 2.0 / ((1.0 + a * std::pow(k, -b)) * k + 1.0);
    r.admissible = admissible_ab(a, b);
    return r;
}

OptimalAB optimal_ab(double k)
{
    require(k >= 8.0, "optimal_ab requires k >= 8");
    const double l = std::log(2.0 / k);
    OptimalAB r;
    r.b = (2.0 + 5.0 * l + std::sqrt(9.0 * l * l + 4.0)) / (2.0 * l);
    r.a = std::pow(2.0, r.b) / ((1.0 - r.b) * (4.0 - r.b));
    return r;
}

double complexity_bound(const AGSchedule& s, double L_psi, double L_h, const VectorXd& x0,
                        const VectorXd& x_star, double M)
{
    require(s.size() >= 1, "complexity_bound: empty schedule");
    double denom = 0.0;
    for (Index k = 0; k < s.size(); ++k) {
        if (s.omegas[k] * L_psi >= 1.0) throw InvalidArgument("complexity_bound: omega_k >= 1/L_psi");
        denom += s.omegas[k] * (1.0 - L_psi * s.omegas[k]) / s.gammas[k];
    }
    const double num = (x0 - x_star).squaredNorm() / s.deltas[0] +
                       2.0 * L_h / s.gammas[s.size() - 1] * (x_star.squaredNorm() + M * M);
    return num / denom;
}

} // namespace hdsparse
