#pragma once
#include <hdsparse/common.hpp>

#include <optional>
#include <string>

namespace hdsparse {

/**
 * Damping and step sequences for the accelerated gradient method.
 * Entry k-1 of each vector holds the value for iteration k (1-based).
 */
struct AGSchedule {
    VectorXd alphas;
    VectorXd deltas;
    VectorXd omegas;
    VectorXd gammas; // Gamma_1 = 1, Gamma_k = (1 - alpha_k) Gamma_{k-1}

    Index size() const { return alphas.size(); }

    /// Recomputes gammas from alphas.
    void refresh_gammas();
};

/// alpha_{k+1} = 2/(1 + sqrt(1 + 4/alpha_k^2)), omega = 2/(3L), delta_{k+1} = omega/alpha_{k+1}.
AGSchedule schedule_optimal(double L, Index N);

/// alpha_k = 2/(k+1), omega = 1/(2L), delta_k = k*omega/2. Throws if the result fails verification.
AGSchedule schedule_original(double L, Index N);

struct ScheduleCheck {
    bool ok = true;
    std::string condition; // "alpha1", "alpha-range", "gamma-recursion", "convcond1-lower", "convcond1-strict", "convcond2"
    Index index = 0;       // 1-based iteration of the first violation
    std::string message;
};

/**
 * Checks alpha_k delta_k <= omega_k < 1/L and that alpha_k / (delta_k Gamma_k)
 * is nonincreasing. Comparisons allow a relative slack of 1e-10 for rounding,
 * except the strict upper bound on omega.
 */
ScheduleCheck verify_schedule(const AGSchedule& s, double L);

/// Lower sandwich bound 2/((1 + a k^{-b}) k + 1); `admissible` mirrors admissible_ab(a, b).
struct DampingBound {
    double value = 0.0;
    bool admissible = true;
};

DampingBound damping_lower_bound(double k, double a, double b);

/// a(1-b) 2^{2-b} - a b (1-b) 2^{-b} - 1 >= 0 with a > 0 and 0 < b < 1.
bool admissible_ab(double a, double b);

struct OptimalAB {
    double a = 0.0;
    double b = 0.0;
};

/// Tightest admissible (a, b) at iteration k >= 8.
OptimalAB optimal_ab(double k);

/**
 * [sum_k omega_k (1 - L_psi omega_k) / Gamma_k]^{-1}
 *   * [|x0 - x*|^2 / delta_1 + 2 L_h / Gamma_N (|x*|^2 + M^2)]
 */
double complexity_bound(const AGSchedule& s, double L_psi, double L_h, const VectorXd& x0,
                        const VectorXd& x_star, double M);

} // namespace hdsparse
