#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/objectives.hpp>
#include <hdsparse/penalty.hpp>
#include <hdsparse/schedule.hpp>

#include <functional>

namespace hdsparse {

struct SolveReport {
    VectorXd estimate;
    Index iterations = 0;
    std::vector<double> objective_trace; // Psi + chi at each reported iterate
    std::vector<double> grad_map_trace;  // |G| (Euclidean) at each iteration
    bool converged = false;
    double wall_time = 0.0; // seconds
    Warnings warnings;
};

/// (x - prox_scaled_l1(x, y, c, lambda)) / c.
VectorXd grad_mapping(const VectorXd& x, const VectorXd& y, double c, const PenaltySpec& penalty,
                      const std::vector<Index>& skip = {});

/// Per-iteration view of the accelerated iterates, for diagnostics and tests.
struct AGIterate {
    Index k = 0; // 1-based
    const VectorXd* x_md = nullptr;
    const VectorXd* grad_md = nullptr;
    const VectorXd* x = nullptr;
    const VectorXd* x_ag = nullptr;
};

struct AGOptions {
    double tol = 1e-4;
    Index max_iter = 2000;
    std::vector<Index> skip;                          // unpenalized coordinates
    std::function<void(const AGIterate&)> on_iterate; // optional observer
};

/**
 * Accelerated gradient for min Psi(x) + chi(x), chi = lambda |x|_1.
 *
 *   x_md_k = alpha_k x_{k-1} + (1 - alpha_k) x_ag_{k-1}
 *   x_k    = P(x_{k-1}, grad Psi(x_md_k), delta_k)
 *   x_ag_k = P(x_md_k,  grad Psi(x_md_k), omega_k)
 *
 * Stops when |x_ag_k - x_ag_{k-1}|_inf < tol. The schedule must cover
 * max_iter iterations. The reported estimate is the x_ag iterate with the
 * smallest objective.
 */
SolveReport ag_solve(const SmoothObjective& obj, const PenaltySpec& penalty, const AGSchedule& s,
                     const VectorXd& x0, const AGOptions& opt = {});

/// Convenience overload building the schedule for max_iter iterations with L = obj.lipschitz.
SolveReport ag_solve(const SmoothObjective& obj, const PenaltySpec& penalty, const VectorXd& x0,
                     const AGOptions& opt = {}, bool original_schedule = false);

struct PGOptions {
    double tol = 1e-4;
    Index max_iter = 2000;
    std::vector<Index> skip;
};

/**
 * Proximal gradient x_{k+1} = P(x_k, grad Psi(x_k), step). Throws
 * NumericalError if the objective increases by more than 1e-10 relative.
 */
SolveReport pg_solve(const SmoothObjective& obj, const PenaltySpec& penalty, double step, const VectorXd& x0,
                     const PGOptions& opt = {});

/// Full composite objective Psi(x) + lambda |x|_1 over penalized coordinates.
double composite_value(const SmoothObjective& obj, const PenaltySpec& penalty, const VectorXd& x,
                       const std::vector<Index>& skip = {});

} // namespace hdsparse
