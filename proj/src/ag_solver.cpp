#include <hdsparse/ag_solver.hpp>

#include <chrono>
#include <cmath>

namespace hdsparse {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_finite(const VectorXd& v, double f, const char* what, Index k)
{
    if (!std::isfinite(f) || !v.allFinite())
        throw NumericalError(std::string(what) + ": non-finite objective or gradient at iteration " + std::to_string(k));
}

} // namespace

VectorXd grad_mapping(const VectorXd& x, const VectorXd& y, double c, const PenaltySpec& penalty,
                      const std::vector<Index>& skip)
{
    require(c > 0.0, "grad_mapping: c must be positive");
    return (x - prox_scaled_l1(x, y, c, penalty.lambda, skip)) / c;
}

double composite_value(const SmoothObjective& obj, const PenaltySpec& penalty, const VectorXd& x,
                       const std::vector<Index>& skip)
{
    return obj.value(x) + chi_total(penalty, x, skip);
}

SolveReport ag_solve(const SmoothObjective& obj, const PenaltySpec& penalty, const AGSchedule& s,
                     const VectorXd& x0, const AGOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    require(x0.size() == obj.dimension, "ag_solve: x0 has the wrong dimension");
    require(x0.allFinite(), "ag_solve: x0 must be finite");
    require(s.size() >= opt.max_iter, "ag_solve: schedule shorter than max_iter");
    penalty.validate();

    SolveReport rep;
    VectorXd x_prev = x0;
    VectorXd ag_prev = x0;
    VectorXd best = x0;
    double best_f = INFINITY;
    const double lam = penalty.lambda;

    for (Index k = 1; k <= opt.max_iter; ++k) {
        const double alpha = s.alphas[k - 1];
        const VectorXd x_md = alpha * x_prev + (1.0 - alpha) * ag_prev;
        const VectorXd g = obj.grad(x_md);
        check_finite(g, 0.0, "ag_solve", k);

        VectorXd x = prox_scaled_l1(x_prev, g, s.deltas[k - 1], lam, opt.skip);
        VectorXd x_ag = prox_scaled_l1(x_md, g, s.omegas[k - 1], lam, opt.skip);
        const double f = composite_value(obj, penalty, x_ag, opt.skip);
        check_finite(x_ag, f, "ag_solve", k);

        rep.objective_trace.push_back(f);
        rep.grad_map_trace.push_back((x_md - x_ag).norm() / s.omegas[k - 1]);
        if (opt.on_iterate) opt.on_iterate(AGIterate{k, &x_md, &g, &x, &x_ag});
        if (f <= best_f) {
            best_f = f;
            best = x_ag;
        }
        rep.iterations = k;
        const double change = (x_ag - ag_prev).lpNorm<Eigen::Infinity>();
        x_prev = std::move(x);
        ag_prev = std::move(x_ag);
        if (change < opt.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.estimate = std::move(best);
    rep.wall_time = seconds_since(t0);
    return rep;
}

SolveReport ag_solve(const SmoothObjective& obj, const PenaltySpec& penalty, const VectorXd& x0,
                     const AGOptions& opt, bool original_schedule)
{
    const Index N = std::max<Index>(opt.max_iter, 1);
    const AGSchedule s = original_schedule ? schedule_original(obj.lipschitz, N) : schedule_optimal(obj.lipschitz, N);
    return ag_solve(obj, penalty, s, x0, opt);
}

SolveReport pg_solve(const SmoothObjective& obj, const PenaltySpec& penalty, double step, const VectorXd& x0,
                     const PGOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    require(x0.size() == obj.dimension, "pg_solve: x0 has the wrong dimension");
    require(step > 0.0, "pg_solve: step must be positive");
    penalty.validate();

    SolveReport rep;
    VectorXd x = x0;
    double f_prev = composite_value(obj, penalty, x, opt.skip);
    for (Index k = 1; k <= opt.max_iter; ++k) {
        const VectorXd g = obj.grad(x);
        check_finite(g, f_prev, "pg_solve", k);
        VectorXd next = prox_scaled_l1(x, g, step, penalty.lambda, opt.skip);
        const double f = composite_value(obj, penalty, next, opt.skip);
        check_finite(next, f, "pg_solve", k);
        if (f > f_prev + 1e-10 * std::max(1.0, std::abs(f_prev))) {
            throw NumericalError("pg_solve: objective increased at iteration " + std::to_string(k) +
                                 " (step too large for the Lipschitz constant?)");
        }
        rep.objective_trace.push_back(f);
        rep.grad_map_trace.push_back((x - next).norm() / step);
        rep.iterations = k;
        const double change = (next - x).lpNorm<Eigen::Infinity>();
        x = std::move(next);
        f_prev = f;
        if (change < opt.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.estimate = std::move(x);
    rep.wall_time = seconds_since(t0);
    return rep;
}

} // namespace hdsparse
