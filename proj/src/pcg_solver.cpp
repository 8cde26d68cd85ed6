#include <hdsparse/brent.hpp>
#include <hdsparse/pcg_solver.hpp>

#include <chrono>
#include <cmath>

namespace hdsparse {

CompositeProblem make_composite(const SmoothObjective& obj, const PenaltySpec& penalty,
                                const std::vector<Index>& skip)
{
    penalty.validate();
    CompositeProblem p;
    p.g_value = obj.value;
    p.g_grad = obj.grad;
    p.lipschitz_g = obj.lipschitz;
    p.dimension = obj.dimension;
    p.h_value = [penalty, skip](const VectorXd& x) { return chi_total(penalty, x, skip); };
    const double lam = penalty.lambda;
    p.h_prox = [lam, skip](const VectorXd& v, double rho) { return prox_l1(v, rho * lam, skip); };
    return p;
}

std::string to_string(LineSearch ls)
{
    switch (ls) {
    case LineSearch::WolfeSurrogate: return "wolfe";
    case LineSearch::ExactBrent: return "brent";
    case LineSearch::Backtrack: return "backtrack";
    }
    return "brent";
}

LineSearch line_search_from_string(const std::string& s)
{
    if (s == "wolfe") return LineSearch::WolfeSurrogate;
    if (s == "brent") return LineSearch::ExactBrent;
    if (s == "backtrack") return LineSearch::Backtrack;
    throw InvalidArgument("unknown line search '" + s + "' (expected wolfe|brent|backtrack)");
}

double PCGConfig::rho_for(const CompositeProblem& p) const
{
    require(p.lipschitz_g > 0.0, "PCGConfig: problem Lipschitz constant must be positive");
    const double r = rho > 0.0 ? rho : 0.5 / p.lipschitz_g;
    require(r * p.lipschitz_g < 1.0, "PCGConfig: rho * L_g must be < 1");
    return r;
}

VectorXd linearized_moreau_grad(const CompositeProblem& p, const VectorXd& x, double rho)
{
    const VectorXd v = x - rho * p.g_grad(x);
    return (x - p.h_prox(v, rho)) / rho;
}

VectorXd linearized_moreau_grad_decomposed(const CompositeProblem& p, const VectorXd& x, double rho)
{
    const VectorXd g = p.g_grad(x);
    const VectorXd v = x - rho * g;
    return g + (v - p.h_prox(v, rho)) / rho;
}

MoreauLipschitz moreau_lipschitz_constants(double rho, double L_g)
{
    require(rho > 0.0 && L_g >= 0.0, "moreau_lipschitz_constants: rho > 0 and L_g >= 0 required");
    MoreauLipschitz r;
    r.linearized = L_g + 1.0 / rho;
    const double lr = L_g * rho;
    if (lr < 1.0) r.exact = (2.0 * lr + 1.0 + std::sqrt(8.0 * lr + 1.0)) / (2.0 * rho * (1.0 - lr));
    return r;
}

VectorXd tilde_g(const VectorXd& x, double rho, const std::function<VectorXd(const VectorXd&)>& g_grad)
{
    return x - rho * g_grad(x);
}

VectorXd tilde_g_inverse(const VectorXd& z, double rho, const std::function<VectorXd(const VectorXd&)>& g_grad,
                         double tol)
{
    VectorXd y = z;
    for (Index it = 0; it < 10000; ++it) {
        VectorXd next = z + rho * g_grad(y);
        const double step = (next - y).norm();
        y = std::move(next);
        if (step <= tol) return y;
    }
    throw NumericalError("tilde_g_inverse: no convergence in 10000 iterations (is rho * L_g < 1?)");
}

VectorXd hz_direction(const VectorXd& s_next, const VectorXd& s_prev, const VectorXd& d_prev, double eta)
{
    const double dn = d_prev.norm();
    require(dn > 0.0, "hz_direction: previous direction must be nonzero");
    const VectorXd y = s_next - s_prev;
    const double dy = d_prev.dot(y);
    const double eta_k = -1.0 / (dn * std::min(eta, s_prev.norm()));
    double beta_bar = eta_k;
    if (dy != 0.0) {
        const double beta = (y - 2.0 * (y.squaredNorm() / dy) * d_prev).dot(s_next) / dy;
        beta_bar = std::max(beta, eta_k);
    }
    if (!std::isfinite(beta_bar)) return -s_next;
    return -s_next + beta_bar * d_prev;
}

double surrogate_objective(const CompositeProblem& p, const VectorXd& x, double rho)
{
    const VectorXd g = p.g_grad(x);
    const VectorXd pr = p.h_prox(x - rho * g, rho);
    const VectorXd diff = pr - x;
    return p.g_value(x) + g.dot(diff) + diff.squaredNorm() / (2.0 * rho) + p.h_value(pr);
}

namespace {

struct BacktrackConstants {
    double kappa = 1.0;  // initial trial scale
    double sigma = 1e-4; // sufficient-angle constant
};

LineSearchResult search_brent(const CompositeProblem& p, const VectorXd& x, const VectorXd& d, double rho)
{
    LineSearchResult r;
    auto phi = [&](double a) {
        ++r.evaluations;
        return linearized_moreau_grad(p, x + a * d, rho).dot(d);
    };
    double lo = 0.0;
    double f_lo = phi(0.0);
    if (!(f_lo < 0.0)) throw NumericalError("line_search: direction is not a descent direction");
    double hi = rho;
    double f_hi = phi(hi);
    int doublings = 0;
    while (f_hi < 0.0) {
        if (++doublings > 60)
            throw NumericalError("line_search(brent): no sign change after 60 doublings, last alpha " +
                                 std::to_string(hi) + ", slope " + std::to_string(f_hi));
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = phi(hi);
    }
    if (f_hi == 0.0) {
        r.alpha = hi;
        return r;
    }
    const auto res = brent_root<double>(phi, lo, hi, f_lo, f_hi, 1e-10, 1e-15 * hi, 200);
    r.alpha = res.x > 0.0 ? res.x : hi;
    return r;
}

// Directional derivative of the surrogate: <(I - rho H) G(x), d>, H d by a central difference of grad g.
double surrogate_slope(const CompositeProblem& p, const VectorXd& x, const VectorXd& d, double rho)
{
    const VectorXd G = linearized_moreau_grad(p, x, rho);
    const double eps = 1e-6 * std::max(1.0, x.norm()) / d.norm();
    const VectorXd Hd = (p.g_grad(x + eps * d) - p.g_grad(x - eps * d)) / (2.0 * eps);
    return G.dot(d) - rho * Hd.dot(G);
}

LineSearchResult search_wolfe(const CompositeProblem& p, const VectorXd& x, const VectorXd& d, double rho,
                              const PCGConfig& c)
{
    LineSearchResult r;
    const double f0 = surrogate_objective(p, x, rho);
    const double slope0 = surrogate_slope(p, x, d, rho);
    r.evaluations = 2;
    if (!(slope0 < 0.0)) throw NumericalError("line_search: direction is not a descent direction");
    double lo = 0.0, hi = INFINITY, a = rho;
    for (int it = 0; it < 120; ++it) {
        const VectorXd xa = x + a * d;
        const double fa = surrogate_objective(p, xa, rho);
        r.evaluations += 1;
        if (fa > f0 + c.wolfe_c1 * a * slope0) {
            hi = a;
        } else {
            const double sa = surrogate_slope(p, xa, d, rho);
            r.evaluations += 1;
            if (sa >= c.wolfe_c2 * slope0) {
                r.alpha = a;
                return r;
            }
            lo = a;
        }
        a = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * a;
    }
    throw NumericalError("line_search(wolfe): no step satisfying both conditions, last bracket [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

LineSearchResult search_backtrack(const CompositeProblem& p, const VectorXd& x, const VectorXd& d, double rho)
{
    const BacktrackConstants bc;
    LineSearchResult r;
    const double dd = d.squaredNorm();
    double a = bc.kappa;
    for (int it = 0; it <= 60; ++it) {
        const double lhs = -linearized_moreau_grad(p, x + a * d, rho).dot(d);
        r.evaluations += 1;
        if (lhs >= bc.sigma * a * dd) {
            r.alpha = a;
            return r;
        }
        a *= 0.5;
    }
    throw NumericalError("line_search(backtrack): condition not met after 60 halvings");
}

} // namespace

LineSearchResult line_search(const CompositeProblem& p, const VectorXd& x, const VectorXd& d,
                             const PCGConfig& config)
{
    const double rho = config.rho_for(p);
    switch (config.line_search) {
    case LineSearch::ExactBrent: return search_brent(p, x, d, rho);
    case LineSearch::WolfeSurrogate: return search_wolfe(p, x, d, rho, config);
    case LineSearch::Backtrack: return search_backtrack(p, x, d, rho);
    }
    return search_brent(p, x, d, rho);
}

PCGResult pcg_solve(const CompositeProblem& p, const PCGConfig& config, const VectorXd& x0)
{
    const auto t0 = std::chrono::steady_clock::now();
    require(x0.size() == p.dimension, "pcg_solve: x0 has the wrong dimension");
    require(config.eta > 0.0, "pcg_solve: eta must be positive");
    require(0.0 < config.wolfe_c1 && config.wolfe_c1 < config.wolfe_c2 && config.wolfe_c2 < 1.0,
            "pcg_solve: need 0 < c1 < c2 < 1");
    const double rho = config.rho_for(p);
    const Index dim = std::max<Index>(p.dimension, 1);

    PCGResult out;
    SolveReport& rep = out.report;
    VectorXd x = x0;
    VectorXd s = linearized_moreau_grad(p, x, rho);
    if (!s.allFinite()) throw NumericalError("pcg_solve: non-finite gradient at the starting point");
    VectorXd d = -s;
    Index since_restart = 0;

    for (Index k = 1; k <= config.max_iter; ++k) {
        if (s.lpNorm<Eigen::Infinity>() <= config.tol) {
            rep.converged = true;
            break;
        }
        LineSearchResult ls;
        try {
            ls = line_search(p, x, d, config);
        } catch (const NumericalError& e) {
            const std::string at = "iteration " + std::to_string(k) + ": ";
            if (since_restart > 0) {
                rep.warnings.push_back(at + e.what() + "; restarting along -s");
                d = -s;
                since_restart = 0;
            }
            try {
                ls = line_search(p, x, d, config);
            } catch (const NumericalError& e2) {
                // The surrogate is only C^1 when g is; the derivative-only search still applies.
                if (config.line_search == LineSearch::ExactBrent) throw;
                rep.warnings.push_back(at + e2.what() + "; using the brent search for this step");
                PCGConfig fallback = config;
                fallback.line_search = LineSearch::ExactBrent;
                ls = line_search(p, x, d, fallback);
            }
        }
        x += ls.alpha * d;
        const VectorXd g = p.g_grad(x);
        const VectorXd pr = p.h_prox(x - rho * g, rho);
        VectorXd s_next = (x - pr) / rho;
        const double f = p.g_value(pr) + p.h_value(pr);
        if (!std::isfinite(f) || !s_next.allFinite())
            throw NumericalError("pcg_solve: non-finite values at iteration " + std::to_string(k));
        rep.objective_trace.push_back(f);
        rep.grad_map_trace.push_back(s_next.norm());
        rep.iterations = k;

        ++since_restart;
        if (since_restart >= dim) {
            d = -s_next;
            since_restart = 0;
        } else {
            d = hz_direction(s_next, s, d, config.eta);
            if (d.dot(s_next) >= 0.0) {
                d = -s_next;
                since_restart = 0;
            }
        }
        s = std::move(s_next);
    }
    if (!rep.converged && s.lpNorm<Eigen::Infinity>() <= config.tol) rep.converged = true;

    const VectorXd g = p.g_grad(x);
    VectorXd x_hat = p.h_prox(x - rho * g, rho);
    out.certificate.rho_used = rho;
    out.certificate.moreau_grad_norm = linearized_moreau_grad(p, x_hat, rho).lpNorm<Eigen::Infinity>();
    out.certificate.x_hat = x_hat;
    rep.estimate = std::move(x_hat);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace hdsparse
