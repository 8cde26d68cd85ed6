#pragma once
#include <hdsparse/ag_solver.hpp>
#include <hdsparse/common.hpp>
#include <hdsparse/linear_cg.hpp>
#include <hdsparse/objectives.hpp>

#include <functional>
#include <optional>

namespace hdsparse {

/**
 * min g(x) + h(x) with g smooth (possibly nonconvex, gradient L-Lipschitz)
 * and h convex with an inexpensive prox.
 */
struct CompositeProblem {
    std::function<double(const VectorXd&)> g_value;
    std::function<VectorXd(const VectorXd&)> g_grad;
    double lipschitz_g = 0.0;
    std::function<double(const VectorXd&)> h_value;
    std::function<VectorXd(const VectorXd&, double)> h_prox; // (v, rho) -> prox_{rho h}(v)
    Index dimension = 0;
};

/// g = obj (smooth part, concave penalty part included), h = lambda |x|_1 over penalized coordinates.
CompositeProblem make_composite(const SmoothObjective& obj, const PenaltySpec& penalty,
                                const std::vector<Index>& skip = {});

enum class LineSearch { WolfeSurrogate, ExactBrent, Backtrack };

std::string to_string(LineSearch ls);
LineSearch line_search_from_string(const std::string& s);

struct PCGConfig {
    double rho = 0.0; // 0 selects 0.5 / L_g
    double eta = 0.01;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    LineSearch line_search = LineSearch::ExactBrent;
    double tol = 1e-6;
    Index max_iter = 5000;

    /// rho actually used for problem p.
    double rho_for(const CompositeProblem& p) const;
};

struct StationarityCertificate {
    VectorXd x_hat;
    double moreau_grad_norm = 0.0; // |G(x_hat)|_inf
    double rho_used = 0.0;
};

/// (x - prox_{rho h}(x - rho grad g(x))) / rho.
VectorXd linearized_moreau_grad(const CompositeProblem& p, const VectorXd& x, double rho);

/// Same quantity written as grad g(x) + (v - prox_{rho h}(v))/rho with v = x - rho grad g(x).
VectorXd linearized_moreau_grad_decomposed(const CompositeProblem& p, const VectorXd& x, double rho);

struct MoreauLipschitz {
    std::optional<double> exact; // absent when rho L_g >= 1
    double linearized = 0.0;     // L_g + 1/rho
};

MoreauLipschitz moreau_lipschitz_constants(double rho, double L_g);

/// x - rho grad g(x).
VectorXd tilde_g(const VectorXd& x, double rho, const std::function<VectorXd(const VectorXd&)>& g_grad);

/// Solves tilde_g(y) = z by iterating y <- z + rho grad g(y); throws after 1e4 iterations.
VectorXd tilde_g_inverse(const VectorXd& z, double rho, const std::function<VectorXd(const VectorXd&)>& g_grad,
                         double tol);

/**
 * Hager-Zhang direction -s_next + max(beta, eta_k) d_prev, with
 * y = s_next - s_prev, beta = <y - 2 (|y|^2/<d,y>) d, s_next> / <d,y>,
 * eta_k = -1 / (|d| min(eta, |s_prev|)). When <d,y> = 0, beta_bar = eta_k.
 */
VectorXd hz_direction(const VectorXd& s_next, const VectorXd& s_prev, const VectorXd& d_prev, double eta);

/// g(x) + <grad g(x), p - x> + |p - x|^2/(2 rho) + h(p), p = prox_{rho h}(x - rho grad g(x)).
double surrogate_objective(const CompositeProblem& p, const VectorXd& x, double rho);

struct LineSearchResult {
    double alpha = 0.0;
    Index evaluations = 0;
};

/// Step length along a descent direction d (<d, G(x)> < 0). Throws NumericalError when no bracket is found.
LineSearchResult line_search(const CompositeProblem& p, const VectorXd& x, const VectorXd& d,
                             const PCGConfig& config);

struct PCGResult {
    SolveReport report;
    StationarityCertificate certificate;
};

/**
 * Proximal Hager-Zhang conjugate gradient on the linearized Moreau gradient
 * s = G(x). Stops when |s|_inf <= tol. The returned x_hat is the prox point
 * of the final iterate, which carries the exact zeros of the l1 prox.
 */
PCGResult pcg_solve(const CompositeProblem& p, const PCGConfig& config, const VectorXd& x0);

} // namespace hdsparse
