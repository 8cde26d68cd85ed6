#pragma once
#include <hdsparse/common.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace hdsparse {

enum class PenaltyKind { L1, SCAD, MCP };

/**
 * Sparsity penalty parameters.
 *
 * Every penalty splits into chi(b) = lambda * sum|b_j| (convex) plus a smooth
 * concave remainder h with an L-Lipschitz gradient.
 */
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::L1;
    double lambda = 0.0;
    double a = 3.7;     // SCAD
    double gamma = 3.0; // MCP
    bool penalize_intercept = false;

    static PenaltySpec l1(double lambda);
    static PenaltySpec scad(double lambda, double a = 3.7);
    static PenaltySpec mcp(double lambda, double gamma = 3.0);

    /// Throws InvalidArgument when a parameter is out of range.
    void validate() const;

    /// Lipschitz constant of the concave part's gradient: 1/(a-1), 1/gamma or 0.
    double lipschitz_h() const;

    PenaltySpec with_lambda(double l) const
    {
        PenaltySpec s = *this;
        s.lambda = l;
        return s;
    }
};

std::string to_string(PenaltyKind k);
PenaltyKind penalty_kind_from_string(const std::string& s);

/// Concave part h of the penalty at a single coordinate.
template <typename Scalar>
Scalar h_value(const PenaltySpec& spec, Scalar beta)
{
    using std::abs;
    const Scalar b = abs(beta);
    const Scalar lam = spec.lambda;
    switch (spec.kind) {
    case PenaltyKind::L1:
        return Scalar(0);
    case PenaltyKind::SCAD: {
        const Scalar a = spec.a;
        if (b < lam) return Scalar(0);
        if (b < a * lam) return (Scalar(2) * lam * b - b * b - lam * lam) / (Scalar(2) * (a - Scalar(1)));
        return Scalar(0.5) * (a + Scalar(1)) * lam * lam - lam * b;
    }
    case PenaltyKind::MCP: {
        const Scalar g = spec.gamma;
        if (b < g * lam) return -b * b / (Scalar(2) * g);
        return Scalar(0.5) * g * lam * lam - lam * b;
    }
    }
    return Scalar(0);
}

/// Derivative of h at a single coordinate.
template <typename Scalar>
Scalar h_derivative(const PenaltySpec& spec, Scalar beta)
{
    using std::abs;
    const Scalar b = abs(beta);
    const Scalar sgn = beta > Scalar(0) ? Scalar(1) : (beta < Scalar(0) ? Scalar(-1) : Scalar(0));
    const Scalar lam = spec.lambda;
    switch (spec.kind) {
    case PenaltyKind::L1:
        return Scalar(0);
    case PenaltyKind::SCAD: {
        const Scalar a = spec.a;
        if (b < lam) return Scalar(0);
        if (b < a * lam) return sgn * (lam - b) / (a - Scalar(1));
        return -lam * sgn;
    }
    case PenaltyKind::MCP: {
        const Scalar g = spec.gamma;
        if (b < g * lam) return -beta / g;
        return -lam * sgn;
    }
    }
    return Scalar(0);
}

/// Full penalty at a single coordinate: lambda|b| + h(b).
template <typename Scalar>
Scalar penalty_value(const PenaltySpec& spec, Scalar beta)
{
    using std::abs;
    return Scalar(spec.lambda) * abs(beta) + h_value(spec, beta);
}

/// True when coordinate j is exempt from the penalty.
inline bool is_skipped(const std::vector<Index>& skip, Index j)
{
    return std::find(skip.begin(), skip.end(), j) != skip.end();
}

/// Elementwise h'; skipped coordinates get 0.
template <typename Derived>
Vector<typename Derived::Scalar> h_grad(const PenaltySpec& spec, const Eigen::MatrixBase<Derived>& beta,
                                       const std::vector<Index>& skip = {})
{
    using Scalar = typename Derived::Scalar;
    Vector<Scalar> g(beta.size());
    for (Index j = 0; j < beta.size(); ++j)
        g[j] = is_skipped(skip, j) ? Scalar(0) : h_derivative(spec, beta.derived().coeff(j));
    return g;
}

/// Sum of h over penalized coordinates.
template <typename Derived>
typename Derived::Scalar h_total(const PenaltySpec& spec, const Eigen::MatrixBase<Derived>& beta,
                                 const std::vector<Index>& skip = {})
{
    typename Derived::Scalar s(0);
    for (Index j = 0; j < beta.size(); ++j)
        if (!is_skipped(skip, j)) s += h_value(spec, beta.derived().coeff(j));
    return s;
}

/// lambda * sum |b_j| over penalized coordinates.
template <typename Derived>
typename Derived::Scalar chi_total(const PenaltySpec& spec, const Eigen::MatrixBase<Derived>& beta,
                                   const std::vector<Index>& skip = {})
{
    using std::abs;
    typename Derived::Scalar s(0);
    for (Index j = 0; j < beta.size(); ++j)
        if (!is_skipped(skip, j)) s += abs(beta.derived().coeff(j));
    return typename Derived::Scalar(spec.lambda) * s;
}

/// Sum of the full penalty over penalized coordinates.
template <typename Derived>
typename Derived::Scalar penalty_total(const PenaltySpec& spec, const Eigen::MatrixBase<Derived>& beta,
                                       const std::vector<Index>& skip = {})
{
    return chi_total(spec, beta, skip) + h_total(spec, beta, skip);
}

/// Soft threshold; exactly 0 on the closed dead zone |v| <= t.
template <typename Scalar>
Scalar soft_threshold(Scalar v, Scalar t)
{
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return Scalar(0);
}

/**
 * argmin_u <y,u> + |u-x|^2/(2c) + lambda * sum_{j not in skip} |u_j|,
 * i.e. soft(x - c*y, c*lambda) with skipped coordinates left as x - c*y.
 */
template <typename DerivedX, typename DerivedY>
Vector<typename DerivedX::Scalar> prox_scaled_l1(const Eigen::MatrixBase<DerivedX>& x,
                                                 const Eigen::MatrixBase<DerivedY>& y,
                                                 typename DerivedX::Scalar c,
                                                 typename DerivedX::Scalar lambda,
                                                 const std::vector<Index>& skip = {})
{
    using Scalar = typename DerivedX::Scalar;
    Vector<Scalar> u = x - c * y;
    const Scalar t = c * lambda;
    for (Index j = 0; j < u.size(); ++j)
        if (!is_skipped(skip, j)) u[j] = soft_threshold(u[j], t);
    return u;
}

/// Prox of t*lambda*|.|_1 (no linear term), skipped coordinates untouched.
template <typename Derived>
Vector<typename Derived::Scalar> prox_l1(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar t,
                                         const std::vector<Index>& skip = {})
{
    Vector<typename Derived::Scalar> u = v;
    for (Index j = 0; j < u.size(); ++j)
        if (!is_skipped(skip, j)) u[j] = soft_threshold(u[j], t);
    return u;
}

/**
 * Difference-of-convex view of a penalty over a coefficient vector.
 * chi + h_value reproduces penalty_total.
 */
struct DCDecomposition {
    std::function<double(const VectorXd&)> chi;
    std::function<double(const VectorXd&)> h_value;
    std::function<VectorXd(const VectorXd&)> h_grad;
    double lipschitz_h = 0.0;
};

DCDecomposition decompose(const PenaltySpec& spec, std::vector<Index> skip = {});

/// Mollified |theta|; delta = 0 gives |theta| exactly.
template <typename Scalar>
Scalar smoothed_l1_value(Scalar theta, Scalar delta)
{
    using std::abs;
    using std::exp;
    using std::log;
    using std::log1p;
    if (delta < Scalar(0)) throw InvalidArgument("smoothed_l1_value: delta must be >= 0");
    if (delta == Scalar(0)) return abs(theta);
    // 2 log(e^t + 1) - t = |t| + 2 log(1 + e^{-|t|}) rewritten to avoid overflow.
    const Scalar t = delta * theta;
    const Scalar lse = abs(t) + Scalar(2) * log1p(exp(-abs(t)));
    return (lse - Scalar(2) * log(Scalar(2))) / delta;
}

/// d/dtheta of smoothed_l1_value: 2*sigmoid(delta*theta) - 1.
template <typename Scalar>
Scalar smoothed_l1_derivative(Scalar theta, Scalar delta)
{
    using std::tanh;
    if (delta == Scalar(0)) return theta > 0 ? Scalar(1) : (theta < 0 ? Scalar(-1) : Scalar(0));
    return tanh(delta * theta / Scalar(2));
}

/**
 * C^2 smoothing of the MCP concave part around |theta| = gamma*lambda with
 * half-width delta. delta = 0 is the plain MCP concave part.
 */
template <typename Scalar>
Scalar smoothed_mcp_concave(Scalar theta, Scalar lambda, Scalar gamma, Scalar delta)
{
    using std::abs;
    const Scalar gl = gamma * lambda;
    if (delta < Scalar(0) || delta >= gl)
        throw InvalidArgument("smoothed_mcp_concave: need 0 <= delta < gamma*lambda");
    const Scalar b = abs(theta);
    if (b < gl - delta) return -theta * theta / (Scalar(2) * gamma);
    if (b >= gl + delta) return -lambda * b + (Scalar(3) * gl * gl + delta * delta) / (Scalar(6) * gamma);
    const Scalar A = gl * gl * gl - Scalar(3) * delta * gl * gl + Scalar(3) * delta * delta * gl -
                     delta * delta * delta;
    const Scalar t2 = theta * theta;
    const Scalar first = (A + Scalar(3) * (gl + delta) * t2) / (Scalar(12) * delta * gamma);
    const Scalar second = (Scalar(3) * gl * gl - Scalar(6) * delta * gl + Scalar(3) * delta * delta + t2) * b /
                          (Scalar(12) * delta * gamma);
    return -(first - second);
}

} // namespace hdsparse
