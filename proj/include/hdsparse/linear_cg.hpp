#pragma once
#include <hdsparse/common.hpp>

#include <cmath>
#include <type_traits>
#include <vector>

namespace hdsparse {

template <typename Scalar>
struct LinearCGResult {
    Vector<Scalar> x;
    Index iterations = 0;
    Scalar residual_norm = 0;
    std::vector<Vector<Scalar>> residuals; // only filled when requested
};

/**
 * Conjugate gradient for A x = b with A symmetric positive definite, applied
 * through `apply(v) -> A v`. Starts from x = 0 and stops once
 * |r| <= tol |b|. Throws NumericalError past max_iter.
 */
template <typename Scalar, typename Apply>
LinearCGResult<Scalar> linear_cg_detailed(Apply&& apply, const Vector<Scalar>& b, Scalar tol, Index max_iter,
                                          bool keep_residuals = false)
{
    LinearCGResult<Scalar> out;
    out.x = Vector<Scalar>::Zero(b.size());
    Vector<Scalar> r = b;
    Vector<Scalar> p = r;
    Scalar rr = r.squaredNorm();
    const Scalar target = tol * b.norm();
    if (keep_residuals) out.residuals.push_back(r);
    if (std::sqrt(rr) <= target) {
        out.residual_norm = std::sqrt(rr);
        return out;
    }
    for (Index k = 0; k < max_iter; ++k) {
        const Vector<Scalar> Ap = apply(p);
        const Scalar pAp = p.dot(Ap);
        if (!(pAp > Scalar(0)))
            throw NumericalError("linear_cg: operator is not positive definite (p'Ap <= 0)");
        const Scalar a = rr / pAp;
        out.x += a * p;
        r -= a * Ap;
        const Scalar rr_next = r.squaredNorm();
        out.iterations = k + 1;
        if (keep_residuals) out.residuals.push_back(r);
        if (std::sqrt(rr_next) <= target) {
            out.residual_norm = std::sqrt(rr_next);
            return out;
        }
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    throw NumericalError("linear_cg: no convergence after " + std::to_string(max_iter) +
                         " iterations, residual " + std::to_string(std::sqrt(rr)));
}

template <typename Scalar, typename Apply>
    requires(!std::is_base_of_v<Eigen::EigenBase<std::decay_t<Apply>>, std::decay_t<Apply>>)
Vector<Scalar> linear_cg(Apply&& apply, const Vector<Scalar>& b, Scalar tol, Index max_iter)
{
    return linear_cg_detailed<Scalar>(std::forward<Apply>(apply), b, tol, max_iter).x;
}

/// Dense-matrix convenience overload.
template <typename Derived>
Vector<typename Derived::Scalar> linear_cg(const Eigen::MatrixBase<Derived>& A,
                                           const Vector<typename Derived::Scalar>& b,
                                           typename Derived::Scalar tol, Index max_iter)
{
    using Scalar = typename Derived::Scalar;
    return linear_cg<Scalar>([&](const Vector<Scalar>& v) -> Vector<Scalar> { return A * v; }, b, tol, max_iter);
}

} // namespace hdsparse
