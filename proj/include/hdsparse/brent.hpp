#pragma once
#include <hdsparse/common.hpp>

#include <cmath>
#include <limits>
#include <utility>

namespace hdsparse {

template <typename Scalar>
struct BrentResult {
    Scalar x = 0;
    Scalar fx = 0;
    Index iterations = 0;
    bool converged = false;
};

/**
 * Brent's root finder on a bracket [a, b] with f(a) f(b) <= 0.
 * Stops when |f| <= ftol or the bracket is narrower than xtol.
 */
template <typename Scalar, typename F>
BrentResult<Scalar> brent_root(F&& f, Scalar a, Scalar b, Scalar fa, Scalar fb, Scalar ftol, Scalar xtol,
                               Index max_iter = 200)
{
    using std::abs;
    if (fa * fb > Scalar(0)) throw InvalidArgument("brent_root: interval does not bracket a root");
    BrentResult<Scalar> r;
    if (abs(fa) <= ftol) return {a, fa, 0, true};
    if (abs(fb) <= ftol) return {b, fb, 0, true};
    Scalar c = a, fc = fa, d = b - a, e = d;
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    for (Index it = 1; it <= max_iter; ++it) {
        if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (abs(fc) < abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const Scalar tol1 = Scalar(2) * eps * abs(b) + Scalar(0.5) * xtol;
        const Scalar xm = Scalar(0.5) * (c - b);
        r.iterations = it;
        if (abs(fb) <= ftol || abs(xm) <= tol1) {
            r.x = b;
            r.fx = fb;
            r.converged = abs(fb) <= ftol || abs(xm) <= tol1;
            return r;
        }
        if (abs(e) >= tol1 && abs(fa) > abs(fb)) {
            Scalar p, q;
            const Scalar s = fb / fa;
            if (a == c) {
                p = Scalar(2) * xm * s;
                q = Scalar(1) - s;
            } else {
                const Scalar qq = fa / fc, rr = fb / fc;
                p = s * (Scalar(2) * xm * qq * (qq - rr) - (b - a) * (rr - Scalar(1)));
                q = (qq - Scalar(1)) * (rr - Scalar(1)) * (s - Scalar(1));
            }
            if (p > 0) q = -q;
            p = abs(p);
            const Scalar min1 = Scalar(3) * xm * q - abs(tol1 * q);
            const Scalar min2 = abs(e * q);
            if (Scalar(2) * p < (min1 < min2 ? min1 : min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    r.x = b;
    r.fx = fb;
    r.converged = false;
    return r;
}

/**
 * Brent's derivative-free minimizer on [a, b] (golden section with parabolic
 * steps). Returns the best point found.
 */
template <typename Scalar, typename F>
BrentResult<Scalar> brent_minimize(F&& f, Scalar a, Scalar b, Scalar xtol, Index max_iter = 500)
{
    using std::abs;
    using std::sqrt;
    const Scalar cgold = Scalar(0.5) * (Scalar(3) - sqrt(Scalar(5)));
    const Scalar eps = sqrt(std::numeric_limits<Scalar>::epsilon());
    if (a > b) std::swap(a, b);
    Scalar x = a + cgold * (b - a), w = x, v = x;
    Scalar fx = f(x), fw = fx, fv = fx;
    Scalar d = 0, e = 0;
    BrentResult<Scalar> r;
    for (Index it = 1; it <= max_iter; ++it) {
        const Scalar xm = Scalar(0.5) * (a + b);
        const Scalar tol1 = eps * abs(x) + xtol / Scalar(3);
        const Scalar tol2 = Scalar(2) * tol1;
        r.iterations = it;
        if (abs(x - xm) <= tol2 - Scalar(0.5) * (b - a)) {
            r.converged = true;
            break;
        }
        bool golden = true;
        if (abs(e) > tol1) {
            Scalar rr = (x - w) * (fx - fv);
            Scalar q = (x - v) * (fx - fw);
            Scalar p = (x - v) * q - (x - w) * rr;
            q = Scalar(2) * (q - rr);
            if (q > 0) p = -p;
            q = abs(q);
            const Scalar etemp = e;
            e = d;
            if (!(abs(p) >= abs(Scalar(0.5) * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
                d = p / q;
                const Scalar u = x + d;
                if (u - a < tol2 || b - u < tol2) d = xm >= x ? tol1 : -tol1;
                golden = false;
            }
        }
        if (golden) {
            e = (x >= xm ? a : b) - x;
            d = cgold * e;
        }
        const Scalar u = abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
        const Scalar fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x;
            else b = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x) a = u;
            else b = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    r.x = x;
    r.fx = fx;
    return r;
}

} // namespace hdsparse
