#pragma once
#include <hdsparse/common.hpp>

#include <cmath>

namespace hdsparse {

/// Kernels are parameterized by their standard deviation h.
enum class KernelKind { Epanechnikov, Gaussian };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

/// Univariate kernel with standard deviation h evaluated at t.
inline double kernel_value(KernelKind k, double t, double h)
{
    const double z = t / h;
    if (k == KernelKind::Gaussian) return std::exp(-0.5 * z * z) / (h * std::sqrt(2.0 * 3.14159265358979323846));
    // Support |t| < sqrt(5) h.
    const double z2 = z * z;
    if (z2 >= 5.0) return 0.0;
    return 0.75 / (std::sqrt(5.0) * h) * (1.0 - z2 / 5.0);
}

/// Half-width beyond which the kernel is zero (Epanechnikov) or negligible (Gaussian, 8 sd).
inline double kernel_support(KernelKind k, double h)
{
    return k == KernelKind::Gaussian ? 8.0 * h : std::sqrt(5.0) * h;
}

/// Equispaced nx x ny grid including both end points on each axis.
struct Grid2D {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    Index nx = 256, ny = 256;

    double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
    double x(Index i) const { return x_min + static_cast<double>(i) * dx(); }
    double y(Index j) const { return y_min + static_cast<double>(j) * dy(); }

    /// Throws unless nx, ny are powers of two >= 64 and bounds are ordered.
    void validate() const;

    /// Grid spanning the data plus `pad_sd` bandwidths on each side of each axis.
    static Grid2D covering(const VectorXd& x, const VectorXd& y, double hx, double hy, Index nx = 256,
                           Index ny = 256, double pad_sd = 3.0);
};

/// 0.9 min(sd, IQR/1.34) n^{-1/5}; falls back to sd when the IQR is 0.
double silverman_bandwidth(const VectorXd& x);

/**
 * Product-kernel density estimate on the grid: samples are linearly binned
 * onto grid nodes, then circularly convolved with the sampled kernel via FFT.
 * Negative round-off is clipped and the result renormalized so that
 * sum(p) dx dy = 1. Entry (i, j) is the density at (grid.x(i), grid.y(j)).
 */
MatrixXd fft_kde_2d(const VectorXd& x, const VectorXd& y, KernelKind kernel, double hx, double hy,
                    const Grid2D& grid);

/// Direct O(n * grid) evaluation of the same product-kernel estimate (reference implementation).
MatrixXd direct_kde_2d(const VectorXd& x, const VectorXd& y, KernelKind kernel, double hx, double hy,
                       const Grid2D& grid);

} // namespace hdsparse
