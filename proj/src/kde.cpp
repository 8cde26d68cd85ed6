#include <hdsparse/kde.hpp>

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <vector>

namespace hdsparse {

std::string to_string(KernelKind k)
{
    return k == KernelKind::Gaussian ? "gaussian" : "epanechnikov";
}

KernelKind kernel_kind_from_string(const std::string& s)
{
    if (s == "gaussian") return KernelKind::Gaussian;
    if (s == "epanechnikov" || s == "epa") return KernelKind::Epanechnikov;
    throw InvalidArgument("unknown kernel '" + s + "' (expected gaussian|epanechnikov)");
}

namespace {

bool power_of_two(Index v) { return v > 0 && (v & (v - 1)) == 0; }

double quantile_sorted(const std::vector<double>& s, double p)
{
    const double pos = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

using Complex = std::complex<double>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

// Transform of the kernel sampled at circular grid distances.
std::vector<Complex> kernel_spectrum(KernelKind k, double h, double step, Index n, Eigen::FFT<double>& fft)
{
    std::vector<double> kv(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const Index d = std::min(i, n - i);
        kv[static_cast<std::size_t>(i)] = kernel_value(k, static_cast<double>(d) * step, h);
    }
    std::vector<Complex> out;
    fft.fwd(out, kv);
    return out;
}

void fft_cols(CMatrix& m, Eigen::FFT<double>& fft, bool inverse)
{
    std::vector<Complex> in(static_cast<std::size_t>(m.rows())), out;
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) in[static_cast<std::size_t>(i)] = m(i, j);
        if (inverse) fft.inv(out, in);
        else fft.fwd(out, in);
        for (Index i = 0; i < m.rows(); ++i) m(i, j) = out[static_cast<std::size_t>(i)];
    }
}

void fft_rows(CMatrix& m, Eigen::FFT<double>& fft, bool inverse)
{
    std::vector<Complex> in(static_cast<std::size_t>(m.cols())), out;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) in[static_cast<std::size_t>(j)] = m(i, j);
        if (inverse) fft.inv(out, in);
        else fft.fwd(out, in);
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = out[static_cast<std::size_t>(j)];
    }
}

void check_inputs(const VectorXd& x, const VectorXd& y, double hx, double hy, const Grid2D& grid)
{
    require(x.size() == y.size(), "KDE: x and y must have the same length");
    require(x.size() >= 2, "KDE: need at least 2 samples");
    require(hx > 0.0 && hy > 0.0, "KDE: bandwidths must be positive");
    require(x.allFinite() && y.allFinite(), "KDE: samples must be finite");
    grid.validate();
}

} // namespace

void Grid2D::validate() const
{
    require(power_of_two(nx) && power_of_two(ny) && nx >= 64 && ny >= 64,
            "Grid2D: nx and ny must be powers of two >= 64");
    require(x_min < x_max && y_min < y_max, "Grid2D: bounds must be strictly ordered");
}

Grid2D Grid2D::covering(const VectorXd& x, const VectorXd& y, double hx, double hy, Index nx, Index ny, double pad_sd)
{
    Grid2D g;
    g.x_min = x.minCoeff() - pad_sd * hx;
    g.x_max = x.maxCoeff() + pad_sd * hx;
    g.y_min = y.minCoeff() - pad_sd * hy;
    g.y_max = y.maxCoeff() + pad_sd * hy;
    g.nx = nx;
    g.ny = ny;
    return g;
}

double silverman_bandwidth(const VectorXd& x)
{
    require(x.size() >= 2, "silverman_bandwidth: need n >= 2");
    const double n = static_cast<double>(x.size());
    const double mean = x.mean();
    const double sd = std::sqrt((x.array() - mean).square().sum() / (n - 1.0));
    if (!(sd > 0.0)) throw InvalidArgument("silverman_bandwidth: constant input");
    std::vector<double> s(x.data(), x.data() + x.size());
    std::sort(s.begin(), s.end());
    const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(n, -0.2);
}

MatrixXd fft_kde_2d(const VectorXd& x, const VectorXd& y, KernelKind kernel, double hx, double hy,
                    const Grid2D& grid)
{
    check_inputs(x, y, hx, hy, grid);
    const double tol = 1e-9 * std::max({1.0, std::abs(grid.x_min), std::abs(grid.x_max)});
    const double toly = 1e-9 * std::max({1.0, std::abs(grid.y_min), std::abs(grid.y_max)});
    if (x.minCoeff() - 3.0 * hx < grid.x_min - tol || x.maxCoeff() + 3.0 * hx > grid.x_max + tol ||
        y.minCoeff() - 3.0 * hy < grid.y_min - toly || y.maxCoeff() + 3.0 * hy > grid.y_max + toly)
        throw InvalidArgument("fft_kde_2d: grid does not cover the data range padded by 3 bandwidths");

    const Index nx = grid.nx, ny = grid.ny;
    const double dx = grid.dx(), dy = grid.dy();
    const double w = 1.0 / static_cast<double>(x.size());

    CMatrix b = CMatrix::Zero(nx, ny);
    for (Index s = 0; s < x.size(); ++s) {
        const double fx = (x[s] - grid.x_min) / dx;
        const double fy = (y[s] - grid.y_min) / dy;
        const Index i0 = std::clamp<Index>(static_cast<Index>(std::floor(fx)), 0, nx - 2);
        const Index j0 = std::clamp<Index>(static_cast<Index>(std::floor(fy)), 0, ny - 2);
        const double ax = std::clamp(fx - static_cast<double>(i0), 0.0, 1.0);
        const double ay = std::clamp(fy - static_cast<double>(j0), 0.0, 1.0);
        b(i0, j0) += w * (1.0 - ax) * (1.0 - ay);
        b(i0 + 1, j0) += w * ax * (1.0 - ay);
        b(i0, j0 + 1) += w * (1.0 - ax) * ay;
        b(i0 + 1, j0 + 1) += w * ax * ay;
    }

    Eigen::FFT<double> fft;
    const auto kx = kernel_spectrum(kernel, hx, dx, nx, fft);
    const auto ky = kernel_spectrum(kernel, hy, dy, ny, fft);
    fft_cols(b, fft, false);
    fft_rows(b, fft, false);
    for (Index i = 0; i < nx; ++i)
        for (Index j = 0; j < ny; ++j) b(i, j) *= kx[static_cast<std::size_t>(i)] * ky[static_cast<std::size_t>(j)];
    fft_rows(b, fft, true);
    fft_cols(b, fft, true);

    MatrixXd p = b.real().cwiseMax(0.0);
    const double total = p.sum() * dx * dy;
    if (!(total > 0.0)) throw NumericalError("fft_kde_2d: density vanished on the grid");
    p /= total;
    return p;
}

MatrixXd direct_kde_2d(const VectorXd& x, const VectorXd& y, KernelKind kernel, double hx, double hy,
                       const Grid2D& grid)
{
    check_inputs(x, y, hx, hy, grid);
    MatrixXd ax(grid.nx, x.size());
    MatrixXd ay(grid.ny, y.size());
    for (Index s = 0; s < x.size(); ++s) {
        for (Index i = 0; i < grid.nx; ++i) ax(i, s) = kernel_value(kernel, grid.x(i) - x[s], hx);
        for (Index j = 0; j < grid.ny; ++j) ay(j, s) = kernel_value(kernel, grid.y(j) - y[s], hy);
    }
    return ax * ay.transpose() / static_cast<double>(x.size());
}

} // namespace hdsparse
