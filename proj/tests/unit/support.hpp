#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/rng.hpp>

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

namespace testing {

using hdsparse::Index;
using hdsparse::MatrixXd;
using hdsparse::VectorXd;

inline hdsparse::Rng rng_for(std::uint64_t case_id) { return hdsparse::Rng(hdsparse::derive_seed(0xC0FFEE, case_id)); }

inline VectorXd normal_vector(hdsparse::Rng& rng, Index n, double sd = 1.0)
{
    std::normal_distribution<double> z(0.0, sd);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = z(rng);
    return v;
}

inline MatrixXd normal_matrix(hdsparse::Rng& rng, Index n, Index p)
{
    std::normal_distribution<double> z(0.0, 1.0);
    MatrixXd m(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) m(i, j) = z(rng);
    return m;
}

inline double uniform(hdsparse::Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_index(hdsparse::Rng& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Correlated pair (x, y) with corr rho.
inline std::pair<VectorXd, VectorXd> gaussian_pair(hdsparse::Rng& rng, Index n, double rho)
{
    const VectorXd x = normal_vector(rng, n);
    const VectorXd e = normal_vector(rng, n);
    return {x, rho * x + std::sqrt(1.0 - rho * rho) * e};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("hdsparse_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Central difference of f at x along coordinate j.
template <typename F>
double central_difference(F&& f, VectorXd x, Index j, double h)
{
    const double x0 = x[j];
    x[j] = x0 + h;
    const double fp = f(x);
    x[j] = x0 - h;
    const double fm = f(x);
    return (fp - fm) / (2.0 * h);
}

} // namespace testing
