#include <hdsparse/mutual_information.hpp>

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace hdsparse {

std::string to_string(MIMethod m)
{
    switch (m) {
    case MIMethod::FFTKDE: return "fftkde";
    case MIMethod::Binning: return "binning";
    case MIMethod::KNN: return "knn";
    case MIMethod::Pearson: return "pearson";
    }
    return "fftkde";
}

MIMethod mi_method_from_string(const std::string& s)
{
    if (s == "fftkde") return MIMethod::FFTKDE;
    if (s == "binning") return MIMethod::Binning;
    if (s == "knn") return MIMethod::KNN;
    if (s == "pearson") return MIMethod::Pearson;
    throw InvalidArgument("unknown method '" + s + "' (expected fftkde|binning|knn|pearson)");
}

double mi_from_grid_density(const MatrixXd& p, double dx, double dy, double floor)
{
    const VectorXd px = p.rowwise().sum() * dy;
    const VectorXd py = p.colwise().sum().transpose() * dx;
    double mi = 0.0;
    for (Index j = 0; j < p.cols(); ++j) {
        for (Index i = 0; i < p.rows(); ++i) {
            const double v = p(i, j);
            if (v <= floor) continue;
            mi += v * std::log(v / (px[i] * py[j]));
        }
    }
    return mi * dx * dy;
}

MIResult mi_fftkde(const VectorXd& x, const VectorXd& y, const FFTKDEOptions& opt)
{
    require(x.size() == y.size(), "mi_fftkde: x and y must have the same length");
    const BandwidthSelector sel = opt.bandwidth ? opt.bandwidth : BandwidthSelector(silverman_bandwidth);
    const double hx = sel(x);
    const double hy = sel(y);
    const Grid2D grid = Grid2D::covering(x, y, hx, hy, opt.nx, opt.ny, 3.0);
    const MatrixXd p = fft_kde_2d(x, y, opt.kernel, hx, hy, grid);
    MIResult r;
    r.method = MIMethod::FFTKDE;
    r.value = mi_from_grid_density(p, grid.dx(), grid.dy(), opt.floor);
    r.diagnostics = {{"hx", hx}, {"hy", hy}, {"nx", static_cast<double>(opt.nx)}, {"ny", static_cast<double>(opt.ny)}};
    return r;
}

std::vector<int> equal_width_bins(const VectorXd& x, int D)
{
    require(D >= 1, "equal_width_bins: D must be >= 1");
    const double lo = x.minCoeff();
    const double hi = x.maxCoeff();
    std::vector<int> b(static_cast<std::size_t>(x.size()), 0);
    if (!(hi > lo)) return b;
    const double scale = static_cast<double>(D) / (hi - lo);
    for (Index i = 0; i < x.size(); ++i) {
        const int k = static_cast<int>(std::floor((x[i] - lo) * scale));
        b[static_cast<std::size_t>(i)] = std::clamp(k, 0, D - 1);
    }
    return b;
}

int bin_count(const VectorXd& x, Warnings* warnings)
{
    require(x.size() >= 10, "bin_count: need n >= 10");
    require(x.allFinite(), "bin_count: input must be finite");
    if (!(x.maxCoeff() > x.minCoeff())) {
        if (warnings) warnings->push_back("bin_count: constant input, using a single bin");
        return 1;
    }
    const double n = static_cast<double>(x.size());
    const int dmax = std::max(2, static_cast<int>(std::ceil(n / std::log(n))));
    int best = 2;
    double best_score = -INFINITY;
    std::vector<double> counts;
    for (int D = 2; D <= dmax; ++D) {
        const auto b = equal_width_bins(x, D);
        counts.assign(static_cast<std::size_t>(D), 0.0);
        for (int k : b) counts[static_cast<std::size_t>(k)] += 1.0;
        double s = 0.0;
        for (double c : counts)
            if (c > 0.0) s += c * std::log(static_cast<double>(D) * c / n);
        s -= static_cast<double>(D) - 1.0 + std::pow(std::log(static_cast<double>(D)), 2.5);
        if (s > best_score) {
            best_score = s;
            best = D;
        }
    }
    return best;
}

MIResult mi_binning(const VectorXd& x, const VectorXd& y)
{
    require(x.size() == y.size(), "mi_binning: x and y must have the same length");
    MIResult r;
    r.method = MIMethod::Binning;
    const int dx = bin_count(x, &r.warnings);
    const int dy = bin_count(y, &r.warnings);
    r.diagnostics = {{"bins_x", static_cast<double>(dx)}, {"bins_y", static_cast<double>(dy)}};
    const auto bx = equal_width_bins(x, dx);
    const auto by = equal_width_bins(y, dy);
    const double n = static_cast<double>(x.size());
    std::vector<double> joint(static_cast<std::size_t>(dx) * static_cast<std::size_t>(dy), 0.0);
    std::vector<double> nx(static_cast<std::size_t>(dx), 0.0), ny(static_cast<std::size_t>(dy), 0.0);
    for (std::size_t i = 0; i < bx.size(); ++i) {
        joint[static_cast<std::size_t>(bx[i]) * static_cast<std::size_t>(dy) + static_cast<std::size_t>(by[i])] += 1.0;
        nx[static_cast<std::size_t>(bx[i])] += 1.0;
        ny[static_cast<std::size_t>(by[i])] += 1.0;
    }
    // Sorted accumulation makes the sum independent of argument order.
    std::vector<double> terms;
    for (int a = 0; a < dx; ++a) {
        for (int b = 0; b < dy; ++b) {
            const double c = joint[static_cast<std::size_t>(a) * static_cast<std::size_t>(dy) + static_cast<std::size_t>(b)];
            if (c > 0.0)
                terms.push_back(c / n * std::log(c * n / (nx[static_cast<std::size_t>(a)] * ny[static_cast<std::size_t>(b)])));
        }
    }
    std::sort(terms.begin(), terms.end());
    r.value = std::max(0.0, std::accumulate(terms.begin(), terms.end(), 0.0));
    return r;
}

namespace {

double sample_sd(const VectorXd& v)
{
    const double m = v.mean();
    return std::sqrt((v.array() - m).square().sum() / std::max<double>(1.0, static_cast<double>(v.size() - 1)));
}

// Offsets exact duplicates by multiples of 1e-10 * scale, in index order within each run.
VectorXd jitter_duplicates(const VectorXd& v, Index& n_jittered)
{
    VectorXd out = v;
    std::vector<Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v[a] < v[b]; });
    double scale = sample_sd(v);
    if (!(scale > 0.0)) scale = std::max(1.0, std::abs(v[0]));
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
        for (std::size_t t = i + 1; t < j; ++t) {
            out[order[t]] += static_cast<double>(t - i) * 1e-10 * scale;
            ++n_jittered;
        }
        i = j;
    }
    return out;
}

double digamma(double v) { return Eigen::numext::digamma(v); }

// Number of sorted values s with |s - c| < eps (c itself included).
Index count_within(const std::vector<double>& sorted, double c, double eps)
{
    const auto lo = std::partition_point(sorted.begin(), sorted.end(), [&](double s) { return c - s >= eps; });
    const auto hi = std::partition_point(lo, sorted.end(), [&](double s) { return s - c < eps; });
    return static_cast<Index>(hi - lo);
}

} // namespace

MIResult mi_knn(const VectorXd& x_in, const VectorXd& y_in, int k)
{
    require(x_in.size() == y_in.size(), "mi_knn: x and y must have the same length");
    const Index n = x_in.size();
    require(k >= 1, "mi_knn: k must be >= 1");
    require(k < n, "mi_knn: k must be smaller than n");
    require(x_in.allFinite() && y_in.allFinite(), "mi_knn: inputs must be finite");

    Index jittered = 0;
    const VectorXd x = jitter_duplicates(x_in, jittered);
    const VectorXd y = jitter_duplicates(y_in, jittered);

    std::vector<Index> ord(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), Index{0});
    std::stable_sort(ord.begin(), ord.end(), [&](Index a, Index b) { return x[a] < x[b]; });
    std::vector<double> xsorted(x.data(), x.data() + n), ysorted(y.data(), y.data() + n);
    std::sort(xsorted.begin(), xsorted.end());
    std::sort(ysorted.begin(), ysorted.end());

    std::vector<double> terms(static_cast<std::size_t>(n));
    std::priority_queue<double> heap; // k smallest max-norm distances
    for (Index r = 0; r < n; ++r) {
        const Index i = ord[static_cast<std::size_t>(r)];
        heap = {};
        auto visit = [&](Index j) {
            const double d = std::max(std::abs(x[j] - x[i]), std::abs(y[j] - y[i]));
            if (static_cast<int>(heap.size()) < k) heap.push(d);
            else if (d < heap.top()) {
                heap.pop();
                heap.push(d);
            }
        };
        Index left = r - 1, right = r + 1;
        while (left >= 0 || right < n) {
            const bool full = static_cast<int>(heap.size()) == k;
            const double bound = full ? heap.top() : INFINITY;
            const double dl = left >= 0 ? x[i] - x[ord[static_cast<std::size_t>(left)]] : INFINITY;
            const double dr = right < n ? x[ord[static_cast<std::size_t>(right)]] - x[i] : INFINITY;
            if (std::min(dl, dr) > bound) break;
            if (dl <= dr) visit(ord[static_cast<std::size_t>(left--)]);
            else visit(ord[static_cast<std::size_t>(right++)]);
        }
        const double eps = heap.top();
        const Index nx = count_within(xsorted, x[i], eps) - 1;
        const Index ny = count_within(ysorted, y[i], eps) - 1;
        terms[static_cast<std::size_t>(i)] = digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
    }
    // Summed in index order so swapping x and y gives the same value.
    const double acc = std::accumulate(terms.begin(), terms.end(), 0.0);

    MIResult res;
    res.method = MIMethod::KNN;
    const double raw = digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) - acc / static_cast<double>(n);
    res.value = std::max(0.0, raw);
    res.diagnostics = {{"k", static_cast<double>(k)}, {"raw", raw}, {"jittered", static_cast<double>(jittered)}};
    return res;
}

MIResult pearson_abs(const VectorXd& x, const VectorXd& y)
{
    require(x.size() == y.size(), "pearson_abs: x and y must have the same length");
    require(x.size() >= 2, "pearson_abs: need at least 2 samples");
    const VectorXd xc = x.array() - x.mean();
    const VectorXd yc = y.array() - y.mean();
    const double nx = xc.norm();
    const double ny = yc.norm();
    if (!(nx > 0.0) || !(ny > 0.0)) throw InvalidArgument("pearson_abs: constant vector");
    MIResult r;
    r.method = MIMethod::Pearson;
    r.value = std::min(1.0, std::abs(xc.dot(yc)) / (nx * ny));
    return r;
}

} // namespace hdsparse
