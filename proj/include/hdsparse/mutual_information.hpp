#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/kde.hpp>

#include <functional>
#include <map>
#include <string>

namespace hdsparse {

enum class MIMethod { FFTKDE, Binning, KNN, Pearson };

std::string to_string(MIMethod m);
MIMethod mi_method_from_string(const std::string& s);

/// Association score in nats (or |r| for Pearson) with the settings that produced it.
struct MIResult {
    double value = 0.0;
    MIMethod method = MIMethod::FFTKDE;
    std::map<std::string, double> diagnostics;
    Warnings warnings;
};

using BandwidthSelector = std::function<double(const VectorXd&)>;

struct FFTKDEOptions {
    KernelKind kernel = KernelKind::Epanechnikov;
    BandwidthSelector bandwidth; // empty selects silverman_bandwidth
    Index nx = 256;
    Index ny = 256;
    double floor = 1e-12; // cells with density <= floor contribute 0
};

/// Plug-in MI of the FFT-KDE joint density by forward-Euler quadrature on the grid.
MIResult mi_fftkde(const VectorXd& x, const VectorXd& y, const FFTKDEOptions& opt = {});

/// MI of a density tabulated on a grid, marginals by summing the joint.
double mi_from_grid_density(const MatrixXd& p, double dx, double dy, double floor = 1e-12);

/**
 * Penalized-likelihood histogram bin count over D in [2, ceil(n / ln n)]:
 * argmax sum_i N_i ln(D N_i / n) - (D - 1 + (ln D)^2.5), equal-width bins.
 * Constant input returns 1 and appends a warning when `warnings` is given.
 */
int bin_count(const VectorXd& x, Warnings* warnings = nullptr);

/// Bin labels 0..D-1 of x on D equal-width bins.
std::vector<int> equal_width_bins(const VectorXd& x, int D);

/// Plug-in MI of the bin_count discretizations of x and y.
MIResult mi_binning(const VectorXd& x, const VectorXd& y);

/// Kraskov-Stogbauer-Grassberger estimator (variant 1, max-norm).
MIResult mi_knn(const VectorXd& x, const VectorXd& y, int k = 3);

/// |corr(x, y)|.
MIResult pearson_abs(const VectorXd& x, const VectorXd& y);

} // namespace hdsparse
