#include <hdsparse/metrics.hpp>

#include <algorithm>
#include <cmath>

namespace hdsparse {

PredictiveValues ppv_npv(const std::vector<bool>& selected, const std::vector<bool>& truth)
{
    require(selected.size() == truth.size(), "ppv_npv: selected and truth differ in length");
    double tp = 0, sel = 0, tn = 0, unsel = 0;
    for (std::size_t j = 0; j < truth.size(); ++j) {
        if (selected[j]) {
            sel += 1;
            if (truth[j]) tp += 1;
        } else {
            unsel += 1;
            if (!truth[j]) tn += 1;
        }
    }
    PredictiveValues r;
    if (sel > 0) r.ppv = tp / sel;
    if (unsel > 0) r.npv = tn / unsel;
    return r;
}

double scaled_estimation_error(const VectorXd& beta_true, const VectorXd& beta_hat)
{
    require(beta_true.size() == beta_hat.size(), "scaled_estimation_error: length mismatch");
    const double d = beta_true.squaredNorm();
    require(d > 0.0, "scaled_estimation_error: beta_true is zero");
    return (beta_true - beta_hat).squaredNorm() / d;
}

std::optional<Index> iterations_to_threshold(const std::vector<double>& trace, double threshold)
{
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (trace[k] <= threshold) return static_cast<Index>(k + 1);
    return std::nullopt;
}

std::vector<bool> support_of(const VectorXd& beta, double eps)
{
    std::vector<bool> s(static_cast<std::size_t>(beta.size()));
    for (Index j = 0; j < beta.size(); ++j) s[static_cast<std::size_t>(j)] = std::abs(beta[j]) > eps;
    return s;
}

double median(std::vector<double> v)
{
    require(!v.empty(), "median: empty input");
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MeanSE mean_se(const std::vector<double>& v)
{
    MeanSE r;
    r.count = static_cast<Index>(v.size());
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
    }
    return r;
}

} // namespace hdsparse
