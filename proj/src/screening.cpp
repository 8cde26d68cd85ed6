#include <hdsparse/parallel.hpp>
#include <hdsparse/screening.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace hdsparse {

MIResult screen_column(const VectorXd& x, const VectorXd& y, MIMethod method, const ScreenOptions& opt)
{
    switch (method) {
    case MIMethod::FFTKDE: return mi_fftkde(x, y, opt.fftkde);
    case MIMethod::Binning: return mi_binning(x, y);
    case MIMethod::KNN: return mi_knn(x, y, opt.knn_k);
    case MIMethod::Pearson: return pearson_abs(x, y);
    }
    throw InvalidArgument("screen_column: unknown method");
}

RankedFeatures screen_all(const FeatureMatrix& m, const ResponseVector& y, MIMethod method, const ScreenOptions& opt)
{
    require(m.rows() == y.size(), "screen_all: feature matrix and response have different row counts");
    const Index p = m.cols();
    const VectorXd& yv = y.values();
    std::vector<MIResult> results(static_cast<std::size_t>(p));
    std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(p));

    parallel_for(p, opt.workers, [&](Index j) {
        const auto slot = static_cast<std::size_t>(j);
        try {
            const VectorXd x = m.values().col(j);
            results[slot] = screen_column(x, yv, method, opt);
        } catch (const std::exception& e) {
            errors[slot] = e.what();
        }
    });

    RankedFeatures out;
    out.scores.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        const auto slot = static_cast<std::size_t>(j);
        if (errors[slot]) {
            out.scores[slot] = -std::numeric_limits<double>::infinity();
            out.failures.emplace_back(j, *errors[slot]);
            results[slot].method = method;
            results[slot].value = out.scores[slot];
        } else {
            out.scores[slot] = results[slot].value;
        }
        out.ranking.emplace_back(j, out.scores[slot]);
    }
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    out.results = std::move(results);
    return out;
}

double selection_auroc(const std::vector<double>& scores, const std::vector<bool>& truth)
{
    require(scores.size() == truth.size(), "selection_auroc: scores and truth differ in length");
    const auto n = scores.size();
    std::vector<std::size_t> ord(n);
    for (std::size_t i = 0; i < n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks (1-based) over runs of equal scores.
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && scores[ord[j]] == scores[ord[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) rank[ord[t]] = mid;
        i = j;
    }
    double pos = 0.0, rank_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (truth[t]) {
            pos += 1.0;
            rank_sum += rank[t];
        }
    }
    const double neg = static_cast<double>(n) - pos;
    if (pos == 0.0 || neg == 0.0) throw InvalidArgument("selection_auroc: need at least one true and one false label");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

} // namespace hdsparse
