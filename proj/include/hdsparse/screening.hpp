#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/data.hpp>
#include <hdsparse/mutual_information.hpp>

#include <string>
#include <utility>
#include <vector>

namespace hdsparse {

struct ScreenOptions {
    FFTKDEOptions fftkde;
    int knn_k = 3;
    int workers = 1;
};

struct RankedFeatures {
    std::vector<std::pair<Index, double>> ranking;    // descending score, ties by ascending index
    std::vector<double> scores;                       // by column; -inf for failures
    std::vector<MIResult> results;                    // by column
    std::vector<std::pair<Index, std::string>> failures;
};

/// Score of a single column with the chosen method.
MIResult screen_column(const VectorXd& x, const VectorXd& y, MIMethod method, const ScreenOptions& opt = {});

/// Scores every column against y; failed columns get -inf and are listed in `failures`.
RankedFeatures screen_all(const FeatureMatrix& m, const ResponseVector& y, MIMethod method,
                          const ScreenOptions& opt = {});

/// AUROC of ranking by score against truth, midranks for ties.
double selection_auroc(const std::vector<double>& scores, const std::vector<bool>& truth);

} // namespace hdsparse
