#pragma once
#include <hdsparse/common.hpp>

#include <optional>
#include <vector>

namespace hdsparse {

struct PredictiveValues {
    std::optional<double> ppv; // absent when nothing is selected
    std::optional<double> npv; // absent when everything is selected
};

/// PPV = |A and Ahat| / |Ahat|, NPV = |not A and not Ahat| / |not Ahat|.
PredictiveValues ppv_npv(const std::vector<bool>& selected, const std::vector<bool>& truth);

/// |beta_true - beta_hat|^2 / |beta_true|^2.
double scaled_estimation_error(const VectorXd& beta_true, const VectorXd& beta_hat);

/// First 1-based iteration whose trace value is <= threshold.
std::optional<Index> iterations_to_threshold(const std::vector<double>& trace, double threshold);

/// Nonzero pattern of beta (|b| > eps).
std::vector<bool> support_of(const VectorXd& beta, double eps = 0.0);

double median(std::vector<double> v);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0; // sd / sqrt(count); 0 for a single value
    Index count = 0;
};

MeanSE mean_se(const std::vector<double>& v);

} // namespace hdsparse
