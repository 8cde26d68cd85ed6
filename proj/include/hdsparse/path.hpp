#pragma once
#include <hdsparse/ag_solver.hpp>
#include <hdsparse/common.hpp>
#include <hdsparse/pcg_solver.hpp>
#include <hdsparse/penalty.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hdsparse {

enum class LossKind { linear, logistic };
enum class SolverKind { ag, ag_original, pg, pcg };

std::string to_string(LossKind k);
std::string to_string(SolverKind k);
LossKind loss_kind_from_string(const std::string& s);
SolverKind solver_kind_from_string(const std::string& s);

struct FitOptions {
    SolverKind solver = SolverKind::ag;
    double tol = 1e-4;
    Index max_iter = 2000;
    PCGConfig pcg;
};

struct PenalizedFit {
    double intercept = 0.0;
    VectorXd beta;
    SolveReport report; // report.estimate holds (intercept, beta)
};

/// X with a leading column of ones.
MatrixXd with_ones(const MatrixXd& X);

/**
 * Fits loss(intercept + X beta, y) + penalty(beta); the intercept is never
 * penalized. `warm_start` is (intercept, beta) of length p + 1.
 */
PenalizedFit fit_penalized(const MatrixXd& X, const VectorXd& y, LossKind loss, const PenaltySpec& penalty,
                           const FitOptions& opt = {}, const std::optional<VectorXd>& warm_start = std::nullopt);

/// Unpenalized mean loss (squared-error/2 or logistic deviance/2) of a fit on (X, y).
double prediction_loss(const MatrixXd& X, const VectorXd& y, LossKind loss, double intercept, const VectorXd& beta);

/// |X'(y - mean(y))| / n in sup-norm; the gradient at the intercept-only fit for both losses.
double lambda_max(const MatrixXd& X, const VectorXd& y);

/// `count` equally spaced values from lambda_max down to 0 inclusive.
std::vector<double> lambda_path(const MatrixXd& X, const VectorXd& y, Index count);

struct PathResult {
    std::vector<double> lambdas;
    MatrixXd betas;                 // p x count
    VectorXd intercepts;            // count
    std::vector<double> val_loss;   // empty without validation data
    std::optional<Index> best;      // argmin of val_loss, first on ties
    Warnings warnings;
};

/**
 * Warm-started fits along `lambdas` (penalty kind and shape taken from
 * `penalty`). With validation data the lambda with the smallest validation
 * loss is marked as best.
 */
PathResult fit_path(const MatrixXd& X, const VectorXd& y, LossKind loss, const PenaltySpec& penalty,
                    const std::vector<double>& lambdas, const FitOptions& opt = {},
                    const MatrixXd* X_val = nullptr, const VectorXd* y_val = nullptr);

} // namespace hdsparse
