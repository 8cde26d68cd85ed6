#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/penalty.hpp>

#include <functional>
#include <memory>

namespace hdsparse {

/**
 * Smooth part Psi = f + h of a composite problem, h being the concave part
 * of the penalty. `lipschitz` bounds the Lipschitz constant of grad Psi.
 */
struct SmoothObjective {
    std::function<double(const VectorXd&)> value;
    std::function<VectorXd(const VectorXd&)> grad;
    double lipschitz = 0.0;
    Index dimension = 0;
};

/// Largest eigenvalue of X'X/n by power iteration (tolerance 1e-8, at most 1000 iterations).
double max_eigen_gram(const MatrixXd& X, double tol = 1e-8, Index max_iter = 1000);

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power iteration.
double max_eigen_sym(const MatrixXd& A, double tol = 1e-8, Index max_iter = 1000);

/**
 * 1/(2n)|X b - y|^2 + sum_j h(b_j) over penalized coordinates.
 * L = lambda_max(X'X)/n + lipschitz_h.
 */
SmoothObjective make_linear_objective(const MatrixXd& X, const VectorXd& y,
                                      const PenaltySpec& penalty = PenaltySpec{},
                                      const std::vector<Index>& skip = {});

/**
 * Mean negative log-likelihood of a logistic model plus sum_j h(b_j).
 * L = lambda_max(X'X)/(4n) + lipschitz_h. y must be 0/1.
 */
SmoothObjective make_logistic_objective(const MatrixXd& X, const VectorXd& y,
                                        const PenaltySpec& penalty = PenaltySpec{},
                                        const std::vector<Index>& skip = {});

/// Quadratic 0.5 b'A b - c'b + h(b); L = lambda_max(A) + lipschitz_h.
SmoothObjective make_quadratic_objective(const MatrixXd& A, const VectorXd& c,
                                         const PenaltySpec& penalty = PenaltySpec{},
                                         const std::vector<Index>& skip = {});

/// Numerically stable log(1 + e^t).
inline double log1pexp(double t)
{
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double sigmoid(double t)
{
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

/// Mean negative log-likelihood of a logistic model at linear predictor eta.
double logistic_loss(const VectorXd& eta, const VectorXd& y);

} // namespace hdsparse
