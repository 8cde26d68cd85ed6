#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/pcg_solver.hpp>
#include <hdsparse/penalty.hpp>

#include <cmath>
#include <optional>

namespace hdsparse {

/// (1 + (1-q) x)^{1/(1-q)} where the base is positive, 0 elsewhere.
template <typename Scalar>
Scalar q_exp(Scalar x, Scalar q)
{
    using std::exp;
    using std::log1p;
    if (q == Scalar(1)) return exp(x);
    const Scalar base = Scalar(1) + (Scalar(1) - q) * x;
    if (!(base > Scalar(0))) return Scalar(0);
    return exp(log1p((Scalar(1) - q) * x) / (Scalar(1) - q));
}

/// (x^{1-q} - 1)/(1-q) for x > 0.
template <typename Scalar>
Scalar q_log(Scalar x, Scalar q)
{
    using std::expm1;
    using std::log;
    if (!(x > Scalar(0))) throw InvalidArgument("q_log requires x > 0");
    if (q == Scalar(1)) return log(x);
    return expm1((Scalar(1) - q) * log(x)) / (Scalar(1) - q);
}

/// m = 2/(q-1) - n; requires 1 < q < 1 + 2/n.
double dof_from_q(double q, Index n);
/// q = 1 + 2/(m + n); requires m > 0.
double q_from_dof(double m, Index n);

struct QShape {
    double q = 1.5;
    Index n = 1;

    double dof() const { return dof_from_q(q, n); }
    void validate() const;
};

/**
 * Heavy-tailed q-Gaussian with location mu and characterization matrix
 * Sigma = sigma2 * psi.
 */
struct QGaussianParams {
    VectorXd mu;
    double sigma2 = 1.0;
    MatrixXd psi;
    QShape shape;

    void validate() const;
};

/// Log density in the Sigma parameterization.
double logpdf(const VectorXd& x, const QGaussianParams& params);

/// Log density in the Lambda = m Sigma parameterization; agrees with logpdf.
double logpdf_lambda_form(const VectorXd& x, const QGaussianParams& params);

/// q-covariance: integral of (x-mu)(x-mu)' p^q dx.
MatrixXd q_covariance(const QGaussianParams& params);

/// m/(m-2) Sigma when m > 2 (q < 1 + 2/(n+2)); absent otherwise.
std::optional<MatrixXd> covariance(const QGaussianParams& params);

/// 1 + 1/(1/(q_train-1) - n_train + n_subset).
double recover_q_subset(double q_train, Index n_train, Index n_subset);

enum class ThetaSolver { PCG, AG };

struct QFitConfig {
    ThetaSolver solver = ThetaSolver::PCG;
    PCGConfig pcg;            // tol/max_iter used by the theta subproblem
    double ag_tol = 1e-8;     // when solver == AG
    Index ag_max_iter = 20000;
    double q0 = 0.0;          // 0 selects 1 + 1/n_train
    double outer_tol = 1e-8;
    Index max_outer = 50;
    double u_cap = 1e8;       // upper limit for u = 1/(q-1)
    double cg_tol = 1e-12;    // Psi^{-1} products
};

/**
 * Penalized q-Gaussian regression y ~ qGaussian(q_train, [1 X] theta, sigma2 Psi).
 * theta[0] is the unpenalized intercept. psi empty means identity.
 */
struct QGaussianModel {
    VectorXd theta;
    double sigma2 = 1.0;
    double q_train = 1.0;
    Index n_train = 0;
    MatrixXd psi; // empty => identity
    PenaltySpec penalty;
    std::vector<double> fit_trace;
    Index outer_iterations = 0;
    Warnings warnings;

    double u() const { return 1.0 / (q_train - 1.0); }
    double dof() const { return 2.0 * u() - static_cast<double>(n_train); }
};

/// [1 X].
MatrixXd with_intercept(const MatrixXd& X);

/// <r, Psi^{-1} r> via linear_cg (direct when psi is empty).
double psi_quadratic(const MatrixXd& psi, const VectorXd& r, double cg_tol = 1e-12);

/// Q = <r, Psi^{-1} r> + 2 n sum_{j>=1} w(theta_j).
double q_term(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train, double cg_tol = 1e-12);

/**
 * (n/2) log sigma2 - lgamma(u) + lgamma(u - n/2) + (n/2) log(2u - n)
 *   + u log(1 + Q / ((2u - n) sigma2)),  u = 1/(q_train - 1).
 * The constant (1/2) log|pi Psi| is dropped.
 */
double neg_penalized_loglik(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train);

/// Same objective from scalar pieces (n, u, sigma2, Q).
double neg_penalized_loglik_from_q(double n, double u, double sigma2, double Q);

/// lgamma(v + h) - lgamma(v) without cancellation for large v.
double log_gamma_ratio(double v, double h);

struct QGaussianGradient {
    VectorXd theta; // valid where the penalty is differentiable
    double sigma2 = 0.0;
    double u = 0.0;
};

QGaussianGradient neg_penalized_loglik_grad(const QGaussianModel& model, const MatrixXd& X_train,
                                            const VectorXd& y_train);

/// Closed-form minimizer over sigma2: ((u/(n/2)) - 1) (2u - n)^{-1} Q.
double sigma2_update(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train,
                     double cg_tol = 1e-12);

struct QUpdate {
    double q = 0.0;
    double u = 0.0;
    double objective = 0.0;
    bool at_cap = false;
    double f_lower = 0.0; // objective at the lower bracket end
    double f_upper = 0.0; // objective at the upper bracket end
};

/// Brent search over u = 1/(q-1) in (n/2 + 1e-6 n, U) with sigma2 profiled.
QUpdate q_update(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train,
                 const QFitConfig& config = {});

/// theta minimizing 1/(2n) |y - X theta|^2_{Psi^{-1}} + sum_j w(theta_j); independent of q and sigma2.
VectorXd theta_update(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train,
                      const QFitConfig& config = {});

QGaussianModel fit(const MatrixXd& X_train, const VectorXd& y_train, const MatrixXd& psi, const PenaltySpec& penalty,
                   const QFitConfig& config = {});

/// Continues the blockwise loop from an existing model (theta kept).
QGaussianModel refit(const QGaussianModel& start, const MatrixXd& X_train, const VectorXd& y_train,
                     const QFitConfig& config = {});

struct QPrediction {
    VectorXd mean;
    double q_new = 0.0;
    MatrixXd q_covariance;
    std::optional<MatrixXd> covariance;
};

/// psi_new empty means identity of size n_new.
QPrediction predict(const QGaussianModel& model, const MatrixXd& X_new, const MatrixXd& psi_new, Index n_new);

} // namespace hdsparse
