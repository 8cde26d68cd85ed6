#include <hdsparse/ag_solver.hpp>
#include <hdsparse/brent.hpp>
#include <hdsparse/linear_cg.hpp>
#include <hdsparse/objectives.hpp>
#include <hdsparse/qgaussian.hpp>

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>

namespace hdsparse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double digamma(double x) { return Eigen::numext::digamma(x); }

// log|A| and A^{-1} v through a Cholesky factor; throws when A is not SPD.
struct SpdFactor {
    Eigen::LLT<MatrixXd> llt;
    double logdet = 0.0;

    explicit SpdFactor(const MatrixXd& A) : llt(A)
    {
        if (llt.info() != Eigen::Success) throw InvalidArgument("matrix is not symmetric positive definite");
        logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    }
};

MatrixXd sigma_of(const QGaussianParams& p)
{
    return p.sigma2 * p.psi;
}

VectorXd psi_solve(const MatrixXd& psi, const VectorXd& v, double tol)
{
    if (psi.size() == 0) return v;
    require(psi.rows() == v.size(), "Psi has the wrong dimension");
    try {
        return linear_cg<double>([&](const VectorXd& z) -> VectorXd { return psi * z; }, v, tol,
                                 std::max<Index>(10 * v.size(), 100));
    } catch (const NumericalError& e) {
        throw InvalidArgument(std::string("Psi is not SPD or badly conditioned: ") + e.what());
    }
}

} // namespace

double dof_from_q(double q, Index n)
{
    require(n >= 1, "dof_from_q: n must be >= 1");
    require(q > 1.0 && q < 1.0 + 2.0 / static_cast<double>(n), "dof_from_q: q must lie in (1, 1 + 2/n)");
    return 2.0 / (q - 1.0) - static_cast<double>(n);
}

double q_from_dof(double m, Index n)
{
    require(n >= 1, "q_from_dof: n must be >= 1");
    require(m > 0.0 && std::isfinite(m), "q_from_dof: m must be positive");
    return 1.0 + 2.0 / (m + static_cast<double>(n));
}

void QShape::validate() const
{
    require(n >= 1, "QShape: n must be >= 1");
    require(q > 1.0 && q < 1.0 + 2.0 / static_cast<double>(n), "QShape: q must lie in (1, 1 + 2/n)");
}

void QGaussianParams::validate() const
{
    shape.validate();
    require(mu.size() == shape.n, "QGaussianParams: mu length must equal n");
    require(psi.rows() == shape.n && psi.cols() == shape.n, "QGaussianParams: psi must be n x n");
    require(sigma2 > 0.0, "QGaussianParams: sigma2 must be positive");
    require((psi - psi.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, psi.cwiseAbs().maxCoeff()),
            "QGaussianParams: psi must be symmetric");
}

double log_gamma_ratio(double v, double h)
{
    require(v > 0.0 && v + h > 0.0, "log_gamma_ratio: arguments must be positive");
    if (v < 1e3) return std::lgamma(v + h) - std::lgamma(v);
    // Stirling difference with log(v + h) = log v + log1p(h / v).
    const double w = v + h;
    const double l1p = std::log1p(h / v);
    double r = h * std::log(v) + (w - 0.5) * l1p - h;
    r += 1.0 / (12.0 * w) - 1.0 / (12.0 * v);
    r -= 1.0 / (360.0 * w * w * w) - 1.0 / (360.0 * v * v * v);
    return r;
}

double logpdf(const VectorXd& x, const QGaussianParams& params)
{
    params.validate();
    const Index n = params.shape.n;
    require(x.size() == n, "logpdf: x has the wrong dimension");
    const double q = params.shape.q;
    const double u = 1.0 / (q - 1.0);
    const double m = params.shape.dof();
    const double nd = static_cast<double>(n);
    const MatrixXd S = sigma_of(params);
    const SpdFactor f(S);
    const VectorXd r = x - params.mu;
    const double quad = r.dot(f.llt.solve(r));
    // -1/2 log|pi Sigma| + log Gamma(u)/Gamma(u - n/2) - (n/2) log m + (1/(1-q)) log(1 + quad/m)
    return -0.5 * (nd * std::log(kPi) + f.logdet) + log_gamma_ratio(u - nd / 2.0, nd / 2.0) -
           0.5 * nd * std::log(m) - u * std::log1p(quad / m);
}

double logpdf_lambda_form(const VectorXd& x, const QGaussianParams& params)
{
    params.validate();
    const Index n = params.shape.n;
    require(x.size() == n, "logpdf_lambda_form: x has the wrong dimension");
    const double q = params.shape.q;
    const double m = params.shape.dof();
    const double nd = static_cast<double>(n);
    const MatrixXd Lambda = m * sigma_of(params);
    const SpdFactor f(Lambda);
    const VectorXd r = x - params.mu;
    const double quad = r.dot(f.llt.solve(r));
    return -0.5 * (nd * std::log(kPi) + f.logdet) + std::lgamma(m / 2.0 + nd / 2.0) - std::lgamma(m / 2.0) +
           std::log1p(quad) / (1.0 - q);
}

MatrixXd q_covariance(const QGaussianParams& params)
{
    params.validate();
    const double q = params.shape.q;
    const double nd = static_cast<double>(params.shape.n);
    const double u = 1.0 / (q - 1.0);
    const double m = params.shape.dof();
    const MatrixXd S = sigma_of(params);
    const SpdFactor f(S);
    const double log_pi_sigma = nd * std::log(kPi) + f.logdet;
    const double log_ratio = (std::lgamma(q * u - nd / 2.0) - q * std::lgamma(u - nd / 2.0)) -
                             (std::lgamma(q * u) - q * std::lgamma(u));
    const double log_scale = 0.5 * (1.0 - q) * (std::log(m) + log_pi_sigma) + log_ratio;
    return std::exp(log_scale) * S;
}

std::optional<MatrixXd> covariance(const QGaussianParams& params)
{
    params.validate();
    const double m = params.shape.dof();
    if (!(m > 2.0)) return std::nullopt;
    return MatrixXd(m / (m - 2.0) * sigma_of(params));
}

double recover_q_subset(double q_train, Index n_train, Index n_subset)
{
    require(q_train > 1.0, "recover_q_subset: q_train must exceed 1");
    require(n_train >= 1 && n_subset >= 1, "recover_q_subset: sizes must be >= 1");
    const double v = 1.0 / (q_train - 1.0) - static_cast<double>(n_train) + static_cast<double>(n_subset);
    if (!(v > static_cast<double>(n_subset) / 2.0))
        throw InvalidArgument("recover_q_subset: resulting q is infeasible for n_subset = " + std::to_string(n_subset));
    return 1.0 + 1.0 / v;
}

MatrixXd with_intercept(const MatrixXd& X)
{
    MatrixXd Z(X.rows(), X.cols() + 1);
    Z.col(0).setOnes();
    Z.rightCols(X.cols()) = X;
    return Z;
}

double psi_quadratic(const MatrixXd& psi, const VectorXd& r, double cg_tol)
{
    if (psi.size() == 0) return r.squaredNorm();
    return r.dot(psi_solve(psi, r, cg_tol));
}

namespace {

void check_model_shapes(const QGaussianModel& model, const MatrixXd& X, const VectorXd& y)
{
    require(X.rows() == y.size(), "q-Gaussian model: X rows must match y length");
    require(model.theta.size() == X.cols() + 1, "q-Gaussian model: theta must have length p + 1");
    require(model.psi.size() == 0 || model.psi.rows() == y.size(), "q-Gaussian model: Psi must be n x n");
}

const std::vector<Index> kInterceptSkip{0};

} // namespace

double q_term(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train, double cg_tol)
{
    check_model_shapes(model, X_train, y_train);
    const VectorXd r = y_train - with_intercept(X_train) * model.theta;
    const double n = static_cast<double>(y_train.size());
    return psi_quadratic(model.psi, r, cg_tol) + 2.0 * n * penalty_total(model.penalty, model.theta, kInterceptSkip);
}

double neg_penalized_loglik_from_q(double n, double u, double sigma2, double Q)
{
    require(u > n / 2.0, "q-Gaussian objective: need 1/(q-1) > n/2");
    require(sigma2 > 0.0, "q-Gaussian objective: sigma2 must be positive");
    const double m = 2.0 * u - n;
    return 0.5 * n * std::log(sigma2) - log_gamma_ratio(u - n / 2.0, n / 2.0) + 0.5 * n * std::log(m) +
           u * std::log1p(Q / (m * sigma2));
}

double neg_penalized_loglik(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train)
{
    const double Q = q_term(model, X_train, y_train);
    return neg_penalized_loglik_from_q(static_cast<double>(y_train.size()), model.u(), model.sigma2, Q);
}

QGaussianGradient neg_penalized_loglik_grad(const QGaussianModel& model, const MatrixXd& X_train,
                                            const VectorXd& y_train)
{
    check_model_shapes(model, X_train, y_train);
    const double n = static_cast<double>(y_train.size());
    const double u = model.u();
    const double s2 = model.sigma2;
    const double m = 2.0 * u - n;
    const MatrixXd Z = with_intercept(X_train);
    const VectorXd r = y_train - Z * model.theta;
    const VectorXd pr = psi_solve(model.psi, r, 1e-13);
    const double Q = r.dot(pr) + 2.0 * n * penalty_total(model.penalty, model.theta, kInterceptSkip);

    VectorXd dQ = -2.0 * Z.transpose() * pr;
    for (Index j = 1; j < model.theta.size(); ++j) {
        const double t = model.theta[j];
        const double sgn = t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
        dQ[j] += 2.0 * n * (model.penalty.lambda * sgn + h_derivative(model.penalty, t));
    }
    const double denom = m * s2 + Q;
    QGaussianGradient g;
    g.theta = u * dQ / denom;
    g.sigma2 = 0.5 * n / s2 - u * Q / (s2 * denom);
    g.u = -(digamma(u) - digamma(u - n / 2.0)) + n / m + std::log1p(Q / (m * s2)) - 2.0 * u * Q / (m * denom);
    return g;
}

namespace {

double sigma2_closed_form(double n, double u, double Q)
{
    if (!(Q > 0.0)) throw InvalidArgument("sigma2_update: quadratic-plus-penalty term must be positive");
    return (u / (n / 2.0) - 1.0) / (2.0 * u - n) * Q;
}

} // namespace

double sigma2_update(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train, double cg_tol)
{
    const double Q = q_term(model, X_train, y_train, cg_tol);
    return sigma2_closed_form(static_cast<double>(y_train.size()), model.u(), Q);
}

QUpdate q_update(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train,
                 const QFitConfig& config)
{
    const double n = static_cast<double>(y_train.size());
    const double Q = q_term(model, X_train, y_train, config.cg_tol);
    auto f = [&](double u) { return neg_penalized_loglik_from_q(n, u, sigma2_closed_form(n, u, Q), Q); };

    const double lo = n / 2.0 + 1e-6 * n;
    const double cap = std::max(config.u_cap, 2.0 * lo);
    QUpdate out;
    out.f_lower = f(lo);

    // Geometric scan away from the lower end until the objective turns upward.
    std::vector<double> us{lo};
    std::vector<double> fs{out.f_lower};
    double a = 0.0, b = 0.0;
    bool bracketed = false;
    for (int i = -20;; ++i) {
        double u = lo + n * std::ldexp(1.0, i);
        if (u >= cap) u = cap;
        const double fu = f(u);
        us.push_back(u);
        fs.push_back(fu);
        const std::size_t k = us.size() - 1;
        if (fu > fs[k - 1]) {
            a = us[k >= 2 ? k - 2 : 0];
            b = u;
            bracketed = true;
            break;
        }
        if (u >= cap) break;
    }
    out.f_upper = fs.back();
    if (!bracketed) {
        out.u = cap;
        out.objective = fs.back();
        out.at_cap = true;
    } else {
        const auto res = brent_minimize<double>(f, a, b, 1e-10 * b);
        out.u = res.x;
        out.objective = res.fx;
        // Keep the best sampled point if it beats the polished one.
        for (std::size_t k = 0; k < us.size(); ++k) {
            if (fs[k] < out.objective) {
                out.objective = fs[k];
                out.u = us[k];
            }
        }
    }
    out.q = 1.0 + 1.0 / out.u;
    return out;
}

VectorXd theta_update(const QGaussianModel& model, const MatrixXd& X_train, const VectorXd& y_train,
                      const QFitConfig& config)
{
    require(X_train.rows() == y_train.size(), "theta_update: X rows must match y length");
    require(model.psi.size() == 0 || model.psi.rows() == y_train.size(), "theta_update: Psi must be n x n");
    const double n = static_cast<double>(y_train.size());
    const MatrixXd Z = with_intercept(X_train);
    MatrixXd W(Z.rows(), Z.cols());
    VectorXd z;
    if (model.psi.size() == 0) {
        W = Z;
        z = y_train;
    } else {
        for (Index j = 0; j < Z.cols(); ++j) W.col(j) = psi_solve(model.psi, Z.col(j), config.cg_tol);
        z = psi_solve(model.psi, y_train, config.cg_tol);
    }
    MatrixXd A = Z.transpose() * W / n;
    A = 0.5 * (A + A.transpose()).eval();
    const VectorXd c = Z.transpose() * z / n;
    const SmoothObjective obj = make_quadratic_objective(A, c, model.penalty, kInterceptSkip);

    if (config.solver == ThetaSolver::AG) {
        AGOptions opt;
        opt.tol = config.ag_tol;
        opt.max_iter = config.ag_max_iter;
        opt.skip = kInterceptSkip;
        const auto rep = ag_solve(obj, model.penalty, VectorXd::Zero(Z.cols()), opt);
        if (!rep.converged)
            throw NumericalError("theta_update: AG did not converge in " + std::to_string(rep.iterations) + " iterations");
        return rep.estimate;
    }
    const CompositeProblem prob = make_composite(obj, model.penalty, kInterceptSkip);
    const auto res = pcg_solve(prob, config.pcg, VectorXd::Zero(Z.cols()));
    if (!res.report.converged)
        throw NumericalError("theta_update: PCG did not converge; certificate |G|_inf = " +
                             std::to_string(res.certificate.moreau_grad_norm));
    return res.certificate.x_hat;
}

namespace {

void blockwise(QGaussianModel& model, const MatrixXd& X, const VectorXd& y, const QFitConfig& config)
{
    double f_prev = neg_penalized_loglik(model, X, y);
    model.fit_trace.push_back(f_prev);
    for (Index it = 0; it < config.max_outer; ++it) {
        // q block with sigma2 profiled, then the exact sigma2 block.
        const QUpdate qu = q_update(model, X, y, config);
        if (qu.at_cap) {
            const std::string w = "q search reached the cap u = " + std::to_string(config.u_cap) +
                                  " (near-Gaussian regime); returning the boundary";
            if (std::find(model.warnings.begin(), model.warnings.end(), w) == model.warnings.end())
                model.warnings.push_back(w);
        }
        QGaussianModel trial = model;
        trial.q_train = qu.q;
        trial.sigma2 = sigma2_update(trial, X, y, config.cg_tol);
        double f = neg_penalized_loglik(trial, X, y);

        // The sigma2 block alone never increases the objective either.
        QGaussianModel s_only = model;
        s_only.sigma2 = sigma2_update(model, X, y, config.cg_tol);
        const double fs = neg_penalized_loglik(s_only, X, y);
        if (fs < f) {
            trial = s_only;
            f = fs;
        }
        if (!(f < f_prev)) break;
        model.q_train = trial.q_train;
        model.sigma2 = trial.sigma2;
        if (f_prev - f < config.outer_tol) break;
        model.fit_trace.push_back(f);
        f_prev = f;
        ++model.outer_iterations;
    }
}

} // namespace

QGaussianModel fit(const MatrixXd& X_train, const VectorXd& y_train, const MatrixXd& psi, const PenaltySpec& penalty,
                   const QFitConfig& config)
{
    require(X_train.rows() == y_train.size(), "fit: X rows must match y length");
    require(X_train.rows() >= 2, "fit: need at least two observations");
    require(X_train.allFinite() && y_train.allFinite(), "fit: inputs must be finite");
    penalty.validate();
    const Index n = y_train.size();
    const double nd = static_cast<double>(n);

    QGaussianModel model;
    model.n_train = n;
    model.penalty = penalty;
    model.psi = psi;
    if (psi.size() != 0) {
        require(psi.rows() == n && psi.cols() == n, "fit: Psi must be n x n");
        (void)SpdFactor(psi);
    }
    model.q_train = config.q0 > 0.0 ? config.q0 : 1.0 + 1.0 / nd;
    require(model.q_train > 1.0 && model.q_train < 1.0 + 2.0 / nd, "fit: q0 must lie in (1, 1 + 2/n)");
    model.theta = VectorXd::Zero(X_train.cols() + 1);
    model.theta = theta_update(model, X_train, y_train, config);
    model.sigma2 = sigma2_update(model, X_train, y_train, config.cg_tol);
    blockwise(model, X_train, y_train, config);
    return model;
}

QGaussianModel refit(const QGaussianModel& start, const MatrixXd& X_train, const VectorXd& y_train,
                     const QFitConfig& config)
{
    QGaussianModel model = start;
    model.fit_trace.clear();
    model.outer_iterations = 0;
    model.warnings.clear();
    blockwise(model, X_train, y_train, config);
    return model;
}

QPrediction predict(const QGaussianModel& model, const MatrixXd& X_new, const MatrixXd& psi_new, Index n_new)
{
    require(X_new.cols() + 1 == model.theta.size(), "predict: X_new has the wrong number of columns");
    require(X_new.rows() == n_new, "predict: X_new rows must equal n_new");
    require(psi_new.size() == 0 || (psi_new.rows() == n_new && psi_new.cols() == n_new),
            "predict: Psi block must be n_new x n_new");
    QPrediction out;
    out.mean = with_intercept(X_new) * model.theta;
    out.q_new = recover_q_subset(model.q_train, model.n_train, n_new);
    QGaussianParams params;
    params.mu = out.mean;
    params.sigma2 = model.sigma2;
    params.psi = psi_new.size() == 0 ? MatrixXd(MatrixXd::Identity(n_new, n_new)) : psi_new;
    params.shape = QShape{out.q_new, n_new};
    out.q_covariance = q_covariance(params);
    out.covariance = covariance(params);
    return out;
}

} // namespace hdsparse
