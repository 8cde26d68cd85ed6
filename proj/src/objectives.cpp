#include <hdsparse/objectives.hpp>

#include <cmath>

namespace hdsparse {

double max_eigen_sym(const MatrixXd& A, double tol, Index max_iter)
{
    require(A.rows() == A.cols() && A.rows() >= 1, "max_eigen_sym: square matrix required");
    VectorXd v = VectorXd::Ones(A.rows()) / std::sqrt(static_cast<double>(A.rows()));
    double lam = 0.0;
    for (Index it = 0; it < max_iter; ++it) {
        VectorXd w = A * v;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = v.dot(w);
        v = w / nw;
        if (std::abs(next - lam) <= tol * std::max(1.0, std::abs(next))) return std::max(next, nw);
        lam = next;
    }
    return std::max(lam, (A * v).norm());
}

double max_eigen_gram(const MatrixXd& X, double tol, Index max_iter)
{
    const double n = static_cast<double>(X.rows());
    VectorXd v = VectorXd::Ones(X.cols()) / std::sqrt(static_cast<double>(X.cols()));
    double lam = 0.0;
    for (Index it = 0; it < max_iter; ++it) {
        VectorXd w = X.transpose() * (X * v) / n;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = v.dot(w);
        v = w / nw;
        // |Av| >= Rayleigh quotient and converges to the same limit from above.
        if (std::abs(next - lam) <= tol * std::max(1.0, std::abs(next))) return std::max(next, nw);
        lam = next;
    }
    return std::max(lam, (X.transpose() * (X * v) / n).norm());
}

double logistic_loss(const VectorXd& eta, const VectorXd& y)
{
    double s = 0.0;
    for (Index i = 0; i < eta.size(); ++i) s += log1pexp(eta[i]) - y[i] * eta[i];
    return s / static_cast<double>(eta.size());
}

SmoothObjective make_linear_objective(const MatrixXd& X, const VectorXd& y, const PenaltySpec& penalty,
                                      const std::vector<Index>& skip)
{
    require(X.rows() == y.size(), "make_linear_objective: X rows must match y length");
    penalty.validate();
    auto Xp = std::make_shared<const MatrixXd>(X);
    auto yp = std::make_shared<const VectorXd>(y);
    const double n = static_cast<double>(X.rows());
    SmoothObjective o;
    o.dimension = X.cols();
    o.lipschitz = max_eigen_gram(X) + penalty.lipschitz_h();
    o.value = [Xp, yp, n, penalty, skip](const VectorXd& b) {
        return 0.5 * ((*Xp) * b - *yp).squaredNorm() / n + h_total(penalty, b, skip);
    };
    o.grad = [Xp, yp, n, penalty, skip](const VectorXd& b) {
        VectorXd g = Xp->transpose() * ((*Xp) * b - *yp) / n;
        if (penalty.kind != PenaltyKind::L1) g += h_grad(penalty, b, skip);
        return g;
    };
    return o;
}

SmoothObjective make_logistic_objective(const MatrixXd& X, const VectorXd& y, const PenaltySpec& penalty,
                                        const std::vector<Index>& skip)
{
    require(X.rows() == y.size(), "make_logistic_objective: X rows must match y length");
    for (Index i = 0; i < y.size(); ++i)
        require(y[i] == 0.0 || y[i] == 1.0, "make_logistic_objective: y must be 0/1 (row " + std::to_string(i) + ")");
    penalty.validate();
    auto Xp = std::make_shared<const MatrixXd>(X);
    auto yp = std::make_shared<const VectorXd>(y);
    const double n = static_cast<double>(X.rows());
    SmoothObjective o;
    o.dimension = X.cols();
    o.lipschitz = max_eigen_gram(X) / 4.0 + penalty.lipschitz_h();
    o.value = [Xp, yp, penalty, skip](const VectorXd& b) {
        return logistic_loss((*Xp) * b, *yp) + h_total(penalty, b, skip);
    };
    o.grad = [Xp, yp, n, penalty, skip](const VectorXd& b) {
        VectorXd eta = (*Xp) * b;
        VectorXd r(eta.size());
        for (Index i = 0; i < eta.size(); ++i) r[i] = sigmoid(eta[i]) - (*yp)[i];
        VectorXd g = Xp->transpose() * r / n;
        if (penalty.kind != PenaltyKind::L1) g += h_grad(penalty, b, skip);
        return g;
    };
    return o;
}

SmoothObjective make_quadratic_objective(const MatrixXd& A, const VectorXd& c, const PenaltySpec& penalty,
                                         const std::vector<Index>& skip)
{
    require(A.rows() == A.cols() && A.rows() == c.size(), "make_quadratic_objective: shape mismatch");
    penalty.validate();
    auto Ap = std::make_shared<const MatrixXd>(A);
    auto cp = std::make_shared<const VectorXd>(c);
    SmoothObjective o;
    o.dimension = A.cols();
    o.lipschitz = max_eigen_sym(A) + penalty.lipschitz_h();
    o.value = [Ap, cp, penalty, skip](const VectorXd& b) {
        return 0.5 * b.dot((*Ap) * b) - cp->dot(b) + h_total(penalty, b, skip);
    };
    o.grad = [Ap, cp, penalty, skip](const VectorXd& b) {
        VectorXd g = (*Ap) * b - *cp;
        if (penalty.kind != PenaltyKind::L1) g += h_grad(penalty, b, skip);
        return g;
    };
    return o;
}

} // namespace hdsparse
