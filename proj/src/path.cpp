#include <hdsparse/objectives.hpp>
#include <hdsparse/path.hpp>

#include <cmath>

namespace hdsparse {

std::string to_string(LossKind k) { return k == LossKind::linear ? "linear" : "logistic"; }

std::string to_string(SolverKind k)
{
    switch (k) {
    case SolverKind::ag: return "ag";
    case SolverKind::ag_original: return "ag_original";
    case SolverKind::pg: return "pg";
    case SolverKind::pcg: return "pcg";
    }
    return "ag";
}

LossKind loss_kind_from_string(const std::string& s)
{
    if (s == "linear") return LossKind::linear;
    if (s == "logistic") return LossKind::logistic;
    throw InvalidArgument("unknown loss '" + s + "' (expected linear|logistic)");
}

SolverKind solver_kind_from_string(const std::string& s)
{
    if (s == "ag-orig") return SolverKind::ag_original;
    for (auto k : {SolverKind::ag, SolverKind::ag_original, SolverKind::pg, SolverKind::pcg})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown solver '" + s + "' (expected ag|ag-orig|pg|pcg)");
}

MatrixXd with_ones(const MatrixXd& X)
{
    MatrixXd Z(X.rows(), X.cols() + 1);
    Z.col(0).setOnes();
    Z.rightCols(X.cols()) = X;
    return Z;
}

PenalizedFit fit_penalized(const MatrixXd& X, const VectorXd& y, LossKind loss, const PenaltySpec& penalty,
                           const FitOptions& opt, const std::optional<VectorXd>& warm_start)
{
    require(X.rows() == y.size(), "fit_penalized: X and y have different row counts");
    penalty.validate();
    const MatrixXd Z = with_ones(X);
    const std::vector<Index> skip{0};
    const SmoothObjective obj = loss == LossKind::linear ? make_linear_objective(Z, y, penalty, skip)
                                                         : make_logistic_objective(Z, y, penalty, skip);
    VectorXd x0 = VectorXd::Zero(Z.cols());
    if (warm_start) {
        require(warm_start->size() == Z.cols(), "fit_penalized: warm start must have length p + 1");
        x0 = *warm_start;
    }

    PenalizedFit fit;
    switch (opt.solver) {
    case SolverKind::ag:
    case SolverKind::ag_original: {
        AGOptions ao;
        ao.tol = opt.tol;
        ao.max_iter = opt.max_iter;
        ao.skip = skip;
        fit.report = ag_solve(obj, penalty, x0, ao, opt.solver == SolverKind::ag_original);
        break;
    }
    case SolverKind::pg: {
        PGOptions po;
        po.tol = opt.tol;
        po.max_iter = opt.max_iter;
        po.skip = skip;
        fit.report = pg_solve(obj, penalty, 1.0 / obj.lipschitz, x0, po);
        break;
    }
    case SolverKind::pcg: {
        PCGConfig cfg = opt.pcg;
        cfg.tol = opt.tol;
        cfg.max_iter = opt.max_iter;
        fit.report = pcg_solve(make_composite(obj, penalty, skip), cfg, x0).report;
        break;
    }
    }
    fit.intercept = fit.report.estimate[0];
    fit.beta = fit.report.estimate.tail(X.cols());
    return fit;
}

double prediction_loss(const MatrixXd& X, const VectorXd& y, LossKind loss, double intercept, const VectorXd& beta)
{
    const VectorXd eta = (X * beta).array() + intercept;
    if (loss == LossKind::linear) return 0.5 * (eta - y).squaredNorm() / static_cast<double>(y.size());
    return logistic_loss(eta, y);
}

double lambda_max(const MatrixXd& X, const VectorXd& y)
{
    require(X.rows() == y.size() && y.size() > 0, "lambda_max: shape mismatch");
    const VectorXd r = y.array() - y.mean();
    return (X.transpose() * r).cwiseAbs().maxCoeff() / static_cast<double>(y.size());
}

std::vector<double> lambda_path(const MatrixXd& X, const VectorXd& y, Index count)
{
    require(count >= 2, "lambda_path: count must be >= 2");
    const double top = lambda_max(X, y);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k)
        out[static_cast<std::size_t>(k)] = top * static_cast<double>(count - 1 - k) / static_cast<double>(count - 1);
    return out;
}

PathResult fit_path(const MatrixXd& X, const VectorXd& y, LossKind loss, const PenaltySpec& penalty,
                    const std::vector<double>& lambdas, const FitOptions& opt, const MatrixXd* X_val,
                    const VectorXd* y_val)
{
    require(!lambdas.empty(), "fit_path: empty lambda sequence");
    require((X_val == nullptr) == (y_val == nullptr), "fit_path: validation X and y must be given together");
    const auto count = static_cast<Index>(lambdas.size());
    PathResult res;
    res.lambdas = lambdas;
    res.betas.resize(X.cols(), count);
    res.intercepts.resize(count);
    std::optional<VectorXd> warm;
    for (Index k = 0; k < count; ++k) {
        const PenalizedFit f = fit_penalized(X, y, loss, penalty.with_lambda(lambdas[static_cast<std::size_t>(k)]), opt, warm);
        if (!f.report.converged)
            res.warnings.push_back("fit_path: lambda index " + std::to_string(k) + " hit the iteration cap");
        for (const auto& w : f.report.warnings) res.warnings.push_back(w);
        res.betas.col(k) = f.beta;
        res.intercepts[k] = f.intercept;
        warm = f.report.estimate;
        if (X_val) {
            const double v = prediction_loss(*X_val, *y_val, loss, f.intercept, f.beta);
            res.val_loss.push_back(v);
            if (!res.best || v < res.val_loss[static_cast<std::size_t>(*res.best)]) res.best = k;
        }
    }
    return res;
}

} // namespace hdsparse
