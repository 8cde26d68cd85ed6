#include <hdsparse/bench.hpp>
#include <hdsparse/parallel.hpp>
#include <hdsparse/serialization.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hdsparse {

std::string to_string(BenchKind k)
{
    switch (k) {
    case BenchKind::screening_auroc: return "screening_auroc";
    case BenchKind::ag_convergence: return "ag_convergence";
    case BenchKind::signal_recovery: return "signal_recovery";
    case BenchKind::qgaussian_recovery: return "qgaussian_recovery";
    }
    return "screening_auroc";
}

BenchKind bench_kind_from_string(const std::string& s)
{
    for (auto k : {BenchKind::screening_auroc, BenchKind::ag_convergence, BenchKind::signal_recovery,
                   BenchKind::qgaussian_recovery})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown benchmark '" + s +
                          "' (expected screening_auroc|ag_convergence|signal_recovery|qgaussian_recovery)");
}

BenchConfig BenchConfig::defaults(BenchKind kind)
{
    BenchConfig c;
    switch (kind) {
    case BenchKind::screening_auroc:
        c.sim.signal = SignalKind::screening_recipe;
        c.sim.outcome = OutcomeKind::screening_continuous;
        c.sim.nonlinear = true;
        break;
    case BenchKind::ag_convergence:
    case BenchKind::signal_recovery:
        c.sim.signal = SignalKind::five_blocks;
        c.sim.outcome = OutcomeKind::linear;
        break;
    case BenchKind::qgaussian_recovery:
        c.sim.signal = SignalKind::four_fixed;
        c.sim.outcome = OutcomeKind::linear;
        c.sim.p = 20;
        c.sim.noise_df = 5.0;
        c.penalty = PenaltySpec::scad(0.05, 3.7);
        break;
    }
    return c;
}

std::uint64_t replication_seed(std::uint64_t master, Index r) { return derive_seed(master, static_cast<std::uint64_t>(r)); }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void screening_replication(const BenchConfig& cfg, const SimSpec& spec, BenchRow& row)
{
    const SimData d = simulate(spec);
    row.warnings = d.warnings;
    ScreenOptions opt = cfg.screen;
    opt.workers = 1; // replications already run in parallel
    for (MIMethod m : cfg.methods) {
        const RankedFeatures rf = screen_all(d.X, d.y, m, opt);
        row.metrics["auroc_" + to_string(m)] = selection_auroc(rf.scores, d.support);
        row.metrics["failures_" + to_string(m)] = static_cast<double>(rf.failures.size());
    }
}

void convergence_replication(const BenchConfig& cfg, const SimSpec& spec, BenchRow& row)
{
    const SimData d = simulate(spec);
    row.warnings = d.warnings;
    const LossKind loss = spec.binary() ? LossKind::logistic : LossKind::linear;
    std::vector<std::pair<SolverKind, SolveReport>> runs;
    double best = INFINITY;
    for (SolverKind s : cfg.solvers) {
        FitOptions fo;
        fo.solver = s;
        fo.tol = cfg.tol;
        fo.max_iter = cfg.max_iter;
        fo.pcg = cfg.path_fit.pcg;
        PenalizedFit f = fit_penalized(d.X.values(), d.y.values(), loss, cfg.penalty, fo);
        for (double v : f.report.objective_trace) best = std::min(best, v);
        runs.emplace_back(s, std::move(f.report));
    }
    row.metrics["objective_min"] = best;
    for (auto& [s, rep] : runs) {
        const auto it = iterations_to_threshold(rep.objective_trace, best + cfg.descent_threshold);
        row.metrics["iters_" + to_string(s)] = it ? static_cast<double>(*it) : kNaN;
        row.metrics["final_" + to_string(s)] = rep.objective_trace.empty() ? kNaN : rep.objective_trace.back();
        row.traces["objective_" + to_string(s)] = std::move(rep.objective_trace);
    }
}

void recovery_replication(const BenchConfig& cfg, const SimSpec& spec, BenchRow& row)
{
    // Training and validation sets of equal size from one simulated sample.
    SimSpec both = spec;
    both.n = 2 * spec.n;
    const SimData d = simulate(both);
    row.warnings = d.warnings;
    const MatrixXd Xt = d.X.values().topRows(spec.n), Xv = d.X.values().bottomRows(spec.n);
    const VectorXd yt = d.y.values().head(spec.n), yv = d.y.values().tail(spec.n);
    const LossKind loss = spec.binary() ? LossKind::logistic : LossKind::linear;
    const auto lambdas = lambda_path(Xt, yt, cfg.path_count);
    const PathResult path = fit_path(Xt, yt, loss, cfg.penalty, lambdas, cfg.path_fit, &Xv, &yv);
    for (const auto& w : path.warnings) row.warnings.push_back(w);
    const Index b = *path.best;
    const VectorXd beta = path.betas.col(b);
    const auto pv = ppv_npv(support_of(beta), d.support);
    row.metrics["ppv"] = pv.ppv.value_or(kNaN);
    row.metrics["npv"] = pv.npv.value_or(kNaN);
    row.metrics["scaled_error"] = scaled_estimation_error(d.beta, beta);
    row.metrics["active_size"] = static_cast<double>((beta.array() != 0.0).count());
    row.metrics["lambda"] = lambdas[static_cast<std::size_t>(b)];
    row.traces["validation_loss"] = path.val_loss;
}

void qgaussian_replication(const BenchConfig& cfg, const SimSpec& spec, BenchRow& row)
{
    const SimData d = simulate(spec);
    row.warnings = d.warnings;
    const QGaussianModel m = fit(d.X.values(), d.y.values(), MatrixXd(), cfg.penalty, cfg.qfit);
    for (const auto& w : m.warnings) row.warnings.push_back(w);
    row.metrics["dof"] = m.dof();
    row.metrics["q"] = m.q_train;
    row.metrics["sigma2"] = m.sigma2;
    row.metrics["at_cap"] = m.u() >= (1.0 - 1e-6) * cfg.qfit.u_cap ? 1.0 : 0.0;
    row.metrics["scaled_error"] = scaled_estimation_error(d.beta, m.theta.tail(spec.p));
    row.traces["objective"] = m.fit_trace;
}

std::string fmt(double v)
{
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

} // namespace

BenchRow run_replication(BenchKind kind, const BenchConfig& config, std::uint64_t seed, Index replication)
{
    BenchRow row;
    row.replication = replication;
    row.seed = seed;
    SimSpec spec = config.sim;
    spec.seed = seed;
    switch (kind) {
    case BenchKind::screening_auroc: screening_replication(config, spec, row); break;
    case BenchKind::ag_convergence: convergence_replication(config, spec, row); break;
    case BenchKind::signal_recovery: recovery_replication(config, spec, row); break;
    case BenchKind::qgaussian_recovery: qgaussian_replication(config, spec, row); break;
    }
    return row;
}

void BenchReport::summarize()
{
    std::set<std::string> names;
    for (const auto& r : rows)
        for (const auto& [k, v] : r.metrics) names.insert(k);
    columns.assign(names.begin(), names.end());
    summary.clear();
    for (const auto& c : columns) {
        std::vector<double> vals;
        for (const auto& r : rows) {
            const auto it = r.metrics.find(c);
            if (it != r.metrics.end() && std::isfinite(it->second)) vals.push_back(it->second);
        }
        summary[c] = mean_se(vals);
    }
}

BenchReport run_benchmark(BenchKind kind, const BenchConfig& config, Index replications, std::uint64_t master_seed,
                          int workers)
{
    require(replications >= 1, "run_benchmark: replications must be >= 1");
    config.sim.validate();
    const auto t0 = std::chrono::steady_clock::now();
    BenchReport rep;
    rep.kind = kind;
    rep.config = config;
    rep.master_seed = master_seed;
    rep.replications = replications;
    rep.workers = workers;
    rep.rows.resize(static_cast<std::size_t>(replications));
    parallel_for(replications, workers, [&](Index r) {
        const std::uint64_t seed = replication_seed(master_seed, r);
        BenchRow& slot = rep.rows[static_cast<std::size_t>(r)];
        try {
            slot = run_replication(kind, config, seed, r);
        } catch (const std::exception& e) {
            slot = BenchRow{};
            slot.replication = r;
            slot.seed = seed;
            slot.error = e.what();
        }
    });
    rep.summarize();
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string metrics_csv(const BenchReport& report)
{
    std::ostringstream out;
    out << "replication,seed,error";
    for (const auto& c : report.columns) out << ',' << c;
    out << '\n';
    for (const auto& r : report.rows) {
        out << r.replication << ',' << r.seed << ',' << (r.error ? csv_field(*r.error) : "");
        for (const auto& c : report.columns) {
            const auto it = r.metrics.find(c);
            out << ',' << (it == r.metrics.end() ? "" : fmt(it->second));
        }
        out << '\n';
    }
    return out.str();
}

void write_bench_artifacts(const BenchReport& report, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "traces");
    {
        std::ofstream f(fs::path(dir) / "metrics.csv");
        if (!f) throw InvalidArgument("cannot write metrics.csv in '" + dir + "'");
        f << metrics_csv(report);
    }
    write_json_file((fs::path(dir) / "report.json").string(), Json(report));
    for (const auto& r : report.rows) {
        for (const auto& [name, trace] : r.traces) {
            std::ofstream f(fs::path(dir) / "traces" / ("rep" + std::to_string(r.replication) + "_" + name + ".csv"));
            f << "iteration,value\n";
            for (std::size_t k = 0; k < trace.size(); ++k) f << k + 1 << ',' << fmt(trace[k]) << '\n';
        }
    }
}

} // namespace hdsparse
