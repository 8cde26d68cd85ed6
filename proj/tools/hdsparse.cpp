// Command-line entry point: screen | fit | qfit | simulate | bench.
//
// Option values resolve as: command-line flag, then HDSL_<NAME> environment
// variable, then the --config JSON file (a subcommand section first, then the
// top level), then the built-in default.

#include <hdsparse/bench.hpp>
#include <hdsparse/data.hpp>
#include <hdsparse/path.hpp>
#include <hdsparse/qgaussian.hpp>
#include <hdsparse/screening.hpp>
#include <hdsparse/serialization.hpp>
#include <hdsparse/simulate.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace hdsparse;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = ".";
    std::string config;
};

struct DataArgs {
    std::string data;
    std::string outcome;
    bool no_header = false;
};

struct PenaltyArgs {
    std::string kind = "scad";
    double lambda = 0.5;
    double a = 3.7;
    double gamma = 3.0;

    PenaltySpec spec() const
    {
        PenaltySpec p;
        p.kind = penalty_kind_from_string(kind);
        p.lambda = lambda;
        p.a = a;
        p.gamma = gamma;
        p.validate();
        return p;
    }
};

std::string env_name(const std::string& opt)
{
    std::string s = "HDSL_";
    for (char c : opt) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string json_scalar(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

// Flattens {"penalty": {"kind":..,"lambda":..}} into the flag names used by fit and qfit.
void expand_penalty(Json& section)
{
    if (!section.is_object() || !section.contains("penalty") || !section["penalty"].is_object()) return;
    const Json p = section["penalty"];
    section.erase("penalty");
    if (p.contains("kind")) section["penalty"] = p["kind"];
    for (const char* k : {"lambda", "a", "gamma"})
        if (p.contains(k) && !section.contains(k)) section[k] = p[k];
}

const Json* config_lookup(const Json& cfg, const std::string& section, const std::string& name)
{
    std::string alt = name;
    std::replace(alt.begin(), alt.end(), '-', '_');
    for (const Json* scope : {section.empty() || !cfg.contains(section) ? nullptr : &cfg.at(section), &cfg}) {
        if (!scope || !scope->is_object()) continue;
        for (const auto& key : {name, alt})
            if (scope->contains(key)) return &scope->at(key);
    }
    return nullptr;
}

// Fills options the user did not pass on the command line.
void resolve(CLI::App& app, const Json& cfg, const std::string& section)
{
    for (CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_single_name();
        if (opt->count() > 0 || name.empty() || name == "help" || name == "config") continue;
        std::optional<std::string> value;
        if (const char* e = std::getenv(env_name(name).c_str())) value = e;
        else if (const Json* j = config_lookup(cfg, section, name)) value = json_scalar(*j);
        if (!value) continue;
        opt->add_result(*value);
        opt->run_callback();
    }
}

OutcomeColumn outcome_column(const std::string& s)
{
    if (s.empty()) throw InvalidArgument("--outcome is required (column name or 0-based index)");
    if (std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return static_cast<Index>(std::stoll(s));
    return s;
}

Table load(const DataArgs& d)
{
    if (d.data.empty()) throw InvalidArgument("--data is required");
    Table t = read_table(d.data, !d.no_header, outcome_column(d.outcome));
    if (!t.outcome) throw InvalidArgument("no outcome column selected");
    return t;
}

fs::path out_path(const Globals& g, const std::string& file)
{
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / file;
}

void add_data_options(CLI::App* app, DataArgs& d)
{
    app->add_option("--data", d.data, "Input CSV (features plus outcome column)");
    app->add_option("--outcome", d.outcome, "Outcome column: header name or 0-based index");
    app->add_flag("--no-header", d.no_header, "Input CSV has no header row");
}

void add_penalty_options(CLI::App* app, PenaltyArgs& p)
{
    app->add_option("--penalty", p.kind, "Penalty: l1|scad|mcp")->capture_default_str();
    app->add_option("--lambda", p.lambda, "Penalty level")->capture_default_str();
    app->add_option("--a", p.a, "SCAD shape a > 2")->capture_default_str();
    app->add_option("--gamma", p.gamma, "MCP shape gamma > 1")->capture_default_str();
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- screen

struct ScreenArgs {
    DataArgs data;
    std::string method = "fftkde";
    std::string kernel = "epanechnikov";
    Index grid = 256;
    int k = 3;
};

void run_screen(const Globals& g, const ScreenArgs& a)
{
    const Table t = load(a.data);
    const MIMethod method = mi_method_from_string(a.method);
    ScreenOptions opt;
    opt.fftkde.kernel = kernel_kind_from_string(a.kernel);
    opt.fftkde.nx = opt.fftkde.ny = a.grid;
    opt.knn_k = a.k;
    opt.workers = g.workers;
    const RankedFeatures rf = screen_all(t.features, *t.outcome, method, opt);

    std::ofstream csv(out_path(g, "screen.csv"));
    csv << "feature,score,rank,method\n";
    for (std::size_t r = 0; r < rf.ranking.size(); ++r)
        csv << t.features.name(rf.ranking[r].first) << ',' << fmt(rf.ranking[r].second) << ',' << r + 1 << ','
            << a.method << '\n';

    Json diag = Json::object();
    diag["method"] = a.method;
    diag["n"] = t.features.rows();
    diag["p"] = t.features.cols();
    Json cols = Json::array();
    for (Index j = 0; j < t.features.cols(); ++j) {
        const MIResult& res = rf.results[static_cast<std::size_t>(j)];
        Json c{{"feature", t.features.name(j)}, {"diagnostics", res.diagnostics}, {"warnings", res.warnings}};
        cols.push_back(c);
    }
    diag["columns"] = cols;
    Json fails = Json::array();
    for (const auto& [j, msg] : rf.failures) fails.push_back(Json{{"feature", t.features.name(j)}, {"error", msg}});
    diag["failures"] = fails;
    write_json_file(out_path(g, "screen_diagnostics.json").string(), diag);
    std::cout << "screened " << t.features.cols() << " features (" << rf.failures.size() << " failed) -> "
              << out_path(g, "screen.csv").string() << '\n';
}

// ---------------------------------------------------------------- fit

struct SolverArgs {
    std::string solver = "ag";
    double tol = 1e-4;
    Index max_iter = 2000;
    double rho = 0.0;
    std::string line_search = "brent";
};

void add_solver_options(CLI::App* app, SolverArgs& s, const std::string& solvers)
{
    app->add_option("--solver", s.solver, "Solver: " + solvers)->capture_default_str();
    app->add_option("--tol", s.tol, "Stopping tolerance")->capture_default_str();
    app->add_option("--max-iter", s.max_iter, "Iteration cap")->capture_default_str();
    app->add_option("--rho", s.rho, "PCG proximal parameter (0 selects 0.5/L)")->capture_default_str();
    app->add_option("--line-search", s.line_search, "PCG line search: wolfe|brent|backtrack")->capture_default_str();
}

PCGConfig pcg_config(const SolverArgs& s)
{
    PCGConfig c;
    c.rho = s.rho;
    c.line_search = line_search_from_string(s.line_search);
    c.tol = s.tol;
    c.max_iter = s.max_iter;
    return c;
}

struct FitArgs {
    DataArgs data;
    PenaltyArgs penalty;
    SolverArgs solver;
    std::string loss;
    Index path = 0;
    bool no_standardize = false;
};

void run_fit(const Globals& g, const FitArgs& a)
{
    const Table t = load(a.data);
    const LossKind loss = a.loss.empty() ? (t.outcome->kind() == ResponseKind::binary ? LossKind::logistic : LossKind::linear)
                                         : loss_kind_from_string(a.loss);
    FeatureMatrix X = t.features;
    Json stdz = nullptr;
    if (!a.no_standardize) {
        auto [Xs, rec] = standardize_columns(X);
        X = Xs;
        stdz = Json{{"means", vector_to_json(rec.means)}, {"sds", vector_to_json(rec.sds)}, {"warnings", rec.warnings}};
    }
    FitOptions fo;
    fo.solver = solver_kind_from_string(a.solver.solver);
    fo.tol = a.solver.tol;
    fo.max_iter = a.solver.max_iter;
    fo.pcg = pcg_config(a.solver);
    const PenaltySpec pen = a.penalty.spec();

    Json out{{"loss", to_string(loss)}, {"solver", to_string(fo.solver)}, {"standardization", stdz}};
    Json names = Json::array();
    for (Index j = 0; j < X.cols(); ++j) names.push_back(X.name(j));
    out["features"] = names;

    double intercept = 0.0;
    VectorXd beta;
    if (a.path > 0) {
        const DataSplit split = split_stratified(*t.outcome, {0.5, 0.5, 0.0}, 10, g.seed);
        const MatrixXd Xt = X.select_rows(split.train_idx).values(), Xv = X.select_rows(split.val_idx).values();
        const VectorXd yt = t.outcome->select(split.train_idx).values(), yv = t.outcome->select(split.val_idx).values();
        const auto lambdas = lambda_path(Xt, yt, a.path);
        const PathResult pr = fit_path(Xt, yt, loss, pen, lambdas, fo, &Xv, &yv);
        const Index b = *pr.best;
        intercept = pr.intercepts[b];
        beta = pr.betas.col(b);
        out["penalty"] = pen.with_lambda(lambdas[static_cast<std::size_t>(b)]);
        out["path"] = Json{{"lambdas", pr.lambdas}, {"validation_loss", pr.val_loss}, {"best", b}, {"warnings", pr.warnings}};
        std::ofstream csv(out_path(g, "path.csv"));
        csv << "lambda,validation_loss,active\n";
        for (std::size_t k = 0; k < lambdas.size(); ++k)
            csv << fmt(lambdas[k]) << ',' << fmt(pr.val_loss[k]) << ','
                << (pr.betas.col(static_cast<Index>(k)).array() != 0.0).count() << '\n';
    } else {
        const PenalizedFit f = fit_penalized(X.values(), t.outcome->values(), loss, pen, fo);
        intercept = f.intercept;
        beta = f.beta;
        out["penalty"] = pen;
        out["report"] = f.report;
    }
    out["intercept"] = intercept;
    out["beta"] = vector_to_json(beta);
    write_json_file(out_path(g, "fit.json").string(), out);

    std::ofstream csv(out_path(g, "coefficients.csv"));
    csv << "feature,coefficient\n(intercept)," << fmt(intercept) << '\n';
    for (Index j = 0; j < beta.size(); ++j) csv << X.name(j) << ',' << fmt(beta[j]) << '\n';
    std::cout << "fit " << (beta.array() != 0.0).count() << " nonzero coefficients -> "
              << out_path(g, "fit.json").string() << '\n';
}

// ---------------------------------------------------------------- qfit

struct QFitArgs {
    DataArgs data;
    PenaltyArgs penalty;
    SolverArgs solver;
    std::string psi = "identity";
    double q0 = 0.0;
    double outer_tol = 1e-8;
};

void run_qfit(const Globals& g, const QFitArgs& a)
{
    const Table t = load(a.data);
    const MatrixXd psi = a.psi == "identity" ? MatrixXd() : read_matrix_csv(a.psi);
    QFitConfig cfg;
    cfg.solver = a.solver.solver == "ag" ? ThetaSolver::AG : ThetaSolver::PCG;
    if (a.solver.solver != "ag" && a.solver.solver != "pcg") throw InvalidArgument("qfit --solver must be pcg or ag");
    cfg.pcg = pcg_config(a.solver);
    cfg.q0 = a.q0;
    cfg.outer_tol = a.outer_tol;
    const QGaussianModel m = fit(t.features.values(), t.outcome->values(), psi, a.penalty.spec(), cfg);
    write_json_file(out_path(g, "qmodel.json").string(), Json(m));
    std::cout << "q = " << fmt(m.q_train) << ", dof = " << fmt(m.dof()) << ", sigma2 = " << fmt(m.sigma2) << " -> "
              << out_path(g, "qmodel.json").string() << '\n';
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------- simulate / bench

struct SimArgs {
    Index n = 200;
    Index p = 400;
    double tau = 0.5;
    double snr = 3.0;
    std::string signal = "five_blocks";
    std::string response = "linear";
    Index p_true = 10;
    bool nonlinear = false;
    double noise_df = 0.0;
};

std::vector<CLI::Option*> add_sim_options(CLI::App* app, SimArgs& s)
{
    return {
        app->add_option("--n", s.n, "Sample size")->capture_default_str(),
        app->add_option("--p", s.p, "Number of features")->capture_default_str(),
        app->add_option("--tau", s.tau, "Toeplitz correlation in [0, 1)")->capture_default_str(),
        app->add_option("--snr", s.snr, "Signal-to-noise ratio")->capture_default_str(),
        app->add_option("--signal", s.signal, "four_fixed|five_blocks|screening_recipe")->capture_default_str(),
        app->add_option("--response", s.response,
                        "linear|logistic|screening_continuous|screening_binary_original|screening_binary_translated")
            ->capture_default_str(),
        app->add_option("--p-true", s.p_true, "True features in the screening recipe")->capture_default_str(),
        app->add_flag("--nonlinear", s.nonlinear, "Square the true features (screening recipe)"),
        app->add_option("--noise-df", s.noise_df, "Student-t noise degrees of freedom (0 = Gaussian)")->capture_default_str(),
    };
}

void apply_sim(const SimArgs& a, const std::vector<CLI::Option*>& opts, SimSpec& s)
{
    auto set = [](const CLI::Option* o) { return o->count() > 0; };
    if (set(opts[0])) s.n = a.n;
    if (set(opts[1])) s.p = a.p;
    if (set(opts[2])) s.tau = a.tau;
    if (set(opts[3])) s.snr = a.snr;
    if (set(opts[4])) s.signal = signal_kind_from_string(a.signal);
    if (set(opts[5])) s.outcome = outcome_kind_from_string(a.response);
    if (set(opts[6])) s.p_true = a.p_true;
    if (set(opts[7])) s.nonlinear = a.nonlinear;
    if (set(opts[8])) s.noise_df = a.noise_df;
}

void run_simulate(const Globals& g, const SimArgs& a, const std::vector<CLI::Option*>& opts)
{
    SimSpec s;
    s.n = a.n;
    s.p = a.p;
    s.tau = a.tau;
    s.snr = a.snr;
    s.signal = signal_kind_from_string(a.signal);
    s.outcome = outcome_kind_from_string(a.response);
    s.p_true = a.p_true;
    s.nonlinear = a.nonlinear;
    s.noise_df = a.noise_df;
    apply_sim(a, opts, s);
    s.seed = g.seed;
    const SimData d = simulate(s);

    MatrixXd table(s.n, s.p + 1);
    table.leftCols(s.p) = d.X.values();
    table.col(s.p) = d.y.values();
    std::vector<std::string> header;
    for (Index j = 0; j < s.p; ++j) header.push_back("x" + std::to_string(j));
    header.push_back("y");
    write_table(out_path(g, "data.csv").string(), table, header);

    std::ofstream truth(out_path(g, "truth.csv"));
    truth << "feature,beta\n";
    for (Index j = 0; j < s.p; ++j) truth << "x" << j << ',' << fmt(d.beta[j]) << '\n';
    write_json_file(out_path(g, "simulation.json").string(),
                    Json{{"spec", s}, {"sigma", d.sigma}, {"warnings", d.warnings}});
    for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "simulated n=" << s.n << " p=" << s.p << " -> " << out_path(g, "data.csv").string() << '\n';
}

struct BenchArgs {
    std::string kind = "screening_auroc";
    Index replications = 20;
    SimArgs sim;
    std::vector<CLI::Option*> sim_opts;
};

void run_bench(const Globals& g, const BenchArgs& a, const Json& cfg_file)
{
    const BenchKind kind = bench_kind_from_string(a.kind);
    BenchConfig cfg = BenchConfig::defaults(kind);
    if (cfg_file.contains("bench")) from_json(cfg_file.at("bench"), cfg);
    apply_sim(a.sim, a.sim_opts, cfg.sim);
    const BenchReport rep = run_benchmark(kind, cfg, a.replications, g.seed, g.workers);
    write_bench_artifacts(rep, g.out_dir);
    for (const auto& c : rep.columns) {
        const MeanSE& s = rep.summary.at(c);
        std::cout << c << ": " << fmt(s.mean) << " +/- " << fmt(s.se) << " (n=" << s.count << ")\n";
    }
    Index failed = 0;
    for (const auto& r : rep.rows) failed += r.error ? 1 : 0;
    if (failed > 0) std::cerr << failed << " replication(s) failed; see report.json\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse high-dimensional regression, screening and q-Gaussian fitting"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--workers", g.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--config", g.config, "JSON run configuration");

    ScreenArgs sa;
    auto* screen = app.add_subcommand("screen", "Rank features by association with the outcome");
    add_data_options(screen, sa.data);
    screen->add_option("--method", sa.method, "fftkde|binning|knn|pearson")->capture_default_str();
    screen->add_option("--kernel", sa.kernel, "FFT-KDE kernel: epanechnikov|gaussian")->capture_default_str();
    screen->add_option("--grid", sa.grid, "FFT-KDE grid points per axis (power of two >= 64)")->capture_default_str();
    screen->add_option("--k", sa.k, "KSG neighbours")->capture_default_str();

    FitArgs fa;
    auto* fitc = app.add_subcommand("fit", "Penalized linear or logistic regression");
    add_data_options(fitc, fa.data);
    add_penalty_options(fitc, fa.penalty);
    add_solver_options(fitc, fa.solver, "ag|ag-orig|pg|pcg");
    fitc->add_option("--loss", fa.loss, "linear|logistic (default: from the outcome type)");
    fitc->add_option("--path", fa.path, "Fit this many lambdas from lambda_max to 0 and select on a validation half");
    fitc->add_flag("--no-standardize", fa.no_standardize, "Use the features as given");

    QFitArgs qa;
    qa.solver.solver = "pcg";
    qa.solver.tol = 1e-6;
    qa.solver.max_iter = 5000;
    qa.penalty.lambda = 0.1;
    auto* qfit = app.add_subcommand("qfit", "Penalized q-Gaussian regression");
    add_data_options(qfit, qa.data);
    add_penalty_options(qfit, qa.penalty);
    add_solver_options(qfit, qa.solver, "pcg|ag");
    qfit->add_option("--psi", qa.psi, "Psi CSV matrix or 'identity'")->capture_default_str();
    qfit->add_option("--q0", qa.q0, "Starting q (0 selects 1 + 1/n)")->capture_default_str();
    qfit->add_option("--outer-tol", qa.outer_tol, "Blockwise loop tolerance")->capture_default_str();

    SimArgs sim;
    auto* simc = app.add_subcommand("simulate", "Write a simulated data set");
    const auto sim_opts = add_sim_options(simc, sim);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Run a replicated benchmark");
    bench->add_option("--kind", ba.kind, "screening_auroc|ag_convergence|signal_recovery|qgaussian_recovery")
        ->capture_default_str();
    bench->add_option("--replications", ba.replications, "Replications")->capture_default_str();
    ba.sim_opts = add_sim_options(bench, ba.sim);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (g.config.empty())
            if (const char* e = std::getenv("HDSL_CONFIG")) g.config = e;
        Json cfg = g.config.empty() ? Json::object() : read_json_file(g.config);
        require(cfg.is_object(), "--config must hold a JSON object");
        CLI::App* sub = app.get_subcommands().front();
        expand_penalty(cfg);
        if (cfg.contains(sub->get_name())) expand_penalty(cfg[sub->get_name()]);
        resolve(app, cfg, "");
        resolve(*sub, cfg, sub->get_name());

        const std::string name = sub->get_name();
        if (name == "screen") run_screen(g, sa);
        else if (name == "fit") run_fit(g, fa);
        else if (name == "qfit") run_qfit(g, qa);
        else if (name == "simulate") run_simulate(g, sim, sim_opts);
        else if (name == "bench") run_bench(g, ba, cfg);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
