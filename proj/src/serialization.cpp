#include <hdsparse/serialization.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace hdsparse {

namespace {

// JSON has no NaN/Inf; they are written as null and read back as NaN.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double as_number(const Json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

template <typename T>
void read_if(const Json& j, const char* key, T& out)
{
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

Json vector_to_json(const VectorXd& v)
{
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

VectorXd vector_from_json(const Json& j)
{
    require(j.is_array(), "vector_from_json: expected an array");
    VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = as_number(j[i]);
    return v;
}

Json matrix_to_json(const MatrixXd& m)
{
    Json a = Json::array();
    for (Index i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i).transpose()));
    return a;
}

MatrixXd matrix_from_json(const Json& j)
{
    require(j.is_array(), "matrix_from_json: expected an array of rows");
    if (j.empty()) return MatrixXd();
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j[0].size());
    MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        require(static_cast<Index>(j[static_cast<std::size_t>(i)].size()) == cols, "matrix_from_json: ragged rows");
        m.row(i) = vector_from_json(j[static_cast<std::size_t>(i)]).transpose();
    }
    return m;
}

void to_json(Json& j, const PenaltySpec& p)
{
    j = Json{{"kind", to_string(p.kind)}, {"lambda", p.lambda}, {"a", p.a}, {"gamma", p.gamma},
             {"penalize_intercept", p.penalize_intercept}};
}

void from_json(const Json& j, PenaltySpec& p)
{
    if (j.contains("kind")) p.kind = penalty_kind_from_string(j.at("kind").get<std::string>());
    read_if(j, "lambda", p.lambda);
    read_if(j, "a", p.a);
    read_if(j, "gamma", p.gamma);
    read_if(j, "penalize_intercept", p.penalize_intercept);
    p.validate();
}

void to_json(Json& j, const SolveReport& r)
{
    Json obj = Json::array(), gm = Json::array();
    for (double v : r.objective_trace) obj.push_back(number(v));
    for (double v : r.grad_map_trace) gm.push_back(number(v));
    j = Json{{"estimate", vector_to_json(r.estimate)},
             {"iterations", r.iterations},
             {"converged", r.converged},
             {"wall_time", r.wall_time},
             {"objective_trace", obj},
             {"grad_map_trace", gm},
             {"warnings", r.warnings}};
}

void to_json(Json& j, const QGaussianModel& m)
{
    j = Json{{"theta", vector_to_json(m.theta)},
             {"sigma2", m.sigma2},
             {"q_train", m.q_train},
             {"n_train", m.n_train},
             {"dof", number(m.dof())},
             {"psi", matrix_to_json(m.psi)},
             {"penalty", m.penalty},
             {"fit_trace", m.fit_trace},
             {"outer_iterations", m.outer_iterations},
             {"warnings", m.warnings}};
}

void from_json(const Json& j, QGaussianModel& m)
{
    m.theta = vector_from_json(j.at("theta"));
    m.sigma2 = j.at("sigma2").get<double>();
    m.q_train = j.at("q_train").get<double>();
    m.n_train = j.at("n_train").get<Index>();
    m.psi = j.contains("psi") ? matrix_from_json(j.at("psi")) : MatrixXd();
    if (j.contains("penalty")) m.penalty = j.at("penalty").get<PenaltySpec>();
    read_if(j, "fit_trace", m.fit_trace);
    read_if(j, "outer_iterations", m.outer_iterations);
    read_if(j, "warnings", m.warnings);
}

void to_json(Json& j, const SimSpec& s)
{
    j = Json{{"n", s.n},
             {"p", s.p},
             {"tau", s.tau},
             {"snr", number(s.snr)},
             {"signal", to_string(s.signal)},
             {"outcome", to_string(s.outcome)},
             {"p_true", s.p_true},
             {"nonlinear", s.nonlinear},
             {"noise_df", s.noise_df},
             {"seed", s.seed}};
}

void from_json(const Json& j, SimSpec& s)
{
    read_if(j, "n", s.n);
    read_if(j, "p", s.p);
    read_if(j, "tau", s.tau);
    if (j.contains("snr")) s.snr = j.at("snr").is_null() ? INFINITY : j.at("snr").get<double>();
    if (j.contains("signal")) s.signal = signal_kind_from_string(j.at("signal").get<std::string>());
    if (j.contains("outcome")) s.outcome = outcome_kind_from_string(j.at("outcome").get<std::string>());
    read_if(j, "p_true", s.p_true);
    read_if(j, "nonlinear", s.nonlinear);
    read_if(j, "noise_df", s.noise_df);
    read_if(j, "seed", s.seed);
}

void to_json(Json& j, const BenchConfig& c)
{
    Json methods = Json::array(), solvers = Json::array();
    for (auto m : c.methods) methods.push_back(to_string(m));
    for (auto s : c.solvers) solvers.push_back(to_string(s));
    j = Json{{"sim", c.sim},
             {"methods", methods},
             {"kernel", to_string(c.screen.fftkde.kernel)},
             {"grid", c.screen.fftkde.nx},
             {"knn_k", c.screen.knn_k},
             {"penalty", c.penalty},
             {"loss", to_string(c.loss)},
             {"solvers", solvers},
             {"descent_threshold", c.descent_threshold},
             {"tol", c.tol},
             {"max_iter", c.max_iter},
             {"path_count", c.path_count},
             {"path_solver", to_string(c.path_fit.solver)},
             {"path_tol", c.path_fit.tol},
             {"path_max_iter", c.path_fit.max_iter}};
}

void from_json(const Json& j, BenchConfig& c)
{
    if (j.contains("sim")) from_json(j.at("sim"), c.sim);
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods")) c.methods.push_back(mi_method_from_string(m.get<std::string>()));
    }
    if (j.contains("kernel")) c.screen.fftkde.kernel = kernel_kind_from_string(j.at("kernel").get<std::string>());
    if (j.contains("grid")) c.screen.fftkde.nx = c.screen.fftkde.ny = j.at("grid").get<Index>();
    read_if(j, "knn_k", c.screen.knn_k);
    if (j.contains("penalty")) from_json(j.at("penalty"), c.penalty);
    if (j.contains("loss")) c.loss = loss_kind_from_string(j.at("loss").get<std::string>());
    if (j.contains("solvers")) {
        c.solvers.clear();
        for (const auto& s : j.at("solvers")) c.solvers.push_back(solver_kind_from_string(s.get<std::string>()));
    }
    read_if(j, "descent_threshold", c.descent_threshold);
    read_if(j, "tol", c.tol);
    read_if(j, "max_iter", c.max_iter);
    read_if(j, "path_count", c.path_count);
    if (j.contains("path_solver")) c.path_fit.solver = solver_kind_from_string(j.at("path_solver").get<std::string>());
    read_if(j, "path_tol", c.path_fit.tol);
    read_if(j, "path_max_iter", c.path_fit.max_iter);
}

void to_json(Json& j, const BenchReport& r)
{
    Json summary = Json::object();
    for (const auto& [k, v] : r.summary) summary[k] = Json{{"mean", number(v.mean)}, {"se", number(v.se)}, {"count", v.count}};
    Json failures = Json::array();
    for (const auto& row : r.rows)
        if (row.error) failures.push_back(Json{{"replication", row.replication}, {"error", *row.error}});
    j = Json{{"kind", to_string(r.kind)},
             {"config", r.config},
             {"master_seed", r.master_seed},
             {"replications", r.replications},
             {"workers", r.workers},
             {"columns", r.columns},
             {"summary", summary},
             {"failures", failures},
             {"wall_time", r.wall_time}};
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument("invalid JSON in '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j)
{
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace hdsparse
