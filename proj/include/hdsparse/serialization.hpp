#pragma once
#include <hdsparse/ag_solver.hpp>
#include <hdsparse/bench.hpp>
#include <hdsparse/penalty.hpp>
#include <hdsparse/qgaussian.hpp>
#include <hdsparse/simulate.hpp>

#include <json.hpp>

#include <string>

namespace hdsparse {

using Json = nlohmann::json;

Json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const Json& j);
Json matrix_to_json(const MatrixXd& m); // row-major nested arrays
MatrixXd matrix_from_json(const Json& j);

void to_json(Json& j, const PenaltySpec& p);
void from_json(const Json& j, PenaltySpec& p);

void to_json(Json& j, const SolveReport& r);

void to_json(Json& j, const QGaussianModel& m);
void from_json(const Json& j, QGaussianModel& m);

void to_json(Json& j, const SimSpec& s);
/// Fields absent from `j` keep their current values.
void from_json(const Json& j, SimSpec& s);

void to_json(Json& j, const BenchConfig& c);
/// Fields absent from `j` keep their current values.
void from_json(const Json& j, BenchConfig& c);

void to_json(Json& j, const BenchReport& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace hdsparse
