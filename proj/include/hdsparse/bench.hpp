#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/metrics.hpp>
#include <hdsparse/path.hpp>
#include <hdsparse/qgaussian.hpp>
#include <hdsparse/screening.hpp>
#include <hdsparse/simulate.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hdsparse {

enum class BenchKind { screening_auroc, ag_convergence, signal_recovery, qgaussian_recovery };

std::string to_string(BenchKind k);
BenchKind bench_kind_from_string(const std::string& s);

struct BenchConfig {
    SimSpec sim; // sim.seed is replaced per replication

    // screening_auroc
    std::vector<MIMethod> methods{MIMethod::FFTKDE, MIMethod::Binning, MIMethod::KNN, MIMethod::Pearson};
    ScreenOptions screen;

    // ag_convergence and signal_recovery
    PenaltySpec penalty = PenaltySpec::scad(0.5, 3.7);
    LossKind loss = LossKind::linear;
    std::vector<SolverKind> solvers{SolverKind::ag, SolverKind::ag_original, SolverKind::pg};
    double descent_threshold = std::exp(3.0); // iterations to reach (min found + threshold)
    double tol = 1e-6;
    Index max_iter = 2000;
    Index path_count = 50;
    FitOptions path_fit; // solver settings along the lambda path

    // qgaussian_recovery
    QFitConfig qfit;

    /// Default protocol for a benchmark kind at desk scale.
    static BenchConfig defaults(BenchKind kind);
};

struct BenchRow {
    Index replication = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> metrics; // NaN marks a metric that was not reached
    std::map<std::string, std::vector<double>> traces;
    std::optional<std::string> error;
    Warnings warnings;
};

struct BenchReport {
    BenchKind kind = BenchKind::screening_auroc;
    BenchConfig config;
    std::uint64_t master_seed = 0;
    Index replications = 0;
    int workers = 1;
    std::vector<BenchRow> rows;                // ordered by replication
    std::vector<std::string> columns;          // metric names, sorted
    std::map<std::string, MeanSE> summary;     // over finite values of each metric
    double wall_time = 0.0;

    /// Recomputes `columns` and `summary` from `rows`.
    void summarize();
};

/// Seed of replication r under `master`.
std::uint64_t replication_seed(std::uint64_t master, Index r);

/// Runs one replication; throws on failure.
BenchRow run_replication(BenchKind kind, const BenchConfig& config, std::uint64_t seed, Index replication);

/**
 * Runs `replications` independently seeded replications on up to `workers`
 * threads. Failed replications are kept with their error message. Rows are
 * merged by replication index, so output never depends on `workers`.
 */
BenchReport run_benchmark(BenchKind kind, const BenchConfig& config, Index replications, std::uint64_t master_seed,
                          int workers = 1);

/// Writes metrics.csv, report.json and traces/*.csv into `dir` (created if missing).
void write_bench_artifacts(const BenchReport& report, const std::string& dir);

/// metrics.csv content: replication, seed, error, then one column per metric (%.17g, NaN as empty).
std::string metrics_csv(const BenchReport& report);

} // namespace hdsparse
