#pragma once
#include <hdsparse/common.hpp>
#include <hdsparse/data.hpp>
#include <hdsparse/rng.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hdsparse {

enum class SignalKind { four_fixed, five_blocks, screening_recipe };
enum class OutcomeKind {
    linear,
    logistic,
    screening_continuous,
    screening_binary_original,
    screening_binary_translated
};

std::string to_string(SignalKind k);
std::string to_string(OutcomeKind k);
SignalKind signal_kind_from_string(const std::string& s);
OutcomeKind outcome_kind_from_string(const std::string& s);

/**
 * Simulation protocol. The design, the signal and the outcome each draw from
 * their own stream derived from `seed`, so changing one part never shifts
 * the random numbers of another.
 */
struct SimSpec {
    Index n = 200;
    Index p = 400;
    double tau = 0.5;
    double snr = 3.0;   // +inf gives noiseless outcomes
    SignalKind signal = SignalKind::five_blocks;
    OutcomeKind outcome = OutcomeKind::linear;
    Index p_true = 10;  // screening_recipe only
    bool nonlinear = false; // screening_recipe only: square the true columns
    double noise_df = 0.0;  // > 0 draws i.i.d. Student-t noise scaled by sigma
    std::uint64_t seed = 0;

    void validate() const;
    bool binary() const;
};

struct SimData {
    FeatureMatrix X;
    ResponseVector y;
    VectorXd beta;           // length p
    std::vector<bool> support;
    double sigma = 0.0;      // noise scale actually used
    Warnings warnings;
};

/// Rows i.i.d. N(0, Sigma), Sigma_jk = tau^|j-k|, via the Toeplitz Cholesky factor; columns standardized.
FeatureMatrix gen_design(const SimSpec& spec);

/// Coefficient vector of length p for the layout in spec.signal.
VectorXd gen_signal(const SimSpec& spec);

/// Outcome from X and beta following the recipe in spec.outcome.
ResponseVector gen_outcome(const SimSpec& spec, const FeatureMatrix& X, const VectorXd& beta,
                           Warnings* warnings = nullptr, double* sigma_used = nullptr);

/// gen_design, gen_signal and gen_outcome in one call.
SimData simulate(const SimSpec& spec);

/// beta' Sigma beta for the tau-Toeplitz Sigma, summed over the support only.
double toeplitz_quadratic_form(const VectorXd& beta, double tau);

/// Positions of the five_blocks layout: 5 runs of 10 with (p - 50) / 4 zeros between runs.
std::vector<Index> five_block_starts(Index p);

/// Positions of the four_fixed layout: the centers of the four quarters of [0, p).
std::vector<Index> four_fixed_positions(Index p);

} // namespace hdsparse
