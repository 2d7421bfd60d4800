#pragma once

// Seeded Monte Carlo comparison of the estimators: MSE versus SNR at a fixed
// training-set size, and MSE versus training-set size at a fixed SNR.

#include "linest/estimators.hpp"
#include "linest/synth.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace linest {

enum class SweepKind { Snr, TrainingSize };
enum class PriorMode { TruePrior, IdentityMismatch, Both };
enum class HMode { PerTrial, FixedOnce };

std::string_view to_string(SweepKind k);
std::string_view to_string(PriorMode m);
std::string_view to_string(HMode m);

/// One result column of a sweep. Generative estimators are split by the prior
/// they are given; the identity-prior variant replaces C_yy by I in the known
/// statistics only, never in data generation.
enum class Column {
    OracleLMMSE,
    Generative,
    GenerativeIdentity,
    Discriminative,
    GenerativeHighSNR,
    DiscriminativeHighSNR,
};

std::string_view to_string(Column c);

struct ExperimentConfig {
    std::string name = "experiment";
    std::size_t nx = 28;
    std::size_t ny = 30;
    SweepKind sweep = SweepKind::Snr;
    std::vector<double> snr_grid;       // SNR = 1 / sigma2
    std::vector<std::size_t> nt_grid;   // training-set sizes
    std::size_t mc_trials = 10000;
    std::uint64_t seed = 20240601;
    PriorMode prior_mode = PriorMode::Both;
    HMode h_mode = HMode::PerTrial;
    Nonlinearity nonlinearity{};
    double noise_mean = 0.0;            // every entry of mu_w
    std::vector<Provenance> estimators;
    double ridge = 0.0;                 // added to C_yy_hat and C_xx_hat before inversion
};

/// {10^k / 2 : k = -4..8}.
std::vector<double> default_snr_grid();
/// {40, 60, 100, 200, 500, 1000, 5000}.
std::vector<std::size_t> default_nt_grid();
/// sigma = 0.3.
inline constexpr double kDefaultFixedSnr = 1.0 / 0.09;
inline constexpr std::size_t kDefaultFixedNt = 100;

/// Fills empty grids and the estimator set with the defaults for the sweep kind.
ExperimentConfig with_defaults(ExperimentConfig cfg);

/// Every violated invariant, as "field: message" lines. Empty means runnable.
std::vector<std::string> validate(const ExperimentConfig& cfg);

std::vector<Column> columns_for(const ExperimentConfig& cfg);

struct MseStat {
    double mean;
    double std_err;  // sample standard deviation / sqrt(count); 0 for a single value
};

/// Arithmetic mean and standard error; nullopt for an empty list.
std::optional<MseStat> compute_mse(std::span<const double> squared_errors);

struct TrialProblem {
    GaussianPrior prior;
    TrueModel model;
    std::size_t n_train;
};

struct EstimatorOutcome {
    std::optional<double> squared_error;  // nullopt when construction failed
    double condition = 0.0;
    std::string failure;
};

struct TrialRecord {
    std::vector<EstimatorOutcome> outcomes;  // aligned with the requested columns
};

/// One Monte Carlo trial on an explicit problem: draw n_train training pairs
/// from trial_seed.derive(1), fit every requested estimator, draw one test pair
/// from trial_seed.derive(2) and record ||y* - y_hat||^2 per estimator.
TrialRecord run_trial(const TrialProblem& problem, std::span<const Column> columns, double ridge,
                      Seed trial_seed);

/// Trial `trial_index` at grid point `sweep_index` of a validated config.
/// H comes from trial_seed.derive(0) (PerTrial) or once from the master seed
/// (FixedOnce). The trial seed depends on the trial index only, so every grid
/// point of a sweep sees the same H and the same underlying normal draws.
TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t sweep_index, std::uint64_t trial_index);

Seed trial_seed(const ExperimentConfig& cfg, std::uint64_t trial_index);
Matrix trial_H(const ExperimentConfig& cfg, std::uint64_t trial_index);

struct MseRow {
    std::string sweep_name;
    double sweep_value = 0.0;
    Column column{};
    std::optional<double> mean_mse;  // absent when every trial failed
    std::optional<double> std_err;
    std::size_t trials_ok = 0;
    std::size_t trials_failed = 0;
    /// Paired difference to the oracle over trials where both succeeded.
    std::optional<double> gap_mean;
    std::optional<double> gap_std_err;
    std::size_t condition_warnings = 0;  // trials with condition estimate > kConditionWarning
    std::string first_failure;
};

struct MseReport {
    ExperimentConfig config;
    std::vector<Column> columns;
    std::vector<MseRow> rows;  // ordered by grid point, then column

    const MseRow* find(std::size_t sweep_index, Column c) const;
};

/// Runs the sweep named by cfg.sweep. threads = 0 uses the hardware concurrency.
/// Results do not depend on the thread count.
MseReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

/// cfg.nt_grid must hold exactly one entry.
MseReport sweep_snr(ExperimentConfig cfg, unsigned threads = 0);
/// cfg.snr_grid must hold exactly one entry.
MseReport sweep_nt(ExperimentConfig cfg, unsigned threads = 0);

}  // namespace linest
