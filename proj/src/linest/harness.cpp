#include "linest/harness.hpp"

#include "linest/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace linest {

std::string_view to_string(SweepKind k) {
    return k == SweepKind::Snr ? "snr" : "n_t";
}

std::string_view to_string(PriorMode m) {
    switch (m) {
        case PriorMode::TruePrior: return "true";
        case PriorMode::IdentityMismatch: return "identity";
        case PriorMode::Both: return "both";
    }
    return "unknown";
}

std::string_view to_string(HMode m) {
    return m == HMode::PerTrial ? "per_trial" : "fixed_once";
}

std::string_view to_string(Column c) {
    switch (c) {
        case Column::OracleLMMSE: return "oracle_lmmse";
        case Column::Generative: return "generative";
        case Column::GenerativeIdentity: return "generative_identity";
        case Column::Discriminative: return "discriminative";
        case Column::GenerativeHighSNR: return "generative_highsnr";
        case Column::DiscriminativeHighSNR: return "discriminative_highsnr";
    }
    return "unknown";
}

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int k = -4; k <= 8; ++k) grid.push_back(std::pow(10.0, k) / 2.0);
    return grid;
}

std::vector<std::size_t> default_nt_grid() { return {40, 60, 100, 200, 500, 1000, 5000}; }

ExperimentConfig with_defaults(ExperimentConfig cfg) {
    if (cfg.sweep == SweepKind::Snr) {
        if (cfg.snr_grid.empty()) cfg.snr_grid = default_snr_grid();
        if (cfg.nt_grid.empty()) cfg.nt_grid = {kDefaultFixedNt};
    } else {
        if (cfg.nt_grid.empty()) cfg.nt_grid = default_nt_grid();
        if (cfg.snr_grid.empty()) cfg.snr_grid = {kDefaultFixedSnr};
    }
    if (cfg.estimators.empty()) {
        if (cfg.nonlinearity.is_linear()) cfg.estimators.push_back(Provenance::OracleLMMSE);
        cfg.estimators.push_back(Provenance::Generative);
        cfg.estimators.push_back(Provenance::Discriminative);
    }
    return cfg;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> issues;
    if (cfg.nx < 1) issues.emplace_back("N_x must be ≥ 1");
    if (cfg.ny < 1) issues.emplace_back("N_y must be ≥ 1");
    if (cfg.mc_trials < 1) issues.emplace_back("mc_trials must be ≥ 1");

    if (cfg.snr_grid.empty()) issues.emplace_back("snr_grid must not be empty");
    for (double snr : cfg.snr_grid) {
        if (!(snr > 0.0) || !std::isfinite(snr)) {
            issues.emplace_back("snr_grid entries must be positive and finite");
            break;
        }
    }
    if (cfg.nt_grid.empty()) issues.emplace_back("nt_grid must not be empty");
    for (auto nt : cfg.nt_grid) {
        if (nt < 1) {
            issues.emplace_back("nt_grid entries must be ≥ 1");
            break;
        }
    }
    if (cfg.sweep == SweepKind::Snr && cfg.nt_grid.size() > 1) {
        issues.emplace_back("nt_grid must hold exactly one entry for an snr sweep");
    }
    if (cfg.sweep == SweepKind::TrainingSize && cfg.snr_grid.size() > 1) {
        issues.emplace_back("snr_grid must hold exactly one entry for an n_t sweep");
    }

    if (!(cfg.ridge >= 0.0) || !std::isfinite(cfg.ridge)) issues.emplace_back("ridge must be ≥ 0 and finite");
    if (!std::isfinite(cfg.noise_mean)) issues.emplace_back("noise_mean must be finite");

    const auto& g = cfg.nonlinearity;
    if (g.kind == Nonlinearity::Kind::Tanh && !(g.parameter > 0.0 && std::isfinite(g.parameter))) {
        issues.emplace_back("nonlinearity.scale must be positive and finite");
    }
    if (g.kind == Nonlinearity::Kind::Cubic && !std::isfinite(g.parameter)) {
        issues.emplace_back("nonlinearity.alpha must be finite");
    }

    if (cfg.estimators.empty()) issues.emplace_back("estimators must not be empty");
    for (auto p : cfg.estimators) {
        switch (p) {
            case Provenance::OracleLMMSE:
                if (!g.is_linear()) issues.emplace_back("estimators: oracle_lmmse requires a linear model");
                break;
            case Provenance::GenerativeHighSNR:
            case Provenance::DiscriminativeHighSNR:
                if (cfg.ny < cfg.nx) {
                    issues.emplace_back("estimators: " + std::string(to_string(p)) + " requires N_y ≥ N_x");
                }
                break;
            case Provenance::GenerativeAsymptote:
            case Provenance::DiscriminativeAsymptote:
                issues.emplace_back("estimators: " + std::string(to_string(p)) +
                                    " needs population moments and cannot be run by the harness");
                break;
            default:
                break;
        }
    }
    return issues;
}

std::vector<Column> columns_for(const ExperimentConfig& cfg) {
    auto wants = [&](Provenance p) {
        return std::find(cfg.estimators.begin(), cfg.estimators.end(), p) != cfg.estimators.end();
    };
    std::vector<Column> out;
    if (wants(Provenance::OracleLMMSE)) out.push_back(Column::OracleLMMSE);
    if (wants(Provenance::Generative)) {
        if (cfg.prior_mode != PriorMode::IdentityMismatch) out.push_back(Column::Generative);
        if (cfg.prior_mode != PriorMode::TruePrior) out.push_back(Column::GenerativeIdentity);
    }
    if (wants(Provenance::Discriminative)) out.push_back(Column::Discriminative);
    if (wants(Provenance::GenerativeHighSNR)) out.push_back(Column::GenerativeHighSNR);
    if (wants(Provenance::DiscriminativeHighSNR)) out.push_back(Column::DiscriminativeHighSNR);
    return out;
}

std::optional<MseStat> compute_mse(std::span<const double> squared_errors) {
    if (squared_errors.empty()) return std::nullopt;
    const auto n = static_cast<double>(squared_errors.size());
    double sum = 0.0;
    for (double e : squared_errors) sum += e;
    const double mean = sum / n;
    if (squared_errors.size() == 1) return MseStat{mean, 0.0};
    double ss = 0.0;
    for (double e : squared_errors) ss += (e - mean) * (e - mean);
    return MseStat{mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

TrialRecord run_trial(const TrialProblem& problem, std::span<const Column> columns, double ridge,
                      Seed seed) {
    const Dataset train = sample_pairs(problem.prior, problem.model, problem.n_train, seed.derive(1));
    const Dataset test = sample_pairs(problem.prior, problem.model, 1, seed.derive(2));
    const Vector x_star = test.xs().row(0).transpose();
    const Vector y_star = test.ys().row(0).transpose();
    const SampleMoments moments = compute_moments(train);

    // The ML fit is shared by both generative columns.
    std::optional<FittedModel> fit;
    auto fitted = [&]() -> const FittedModel& {
        if (!fit) fit = fit_ml(moments, ridge);
        return *fit;
    };

    auto build = [&](Column c) -> AffineEstimator {
        switch (c) {
            case Column::OracleLMMSE:
                return oracle_lmmse(problem.prior, problem.model);
            case Column::Generative:
                return generative_estimator(fitted(), KnownStatistics(problem.prior, problem.model.sigma2),
                                            moments);
            case Column::GenerativeIdentity: {
                const auto ny = static_cast<Eigen::Index>(problem.prior.ny());
                GaussianPrior assumed(problem.prior.mu_y(), Matrix::Identity(ny, ny));
                return generative_estimator(fitted(), KnownStatistics(std::move(assumed), problem.model.sigma2),
                                            moments);
            }
            case Column::Discriminative:
                return discriminative_estimator(moments, ridge);
            case Column::GenerativeHighSNR:
                return generative_highsnr(problem.prior, problem.model.H, moments);
            case Column::DiscriminativeHighSNR:
                return discriminative_highsnr(problem.model.H, moments);
        }
        throw InvalidInput("run_trial: unknown column");
    };

    TrialRecord record;
    record.outcomes.reserve(columns.size());
    for (Column c : columns) {
        EstimatorOutcome outcome;
        try {
            const AffineEstimator est = build(c);
            outcome.squared_error = (y_star - est(x_star)).squaredNorm();
            outcome.condition = est.condition();
        } catch (const SingularMatrix& e) {
            outcome.failure = e.what();
            outcome.condition = e.condition();
        } catch (const Error& e) {
            outcome.failure = e.what();
        }
        record.outcomes.push_back(std::move(outcome));
    }
    return record;
}

namespace {

// Stream index reserved for the FixedOnce measurement matrix; trial indices
// never reach it.
constexpr std::uint64_t kFixedHStream = ~std::uint64_t{0};

struct SweepContext {
    ExperimentConfig cfg;
    GaussianPrior prior;
    std::vector<Column> columns;
    std::optional<Matrix> fixed_h;

    explicit SweepContext(const ExperimentConfig& c)
        : cfg(c), prior(paper_prior(c.ny)), columns(columns_for(c)) {
        if (cfg.h_mode == HMode::FixedOnce) fixed_h = trial_H(cfg, 0);
    }

    double sigma2_at(std::size_t sweep_index) const {
        const double snr = cfg.sweep == SweepKind::Snr ? cfg.snr_grid.at(sweep_index) : cfg.snr_grid.front();
        return 1.0 / snr;
    }

    std::size_t nt_at(std::size_t sweep_index) const {
        return cfg.sweep == SweepKind::TrainingSize ? cfg.nt_grid.at(sweep_index) : cfg.nt_grid.front();
    }

    std::size_t points() const {
        return cfg.sweep == SweepKind::Snr ? cfg.snr_grid.size() : cfg.nt_grid.size();
    }

    double sweep_value(std::size_t sweep_index) const {
        return cfg.sweep == SweepKind::Snr ? cfg.snr_grid[sweep_index]
                                           : static_cast<double>(cfg.nt_grid[sweep_index]);
    }

    TrialRecord run(std::size_t sweep_index, std::uint64_t trial_index) const {
        TrueModel model{fixed_h ? *fixed_h : trial_H(cfg, trial_index),
                        Vector::Constant(static_cast<Eigen::Index>(cfg.nx), cfg.noise_mean), sigma2_at(sweep_index),
                        cfg.nonlinearity};
        TrialProblem problem{prior, std::move(model), nt_at(sweep_index)};
        return linest::run_trial(problem, columns, cfg.ridge, trial_seed(cfg, trial_index));
    }
};

void require_valid(const ExperimentConfig& cfg) {
    auto issues = validate(cfg);
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace

Seed trial_seed(const ExperimentConfig& cfg, std::uint64_t trial_index) {
    return Seed(cfg.seed).derive(trial_index);
}

Matrix trial_H(const ExperimentConfig& cfg, std::uint64_t trial_index) {
    if (cfg.h_mode == HMode::FixedOnce) return random_H(cfg.nx, cfg.ny, Seed(cfg.seed).derive(kFixedHStream));
    return random_H(cfg.nx, cfg.ny, trial_seed(cfg, trial_index).derive(0));
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t sweep_index, std::uint64_t trial_index) {
    require_valid(cfg);
    const SweepContext ctx(cfg);
    if (sweep_index >= ctx.points()) throw InvalidInput("run_trial: sweep index out of range");
    return ctx.run(sweep_index, trial_index);
}

const MseRow* MseReport::find(std::size_t sweep_index, Column c) const {
    const auto it = std::find(columns.begin(), columns.end(), c);
    if (it == columns.end()) return nullptr;
    const auto idx = sweep_index * columns.size() + static_cast<std::size_t>(it - columns.begin());
    return idx < rows.size() ? &rows[idx] : nullptr;
}

MseReport run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    require_valid(cfg);
    const SweepContext ctx(cfg);
    const std::size_t points = ctx.points();
    const std::size_t trials = cfg.mc_trials;
    const std::size_t work = points * trials;

    std::vector<TrialRecord> records(work);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t item = next.fetch_add(1, std::memory_order_relaxed);
            if (item >= work) return;
            try {
                records[item] = ctx.run(item / trials, item % trials);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(work);
                return;
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, work));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    // Merge in (grid point, trial index) order so the output is schedule independent.
    MseReport report{cfg, ctx.columns, {}};
    const auto oracle_it = std::find(ctx.columns.begin(), ctx.columns.end(), Column::OracleLMMSE);
    const bool has_oracle = oracle_it != ctx.columns.end();
    const auto oracle_idx = static_cast<std::size_t>(oracle_it - ctx.columns.begin());

    for (std::size_t p = 0; p < points; ++p) {
        for (std::size_t c = 0; c < ctx.columns.size(); ++c) {
            MseRow row;
            row.sweep_name = std::string(to_string(cfg.sweep));
            row.sweep_value = ctx.sweep_value(p);
            row.column = ctx.columns[c];

            std::vector<double> errors;
            std::vector<double> gaps;
            errors.reserve(trials);
            for (std::size_t t = 0; t < trials; ++t) {
                const auto& outcome = records[p * trials + t].outcomes[c];
                if (outcome.condition > kConditionWarning) ++row.condition_warnings;
                if (!outcome.squared_error) {
                    ++row.trials_failed;
                    if (row.first_failure.empty()) row.first_failure = outcome.failure;
                    continue;
                }
                ++row.trials_ok;
                errors.push_back(*outcome.squared_error);
                if (has_oracle && c != oracle_idx) {
                    const auto& oracle = records[p * trials + t].outcomes[oracle_idx];
                    if (oracle.squared_error) gaps.push_back(*outcome.squared_error - *oracle.squared_error);
                }
            }
            if (auto stat = compute_mse(errors)) {
                row.mean_mse = stat->mean;
                row.std_err = stat->std_err;
            }
            if (auto gap = compute_mse(gaps)) {
                row.gap_mean = gap->mean;
                row.gap_std_err = gap->std_err;
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

MseReport sweep_snr(ExperimentConfig cfg, unsigned threads) {
    if (cfg.nt_grid.size() != 1) throw InvalidInput("sweep_snr: nt_grid must hold exactly one entry");
    cfg.sweep = SweepKind::Snr;
    return run_experiment(cfg, threads);
}

MseReport sweep_nt(ExperimentConfig cfg, unsigned threads) {
    if (cfg.snr_grid.size() != 1) throw InvalidInput("sweep_nt: snr_grid must hold exactly one entry");
    cfg.sweep = SweepKind::TrainingSize;
    return run_experiment(cfg, threads);
}

}  // namespace linest
