#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstlab/bounds.hpp"
#include "tstlab/core_model.hpp"
#include "tstlab/path_engine.hpp"

namespace tstlab {

// 99% two-sided normal quantile; every confidence interval here uses it.
constexpr double kZ99 = 2.5758293035489004;

enum class Verdict { inside_bracket, below_lower, above_upper, invalid_censoring };

const char* to_string(Verdict v);

struct RunOptions {
    int threads = 0;                 // 0 = hardware concurrency
    bool bridge_correction = true;   // brownian mode only
    LowerBoundVariant lower_bound_variant = LowerBoundVariant::printed;
};

// Aggregates of one experiment: empirical deviation moments over the
// uncensored trials, their standard errors, the closed-form bracket and
// the verdict of the comparison. A bound whose hypotheses fail acts as
// an infinite endpoint for the verdict; its ok-flag says so.
struct ExperimentSummary {
    std::int64_t n_trials = 0;
    std::int64_t n_censored = 0;
    double mean_abs_dev = 0.0;   // E|eta - tau|
    double se_abs_dev = 0.0;
    double ci_halfwidth_abs_dev = 0.0;  // kZ99 * se_abs_dev
    double mean_pos_dev = 0.0;   // E(eta - tau)_+
    double se_pos_dev = 0.0;
    double mean_dev = 0.0;       // E(eta - tau)
    double prob_eta_early = 0.0; // P(eta < tau)
    double mean_overshoot = 0.0;     // X overshoot at tau, discrete mode
    double mean_sq_overshoot = 0.0;
    double mean_tau = 0.0;
    double se_tau = 0.0;
    BoundReport bound_report;
    Verdict verdict = Verdict::inside_bracket;
};

// Runs sample_trial over trial indices 0..n_trials-1 and aggregates.
// Bit-identical output for identical (params, est, n_trials,
// master_seed) regardless of options.threads.
ExperimentSummary run_experiment(const WalkParams& params, const EstimatorConfig& est,
                                 std::int64_t n_trials, std::uint64_t master_seed,
                                 const RunOptions& options = {});

// Same run, returning the per-trial outcomes in trial-index order
// together with the summary (the CLI per-trial CSV consumes this).
ExperimentSummary run_experiment_collect(const WalkParams& params, const EstimatorConfig& est,
                                         std::int64_t n_trials, std::uint64_t master_seed,
                                         const RunOptions& options,
                                         std::vector<TrialOutcome>* outcomes);

struct SweepPoint {
    double l = 0.0;
    double s = 0.0;
    double eps = 0.0;
    double c = 0.0;
    bool c_auto = false;  // resolve c = 1/(1+eps^2) per row
};

struct SweepRow {
    SweepPoint point;
    double resolved_c = 0.0;
    std::uint64_t row_seed = 0;
    bool failed = false;
    std::string error;
    ExperimentSummary summary;
    double ratio_to_main_term = 0.0;  // mean_abs_dev / main_term
};

// One experiment per grid point. Row seeds derive from
// (master_seed, row_index), so appending rows never shifts earlier ones.
// Per-row failures are recorded in the row and the sweep continues.
std::vector<SweepRow> sweep(const std::vector<SweepPoint>& grid, const WalkParams& shared,
                            std::int64_t n_trials, std::uint64_t master_seed,
                            const RunOptions& options = {});

struct TailCheckOptions {
    double dt0 = 0.01;      // first grid step near 0
    double growth = 1.02;   // geometric step coarsening
    std::vector<double> trunc_horizons = {1.0, 10.0, 100.0};
    int threads = 0;
};

// Survival-law check for driftless first passage over level h.
struct TailCheckResult {
    double h = 0.0;
    std::vector<double> checkpoints;
    std::vector<double> survival;          // fraction with tau > t_j
    std::vector<std::int64_t> survivors;
    double slope = 0.0;                    // log-log fit over the last decade
    double slope_stderr = 0.0;
    bool low_tail_counts = false;          // < 100 survivors at the last checkpoint
    std::vector<double> trunc_horizons;
    std::vector<double> trunc_sqrt_means;  // (1/n) sum sqrt(tau) over tau <= T
};

// Simulates n_trials driftless Brownian passages over h on a grid that
// starts at dt0 and coarsens geometrically while landing exactly on
// every checkpoint, with within-step bridge refinement so the recorded
// crossing-by-checkpoint events are exact in law. Fits the log survival
// slope over the last decade of checkpoints (>= 5 points required).
// When fewer than 100 trials survive the last checkpoint the
// low_tail_counts flag is set and the reported stderr is doubled.
TailCheckResult tail_exponent_estimate(double h, std::int64_t n_trials,
                                       const std::vector<double>& checkpoints,
                                       std::uint64_t master_seed,
                                       const TailCheckOptions& options = {});

// Log-spaced default checkpoint grid: points_per_decade points per
// decade from 1 up to t_max inclusive.
std::vector<double> default_tail_checkpoints(double t_max, int points_per_decade = 4);

// Empirical overshoot and passage-time moments of the generic walk,
// with the closed-form bounds they are checked against. Verdict flags
// allow a 3-standard-error margin on each comparison.
struct OvershootSummary {
    std::int64_t n_trials = 0;
    std::int64_t n_censored = 0;
    double mean_overshoot = 0.0;
    double se_overshoot = 0.0;
    double mean_sq_overshoot = 0.0;
    double se_sq_overshoot = 0.0;
    double mean_time = 0.0;
    double se_time = 0.0;
    double mean_abs_fluct = 0.0;      // E|s tau - l|
    double se_abs_fluct = 0.0;
    double mean_pos_fluct = 0.0;      // E(s tau - l)_+
    double se_pos_fluct = 0.0;
    double mean_martingale_pos = 0.0; // E(X_tau - s tau)_+
    double se_martingale_pos = 0.0;
    double mean_overshoot_bound = 0.0;
    double sq_overshoot_bound = 0.0;
    WaldBracket wald;
    FluctuationBounds fluct_bounds;
    bool mean_overshoot_ok = false;
    bool sq_overshoot_ok = false;
    bool wald_ok = false;
    bool abs_fluct_ok = false;
    bool pos_fluct_ok = false;
    bool martingale_pos_ok = false;
};

OvershootSummary summarize_overshoot(const PathSpec& spec, std::int64_t n_trials,
                                     std::uint64_t master_seed, std::int64_t t_max = 0,
                                     int threads = 0);

}  // namespace tstlab
