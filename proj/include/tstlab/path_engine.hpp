#pragma once

#include <cstdint>

#include "tstlab/core_model.hpp"
#include "tstlab/rng.hpp"

namespace tstlab {

// One paired simulation of the hidden crossing time tau (of X over l)
// and the tracking time eta (of X^hat^(c) over l) on a shared noise
// realization. Times are step counts in discrete mode and grid times in
// brownian mode. Overshoots are meaningful in discrete mode only; a
// Brownian path sits exactly on the level when it first reaches it.
struct TrialOutcome {
    double tau = 0.0;
    double eta = 0.0;
    double overshoot_x = 0.0;
    double overshoot_xhat = 0.0;
    bool censored_tau = false;
    bool censored_eta = false;

    double abs_dev() const { return tau >= eta ? tau - eta : eta - tau; }
};

// A generic one-dimensional Gaussian walk S_t = sum Z_i with
// Z_i ~ N(step_mean, step_std^2), crossed at `level`.
struct PathSpec {
    double step_mean = 0.0;
    double step_std = 1.0;
    double level = 0.0;

    void validate() const;
};

struct PassageResult {
    double time = 0.0;
    double overshoot = 0.0;
    bool censored = false;
};

// Probability that a Brownian bridge with diffusion variance rate sigma2,
// pinned at a and b over a step of length dt, crosses `level` inside the
// step: exp(-2 (level-a)(level-b) / (sigma2 dt)). Returns 1 if either
// endpoint is already at or above the level.
double brownian_bridge_crossing_prob(double a, double b, double level, double dt, double sigma2);

// Simulates X and X^hat^(c) on one shared (V, W) noise realization and
// stops each clock at its own first passage over params.l, or censors it
// at the horizon. Pure in (master_seed, trial_index): trials are safe to
// run concurrently in any order.
//
// In brownian mode, first passage is declared at the first grid point
// at-or-above l; with `bridge_correction` on, each below-level step is
// additionally tested for a within-step crossing (sequential inverse
// transform against one Bridge-stream uniform per clock). The two
// clocks' corrections are drawn independently, which ignores the
// within-step correlation of X and X^hat; keep dt small enough that
// correction events are rare.
TrialOutcome sample_trial(const WalkParams& params, const EstimatorConfig& est,
                          std::uint64_t master_seed, std::uint64_t trial_index,
                          bool bridge_correction = true);

// First passage of the generic walk over spec.level within t_max steps.
PassageResult first_passage(const PathSpec& spec, std::uint64_t master_seed,
                            std::uint64_t trial_index, std::int64_t t_max);

// First passage of a drifted Brownian motion (unit diffusion) over
// `level` on a uniform grid of step dt, capped at max_steps. Overshoot
// is identically 0.
PassageResult first_passage_brownian(double drift, double level, double dt,
                                     std::int64_t max_steps, bool bridge_correction,
                                     std::uint64_t master_seed, std::uint64_t trial_index);

}  // namespace tstlab
