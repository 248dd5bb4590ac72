#include "tstlab/path_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace tstlab {

void PathSpec::validate() const {
    if (!std::isfinite(step_mean)) throw std::invalid_argument("PathSpec: step_mean must be finite");
    if (!std::isfinite(step_std) || step_std < 0.0) throw std::invalid_argument("PathSpec: step_std must be >= 0");
    if (!std::isfinite(level) || level < 0.0) throw std::invalid_argument("PathSpec: level must be >= 0");
}

double brownian_bridge_crossing_prob(double a, double b, double level, double dt, double sigma2) {
    if (!(dt > 0.0)) throw std::invalid_argument("brownian_bridge_crossing_prob: dt must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("brownian_bridge_crossing_prob: sigma2 must be > 0");
    if (a >= level || b >= level) return 1.0;
    return std::exp(-2.0 * (level - a) * (level - b) / (sigma2 * dt));
}

namespace {

// Within-step crossing refinement for one clock, shared by the brownian
// samplers. Tracks the running no-crossing probability of the bridge
// chain and fires at the first step where it drops below a single
// uniform drawn at trial start (sequential inverse transform; exact in
// law given the grid skeleton).
class BridgeDetector {
public:
    BridgeDetector(bool enabled, double sigma2, double dt, NoiseStream* uniforms)
        : enabled_(enabled && sigma2 > 0.0), sigma2_(sigma2), dt_(dt) {
        if (enabled_) u_ = uniforms->next_uniform();
    }

    // Both endpoints are below the level; returns true if a crossing is
    // declared inside this step.
    bool step(double prev, double cur, double level) {
        if (!enabled_) return false;
        const double p = std::exp(-2.0 * (level - prev) * (level - cur) / (sigma2_ * dt_));
        survival_ *= 1.0 - p;
        return survival_ < u_;
    }

private:
    bool enabled_;
    double sigma2_;
    double dt_;
    double u_ = 0.0;
    double survival_ = 1.0;
};

TrialOutcome sample_trial_discrete(const WalkParams& params, const EstimatorConfig& est,
                                   std::uint64_t master_seed, std::uint64_t trial_index) {
    TrialOutcome out;
    if (params.l <= 0.0) return out;  // X_0 = X^hat_0 = 0 >= l at t = 0

    const std::int64_t t_max = params.horizon_steps();
    const double c = est.c;
    const bool need_w = c > 0.0 && params.eps > 0.0;

    NoiseStream vs(master_seed, trial_index, StreamRole::V);
    NoiseStream ws(master_seed, trial_index, StreamRole::W);

    double sum_v = 0.0, sum_w = 0.0;
    bool have_tau = false, have_eta = false;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        sum_v += vs.next_normal();
        if (need_w) sum_w += ws.next_normal();
        const double drift = params.s * static_cast<double>(t);
        if (!have_tau) {
            const double x = drift + sum_v;
            if (x >= params.l) {
                out.tau = static_cast<double>(t);
                out.overshoot_x = x - params.l;
                have_tau = true;
            }
        }
        if (!have_eta) {
            const double xhat = drift + c * (sum_v + params.eps * sum_w);
            if (xhat >= params.l) {
                out.eta = static_cast<double>(t);
                out.overshoot_xhat = xhat - params.l;
                have_eta = true;
            }
        }
        if (have_tau && have_eta) return out;
    }
    if (!have_tau) {
        out.tau = static_cast<double>(t_max);
        out.censored_tau = true;
    }
    if (!have_eta) {
        out.eta = static_cast<double>(t_max);
        out.censored_eta = true;
    }
    return out;
}

TrialOutcome sample_trial_brownian(const WalkParams& params, const EstimatorConfig& est,
                                   std::uint64_t master_seed, std::uint64_t trial_index,
                                   bool bridge_correction) {
    TrialOutcome out;
    if (params.l <= 0.0) return out;

    const std::int64_t t_max = params.horizon_steps();
    const double c = est.c;
    const double dt = params.dt;
    const double sqrt_dt = std::sqrt(dt);
    const bool need_w = c > 0.0 && params.eps > 0.0;
    // With c = 1 and eps = 0 the estimate process is pathwise equal to X,
    // so a within-step crossing is one shared event, not two independent
    // Bernoulli draws.
    const bool identical_clocks = c == 1.0 && params.eps == 0.0;
    const double sigma2_xhat = c * c * (1.0 + params.eps * params.eps);

    NoiseStream vs(master_seed, trial_index, StreamRole::V);
    NoiseStream ws(master_seed, trial_index, StreamRole::W);
    NoiseStream bs(master_seed, trial_index, StreamRole::Bridge);
    BridgeDetector bridge_x(bridge_correction, 1.0, dt, &bs);
    BridgeDetector bridge_xhat(bridge_correction && !identical_clocks, sigma2_xhat, dt, &bs);

    double sum_b = 0.0, sum_n = 0.0;
    double x_prev = 0.0, xhat_prev = 0.0;
    bool have_tau = false, have_eta = false;
    for (std::int64_t k = 1; k <= t_max; ++k) {
        sum_b += sqrt_dt * vs.next_normal();
        if (need_w) sum_n += sqrt_dt * ws.next_normal();
        const double t = static_cast<double>(k) * dt;
        const double drift = params.s * t;
        const double x = drift + sum_b;
        const double xhat = drift + c * (sum_b + params.eps * sum_n);
        if (!have_tau) {
            if (x >= params.l || bridge_x.step(x_prev, x, params.l)) {
                out.tau = t;
                have_tau = true;
                if (identical_clocks && !have_eta) {
                    out.eta = t;
                    have_eta = true;
                }
            }
        }
        if (!have_eta && !identical_clocks) {
            if (xhat >= params.l || bridge_xhat.step(xhat_prev, xhat, params.l)) {
                out.eta = t;
                have_eta = true;
            }
        }
        if (have_tau && have_eta) return out;
        x_prev = x;
        xhat_prev = xhat;
    }
    if (!have_tau) {
        out.tau = static_cast<double>(t_max) * dt;
        out.censored_tau = true;
    }
    if (!have_eta) {
        out.eta = static_cast<double>(t_max) * dt;
        out.censored_eta = true;
    }
    return out;
}

}  // namespace

TrialOutcome sample_trial(const WalkParams& params, const EstimatorConfig& est,
                          std::uint64_t master_seed, std::uint64_t trial_index,
                          bool bridge_correction) {
    params.validate();
    est.validate();
    if (params.mode == TimeMode::discrete)
        return sample_trial_discrete(params, est, master_seed, trial_index);
    return sample_trial_brownian(params, est, master_seed, trial_index, bridge_correction);
}

PassageResult first_passage(const PathSpec& spec, std::uint64_t master_seed,
                            std::uint64_t trial_index, std::int64_t t_max) {
    spec.validate();
    if (t_max < 1) throw std::invalid_argument("first_passage: t_max must be >= 1");

    PassageResult out;
    if (spec.level <= 0.0) return out;  // S_0 = 0 >= level at t = 0

    NoiseStream vs(master_seed, trial_index, StreamRole::V);
    double s = 0.0;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        s += spec.step_mean;
        if (spec.step_std > 0.0) s += spec.step_std * vs.next_normal();
        if (s >= spec.level) {
            out.time = static_cast<double>(t);
            out.overshoot = s - spec.level;
            return out;
        }
    }
    out.time = static_cast<double>(t_max);
    out.censored = true;
    return out;
}

PassageResult first_passage_brownian(double drift, double level, double dt,
                                     std::int64_t max_steps, bool bridge_correction,
                                     std::uint64_t master_seed, std::uint64_t trial_index) {
    if (!(dt > 0.0)) throw std::invalid_argument("first_passage_brownian: dt must be > 0");
    if (max_steps < 1) throw std::invalid_argument("first_passage_brownian: max_steps must be >= 1");
    if (!std::isfinite(level) || level < 0.0)
        throw std::invalid_argument("first_passage_brownian: level must be >= 0");

    PassageResult out;
    if (level <= 0.0) return out;

    NoiseStream vs(master_seed, trial_index, StreamRole::V);
    NoiseStream bs(master_seed, trial_index, StreamRole::Bridge);
    BridgeDetector bridge(bridge_correction, 1.0, dt, &bs);

    const double sqrt_dt = std::sqrt(dt);
    double bm = 0.0, x_prev = 0.0;
    for (std::int64_t k = 1; k <= max_steps; ++k) {
        bm += sqrt_dt * vs.next_normal();
        const double t = static_cast<double>(k) * dt;
        const double x = drift * t + bm;
        if (x >= level || bridge.step(x_prev, x, level)) {
            out.time = t;
            return out;
        }
        x_prev = x;
    }
    out.time = static_cast<double>(max_steps) * dt;
    out.censored = true;
    return out;
}

}  // namespace tstlab
