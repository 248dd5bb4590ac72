#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tstlab {

// Thrown when a bound evaluator is asked for parameters outside the
// hypotheses of the inequality it implements. The message names the
// bound and the violated inequality.
class hypothesis_error : public std::runtime_error {
public:
    explicit hypothesis_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class TimeMode { discrete, brownian };

const char* to_string(TimeMode mode);
TimeMode time_mode_from_string(const std::string& s);

// Problem instance: hidden walk X_t = s*t + sum V_i, observed walk
// Y_t = X_t + eps * sum W_i, and the threshold level l for the crossing
// time of X. In brownian mode the walks are sampled on a grid of step dt.
struct WalkParams {
    double s = 1.0;          // drift per unit time, >= 0
    double eps = 1.0;        // observation noise scale, >= 0
    double l = 100.0;        // threshold level, >= 0
    TimeMode mode = TimeMode::discrete;
    double dt = 0.01;        // grid step, brownian mode only
    std::int64_t t_max = 0;  // horizon cap in steps; 0 = use default

    // Horizon cap such that censoring is negligible for s > 0: the
    // crossing time concentrates near l/s, so 50*(l/s) worth of time
    // is far beyond any realistic excursion.
    std::int64_t default_t_max() const;

    // Steps resolved against the default; always >= 1.
    std::int64_t horizon_steps() const;

    // Throws std::invalid_argument on out-of-domain fields.
    void validate() const;
};

// Tracking coefficient c for the estimate X^hat_t = s*t + c*(Y_t - s*t).
struct EstimatorConfig {
    double c = 1.0;

    void validate() const;
};

// Q(x) = P(N(0,1) > x), the upper tail of the standard Gaussian.
// Absolute error below 1e-12 everywhere (computed through erfc).
double gaussian_tail(double x);

// The coefficient minimizing the per-step variance of X - X^hat: 1/(1+eps^2).
double optimal_c(double eps);

// Per-step variance of X - X^hat^(c): (1-c)^2 + c^2 * eps^2.
double variance_factor(double c, double eps);

}  // namespace tstlab
