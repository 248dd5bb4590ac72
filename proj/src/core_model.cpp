#include "tstlab/core_model.hpp"

#include <cmath>
#include <limits>

namespace tstlab {

const char* to_string(TimeMode mode) {
    return mode == TimeMode::discrete ? "discrete" : "brownian";
}

TimeMode time_mode_from_string(const std::string& s) {
    if (s == "discrete") return TimeMode::discrete;
    if (s == "brownian") return TimeMode::brownian;
    throw std::invalid_argument("unknown time mode '" + s + "' (expected discrete|brownian)");
}

std::int64_t WalkParams::default_t_max() const {
    if (s <= 0.0) {
        // No drift: crossing times are heavy tailed and the caller must
        // choose the horizon explicitly; provide a generous fallback.
        return 1'000'000;
    }
    const double horizon_time = 50.0 * l / s;
    double steps = (mode == TimeMode::brownian) ? horizon_time / dt : horizon_time;
    if (steps < 1000.0) steps = 1000.0;
    return static_cast<std::int64_t>(std::ceil(steps));
}

std::int64_t WalkParams::horizon_steps() const {
    const std::int64_t n = (t_max > 0) ? t_max : default_t_max();
    return n >= 1 ? n : 1;
}

void WalkParams::validate() const {
    if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("WalkParams: s must be finite and >= 0");
    if (!std::isfinite(eps) || eps < 0.0) throw std::invalid_argument("WalkParams: eps must be finite and >= 0");
    if (!std::isfinite(l) || l < 0.0) throw std::invalid_argument("WalkParams: l must be finite and >= 0");
    if (mode == TimeMode::brownian && (!std::isfinite(dt) || dt <= 0.0))
        throw std::invalid_argument("WalkParams: dt must be > 0 in brownian mode");
    if (t_max < 0) throw std::invalid_argument("WalkParams: t_max must be >= 1 (or 0 for default)");
}

void EstimatorConfig::validate() const {
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("EstimatorConfig: c must be finite and >= 0");
}

double gaussian_tail(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("gaussian_tail: non-finite input");
    // Q(x) = erfc(x / sqrt(2)) / 2; erfc keeps full relative accuracy in
    // the right tail where Q underflows a naive 1 - Phi(x).
    return 0.5 * std::erfc(x * M_SQRT1_2);
}

double optimal_c(double eps) {
    if (!std::isfinite(eps) || eps < 0.0) throw std::invalid_argument("optimal_c: eps must be finite and >= 0");
    return 1.0 / (1.0 + eps * eps);
}

double variance_factor(double c, double eps) {
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("variance_factor: c must be finite and >= 0");
    if (!std::isfinite(eps) || eps < 0.0) throw std::invalid_argument("variance_factor: eps must be finite and >= 0");
    const double a = 1.0 - c;
    return a * a + c * c * eps * eps;
}

}  // namespace tstlab
