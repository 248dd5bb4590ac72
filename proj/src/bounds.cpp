#include "tstlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tstlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* bound_name, const std::string& inequality) {
    if (!ok) throw hypothesis_error(std::string(bound_name) + ": requires " + inequality);
}

void check_upper_hypotheses(const WalkParams& p, const char* name) {
    require(p.eps > 0.0, name, "eps > 0");
    require(p.s > 0.0, name, "s > 0");
    require(p.l > 0.0, name, "l > 0");
}

// Largest admissible n: the greatest integer strictly below l/s.
std::int64_t max_lower_n(const WalkParams& p) {
    return static_cast<std::int64_t>(std::ceil(p.l / p.s)) - 1;
}

void check_lower_n(const WalkParams& p, std::int64_t n) {
    const std::int64_t n_max = max_lower_n(p);
    if (n < 1 || n > n_max || static_cast<double>(n) * p.s >= p.l)
        throw std::invalid_argument("lower bound: n must satisfy 1 <= n < l/s (n = " +
                                    std::to_string(n) + ", max " + std::to_string(n_max) + ")");
}

double lower_bound_core(const WalkParams& p, std::int64_t n, LowerBoundVariant variant) {
    const double eps2 = p.eps * p.eps;
    const double nn = static_cast<double>(n);
    const double deficit = p.l - p.s * nn;
    const double tail_var = (variant == LowerBoundVariant::printed) ? nn * (1.0 + p.eps)
                                                                    : nn * (1.0 + eps2);
    const double q = gaussian_tail(deficit / std::sqrt(tail_var));
    const double first = std::sqrt(2.0 * nn * eps2 / (kPi * p.s * p.s * (1.0 + eps2))) * (1.0 - q);
    const double second =
        std::sqrt(2.0 / (kPi * p.s * p.s * p.s)) * std::sqrt(deficit + std::sqrt(nn / (2.0 * kPi)));
    return first - second;
}

// Adaptive Simpson on [a, b] with absolute tolerance tol.
double simpson(double (*f)(double, double, double), double m, double sd, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a, m, sd) + 4.0 * f(c, m, sd) + f(b, m, sd));
}

double integrand(double u, double mean, double r) {
    // |mean + u|^r phi(u); caller integrates over the standard normal u.
    const double z = std::fabs(mean + u);
    const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
    return std::pow(z, r) * phi;
}

double adaptive(double (*f)(double, double, double), double m, double r, double a, double b,
                double whole, double tol, int depth) {
    const double c = 0.5 * (a + b);
    const double left = simpson(f, m, r, a, c);
    const double right = simpson(f, m, r, c, b);
    const double delta = left + right - whole;
    // Never accept a panel wider than one standard unit: on long flat
    // stretches the sparse probes can miss all of the integrand's mass
    // and the error estimate would stop the recursion at ~0.
    if (depth <= 0 || (b - a <= 1.0 && std::fabs(delta) <= 15.0 * tol))
        return left + right + delta / 15.0;
    return adaptive(f, m, r, a, c, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, r, c, b, right, 0.5 * tol, depth - 1);
}

double integrate_abs_moment(double mean, double r, double a, double b, double tol) {
    if (b <= a) return 0.0;
    return adaptive(integrand, mean, r, a, b, simpson(integrand, mean, r, a, b), tol, 48);
}

}  // namespace

const char* to_string(LowerBoundVariant v) {
    return v == LowerBoundVariant::printed ? "printed" : "variance";
}

LowerBoundVariant lower_bound_variant_from_string(const std::string& s) {
    if (s == "printed") return LowerBoundVariant::printed;
    if (s == "variance") return LowerBoundVariant::variance;
    throw std::invalid_argument("unknown lower bound variant '" + s + "' (expected printed|variance)");
}

double main_term(const WalkParams& params) {
    require(params.s > 0.0, "main term", "s > 0");
    require(params.l >= 0.0, "main term", "l >= 0");
    const double eps2 = params.eps * params.eps;
    return std::sqrt(2.0 * params.l * eps2 /
                     (kPi * (1.0 + eps2) * params.s * params.s * params.s));
}

double upper_bound_discrete(const WalkParams& params) {
    check_upper_hypotheses(params, "discrete upper bound");
    const double s = params.s, l = params.l;
    const double first = main_term(params);
    const double second = 6.0 / s * std::pow(l / std::pow(2.0 * kPi * s, 3.0), 0.25);
    const double third = std::sqrt(8.0 * (s + 2.0) / (kPi * s * s * s));
    return first + second + third + 10.0 + 20.0 / s;
}

double upper_bound_brownian(const WalkParams& params) {
    check_upper_hypotheses(params, "brownian upper bound");
    const double s = params.s, l = params.l;
    return main_term(params) + 6.0 / s * std::pow(l / std::pow(2.0 * kPi * s, 3.0), 0.25);
}

double lower_bound_discrete(const WalkParams& params, std::int64_t n, LowerBoundVariant variant) {
    require(params.eps > 0.0, "discrete lower bound", "eps > 0");
    require(params.s > 0.0, "discrete lower bound", "s > 0");
    require(params.l / params.s >= 2.0, "discrete lower bound", "l/s >= 2");
    check_lower_n(params, n);
    return lower_bound_core(params, n, variant) - 2.0 - 4.0 / params.s;
}

double lower_bound_brownian(const WalkParams& params, std::int64_t n, LowerBoundVariant variant) {
    require(params.eps > 0.0, "brownian lower bound", "eps > 0");
    require(params.s > 0.0, "brownian lower bound", "s > 0");
    require(params.l > 0.0, "brownian lower bound", "l > 0");
    check_lower_n(params, n);
    return lower_bound_core(params, n, variant);
}

BestN best_n(const WalkParams& params, LowerBoundVariant variant) {
    const bool brownian = params.mode == TimeMode::brownian;
    if (brownian) {
        require(params.eps > 0.0, "brownian lower bound", "eps > 0");
        require(params.s > 0.0, "brownian lower bound", "s > 0");
        require(params.l > 0.0, "brownian lower bound", "l > 0");
        require(params.l / params.s > 1.0, "brownian lower bound", "l/s > 1 (some integer n with 1 <= n < l/s)");
    } else {
        require(params.eps > 0.0, "discrete lower bound", "eps > 0");
        require(params.s > 0.0, "discrete lower bound", "s > 0");
        require(params.l / params.s >= 2.0, "discrete lower bound", "l/s >= 2");
    }
    const std::int64_t n_max = max_lower_n(params);

    BestN best{0, -std::numeric_limits<double>::infinity()};
    for (std::int64_t n = 1; n <= n_max; ++n) {
        // Same rounding sequence as lower_bound_discrete/_brownian so the
        // reported value is bit-identical to a direct evaluation at best.n.
        double v = lower_bound_core(params, n, variant);
        if (!brownian) v = v - 2.0 - 4.0 / params.s;
        if (v > best.value) best = {n, v};
    }
    return best;
}

RegimeCheck regime_check(const WalkParams& params, double q) {
    require(params.s > 0.0, "asymptotic regime", "s > 0");
    if (!(q > 0.5 && q < 1.0)) throw std::invalid_argument("regime_check: q must be in (1/2, 1)");
    const double ratio = params.l / params.s;
    const double eps2 = params.eps * params.eps;
    RegimeCheck out;
    out.drift_scale = params.s * std::pow(ratio, q - 0.5);
    out.noise_scale = std::pow(ratio, 1.0 - q) * eps2 / (1.0 + eps2);
    out.ratio_ok = ratio >= 2.0;
    return out;
}

double gaussian_abs_moment(double mean, double std_dev, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("gaussian_abs_moment: r must be > 0");
    if (!(std_dev >= 0.0)) throw std::invalid_argument("gaussian_abs_moment: std_dev must be >= 0");
    if (std_dev == 0.0) return std::pow(std::fabs(mean), r);

    // Standardize; the integrand has a kink at u0 where mean + u = 0
    // (after scaling), so split there to keep Simpson honest.
    const double m = mean / std_dev;
    const double lo = -40.0, hi = 40.0;
    const double kink = -m;
    const double tol = 1e-14 * (1.0 + std::pow(std::fabs(m) + 4.0, r));
    double total = 0.0;
    if (kink > lo && kink < hi) {
        total = integrate_abs_moment(m, r, lo, kink, tol) + integrate_abs_moment(m, r, kink, hi, tol);
    } else {
        total = integrate_abs_moment(m, r, lo, hi, tol);
    }
    return std::pow(std_dev, r) * total;
}

double overshoot_moment_bound(double step_mean, double step_std, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("overshoot_moment_bound: p must be > 0");
    if (!(step_mean >= 0.0)) throw std::invalid_argument("overshoot_moment_bound: step_mean must be >= 0");
    if (!(step_std >= 0.0)) throw std::invalid_argument("overshoot_moment_bound: step_std must be >= 0");
    const double s2 = step_mean * step_mean + step_std * step_std;
    if (s2 == 0.0) throw std::invalid_argument("overshoot_moment_bound: degenerate step (s = sigma = 0)");

    if (p == 2.0) {
        const double s = step_mean, sig2 = step_std * step_std;
        return 8.0 / 3.0 * (s * s + 5.0 * sig2 - 2.0 * sig2 * sig2 / s2);
    }
    return 2.0 * (p + 2.0) / (p + 1.0) * gaussian_abs_moment(step_mean, step_std, p + 2.0) / s2;
}

double overshoot_mean_bound(double step_mean, double step_std) {
    if (!(step_mean >= 0.0) || !(step_std >= 0.0))
        throw std::invalid_argument("overshoot_mean_bound: step_mean, step_std must be >= 0");
    return 2.0 * step_mean + 4.0 * step_std;
}

WaldBracket wald_bracket(double step_mean, double step_std, double level) {
    require(step_mean > 0.0, "passage-time bracket", "s > 0");
    if (!(step_std >= 0.0) || !(level >= 0.0))
        throw std::invalid_argument("wald_bracket: step_std, level must be >= 0");
    return {level / step_mean, (level + overshoot_mean_bound(step_mean, step_std)) / step_mean};
}

FluctuationBounds crossing_fluctuation_bounds(double level, double drift) {
    require(level > 0.0, "crossing fluctuation bounds", "l > 0");
    require(drift > 0.0, "crossing fluctuation bounds", "s > 0");
    const double radical = std::sqrt(level / (2.0 * kPi * drift));
    FluctuationBounds out;
    out.pos_dev = radical + drift + 2.0;
    out.abs_dev = 2.0 * radical + 2.0 * drift + 4.0;
    out.martingale_pos = radical + 3.0 * drift + 6.0;
    return out;
}

BoundReport make_bound_report(const WalkParams& params, LowerBoundVariant variant) {
    params.validate();
    BoundReport r;
    r.mode = params.mode;
    r.upper = r.lower = r.main_term = kNaN;

    const bool brownian = params.mode == TimeMode::brownian;
    try {
        r.upper = brownian ? upper_bound_brownian(params) : upper_bound_discrete(params);
        r.upper_ok = true;
    } catch (const hypothesis_error& e) {
        r.violation = e.what();
    }
    try {
        const BestN b = best_n(params, variant);
        r.lower = b.value;
        r.lower_best_n = b.n;
        r.lower_ok = true;
    } catch (const hypothesis_error& e) {
        if (r.violation.empty()) r.violation = e.what();
    }
    if (params.s > 0.0) r.main_term = main_term(params);
    return r;
}

}  // namespace tstlab
