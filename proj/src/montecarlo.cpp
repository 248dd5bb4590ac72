#include "tstlab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace tstlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n) with the given worker count. Each index is
// processed exactly once and writes only its own output slot, so the
// result is independent of scheduling.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    constexpr std::int64_t kChunk = 64;
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t begin = next.fetch_add(kChunk);
            if (begin >= n) return;
            const std::int64_t end = std::min(begin + kChunk, n);
            for (std::int64_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

struct MeanSe {
    double mean = kNaN;
    double se = kNaN;
};

// Mean and standard error from sequentially accumulated sums.
MeanSe mean_se(double sum, double sum_sq, std::int64_t m) {
    if (m <= 0) return {};
    const double mean = sum / static_cast<double>(m);
    if (m == 1) return {mean, 0.0};
    double var = (sum_sq - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1);
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / static_cast<double>(m))};
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::inside_bracket: return "inside_bracket";
        case Verdict::below_lower: return "below_lower";
        case Verdict::above_upper: return "above_upper";
        case Verdict::invalid_censoring: return "invalid_censoring";
    }
    return "unknown";
}

ExperimentSummary run_experiment_collect(const WalkParams& params, const EstimatorConfig& est,
                                         std::int64_t n_trials, std::uint64_t master_seed,
                                         const RunOptions& options,
                                         std::vector<TrialOutcome>* outcomes) {
    params.validate();
    est.validate();
    if (n_trials < 100) throw std::invalid_argument("run_experiment: n_trials must be >= 100");

    std::vector<TrialOutcome> local;
    std::vector<TrialOutcome>& out = outcomes ? *outcomes : local;
    out.assign(static_cast<std::size_t>(n_trials), TrialOutcome{});
    parallel_for(n_trials, options.threads, [&](std::int64_t i) {
        out[static_cast<std::size_t>(i)] = sample_trial(params, est, master_seed,
                                                        static_cast<std::uint64_t>(i),
                                                        options.bridge_correction);
    });

    ExperimentSummary s;
    s.n_trials = n_trials;
    double sum_abs = 0.0, sum_abs_sq = 0.0;
    double sum_pos = 0.0, sum_pos_sq = 0.0;
    double sum_dev = 0.0;
    double sum_r = 0.0, sum_r2 = 0.0;
    double sum_tau = 0.0, sum_tau_sq = 0.0;
    std::int64_t early = 0, m = 0;
    for (const TrialOutcome& o : out) {
        if (o.censored_tau || o.censored_eta) {
            ++s.n_censored;
            continue;
        }
        ++m;
        const double dev = o.eta - o.tau;
        const double ad = std::fabs(dev);
        sum_abs += ad;
        sum_abs_sq += ad * ad;
        const double pos = dev > 0.0 ? dev : 0.0;
        sum_pos += pos;
        sum_pos_sq += pos * pos;
        sum_dev += dev;
        if (o.eta < o.tau) ++early;
        sum_r += o.overshoot_x;
        sum_r2 += o.overshoot_x * o.overshoot_x;
        sum_tau += o.tau;
        sum_tau_sq += o.tau * o.tau;
    }

    const MeanSe abs = mean_se(sum_abs, sum_abs_sq, m);
    const MeanSe pos = mean_se(sum_pos, sum_pos_sq, m);
    const MeanSe tau = mean_se(sum_tau, sum_tau_sq, m);
    s.mean_abs_dev = abs.mean;
    s.se_abs_dev = abs.se;
    s.ci_halfwidth_abs_dev = kZ99 * abs.se;
    s.mean_pos_dev = pos.mean;
    s.se_pos_dev = pos.se;
    s.mean_dev = m > 0 ? sum_dev / static_cast<double>(m) : kNaN;
    s.prob_eta_early = m > 0 ? static_cast<double>(early) / static_cast<double>(m) : kNaN;
    s.mean_overshoot = m > 0 ? sum_r / static_cast<double>(m) : kNaN;
    s.mean_sq_overshoot = m > 0 ? sum_r2 / static_cast<double>(m) : kNaN;
    s.mean_tau = tau.mean;
    s.se_tau = tau.se;
    s.bound_report = make_bound_report(params, options.lower_bound_variant);

    if (static_cast<double>(s.n_censored) > 0.001 * static_cast<double>(n_trials)) {
        s.verdict = Verdict::invalid_censoring;
    } else {
        const double lower = s.bound_report.lower_ok ? s.bound_report.lower : -kInf;
        const double upper = s.bound_report.upper_ok ? s.bound_report.upper : kInf;
        if (s.mean_abs_dev - s.ci_halfwidth_abs_dev < lower)
            s.verdict = Verdict::below_lower;
        else if (s.mean_abs_dev + s.ci_halfwidth_abs_dev > upper)
            s.verdict = Verdict::above_upper;
        else
            s.verdict = Verdict::inside_bracket;
    }
    return s;
}

ExperimentSummary run_experiment(const WalkParams& params, const EstimatorConfig& est,
                                 std::int64_t n_trials, std::uint64_t master_seed,
                                 const RunOptions& options) {
    return run_experiment_collect(params, est, n_trials, master_seed, options, nullptr);
}

std::vector<SweepRow> sweep(const std::vector<SweepPoint>& grid, const WalkParams& shared,
                            std::int64_t n_trials, std::uint64_t master_seed,
                            const RunOptions& options) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepRow row;
        row.point = grid[i];
        row.row_seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
        try {
            WalkParams p = shared;
            p.l = grid[i].l;
            p.s = grid[i].s;
            p.eps = grid[i].eps;
            row.resolved_c = grid[i].c_auto ? optimal_c(grid[i].eps) : grid[i].c;
            row.summary = run_experiment(p, EstimatorConfig{row.resolved_c}, n_trials,
                                         row.row_seed, options);
            row.ratio_to_main_term = row.summary.mean_abs_dev / row.summary.bound_report.main_term;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> default_tail_checkpoints(double t_max, int points_per_decade) {
    if (!(t_max > 1.0)) throw std::invalid_argument("default_tail_checkpoints: t_max must be > 1");
    if (points_per_decade < 1) throw std::invalid_argument("default_tail_checkpoints: points_per_decade must be >= 1");
    std::vector<double> cp;
    for (int k = 0;; ++k) {
        const double t = std::pow(10.0, static_cast<double>(k) / points_per_decade);
        if (t >= t_max * (1.0 - 1e-12)) break;
        cp.push_back(t);
    }
    cp.push_back(t_max);
    return cp;
}

TailCheckResult tail_exponent_estimate(double h, std::int64_t n_trials,
                                       const std::vector<double>& checkpoints,
                                       std::uint64_t master_seed,
                                       const TailCheckOptions& options) {
    if (!(h > 0.0)) throw std::invalid_argument("tail_exponent_estimate: h must be > 0");
    if (n_trials < 100) throw std::invalid_argument("tail_exponent_estimate: n_trials must be >= 100");
    if (checkpoints.size() < 2) throw std::invalid_argument("tail_exponent_estimate: need >= 2 checkpoints");
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        if (!(checkpoints[j] > 0.0) || (j > 0 && checkpoints[j] <= checkpoints[j - 1]))
            throw std::invalid_argument("tail_exponent_estimate: checkpoints must be positive and increasing");
    }
    if (!(options.dt0 > 0.0) || !(options.growth >= 1.0))
        throw std::invalid_argument("tail_exponent_estimate: dt0 > 0 and growth >= 1 required");

    const double t_last = checkpoints.back();
    const double window_lo = t_last / 10.0 * (1.0 - 1e-12);
    std::size_t window_begin = checkpoints.size();
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        if (checkpoints[j] >= window_lo) {
            window_begin = j;
            break;
        }
    }
    if (checkpoints.size() - window_begin < 5)
        throw std::invalid_argument(
            "tail_exponent_estimate: the last decade of checkpoints must contain >= 5 points");

    // One shared grid: geometric coarsening, landing exactly on each
    // checkpoint so survival counts at checkpoints compare exact doubles.
    std::vector<double> grid;
    {
        double t = 0.0, dt = options.dt0;
        std::size_t cp = 0;
        while (cp < checkpoints.size()) {
            double t_next;
            if (dt >= checkpoints[cp] - t) {
                t_next = checkpoints[cp];
                ++cp;
            } else {
                t_next = t + dt;
            }
            grid.push_back(t_next);
            t = t_next;
            dt *= options.growth;
        }
    }

    std::vector<double> tau(static_cast<std::size_t>(n_trials), kInf);
    parallel_for(n_trials, options.threads, [&](std::int64_t i) {
        NoiseStream vs(master_seed, static_cast<std::uint64_t>(i), StreamRole::V);
        NoiseStream bs(master_seed, static_cast<std::uint64_t>(i), StreamRole::Bridge);
        const double u = bs.next_uniform();
        double survival = 1.0;
        double x = 0.0, x_prev = 0.0, t_prev = 0.0;
        for (const double t : grid) {
            const double dt = t - t_prev;
            x += std::sqrt(dt) * vs.next_normal();
            if (x >= h) {
                tau[static_cast<std::size_t>(i)] = t;
                return;
            }
            survival *= 1.0 - std::exp(-2.0 * (h - x_prev) * (h - x) / dt);
            if (survival < u) {
                tau[static_cast<std::size_t>(i)] = t;
                return;
            }
            x_prev = x;
            t_prev = t;
        }
    });

    TailCheckResult r;
    r.h = h;
    r.checkpoints = checkpoints;
    r.survival.resize(checkpoints.size());
    r.survivors.resize(checkpoints.size());
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        std::int64_t count = 0;
        for (const double t : tau)
            if (t > checkpoints[j]) ++count;
        r.survivors[j] = count;
        r.survival[j] = static_cast<double>(count) / static_cast<double>(n_trials);
    }

    // Log-log least squares over the last decade.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::vector<double> xs, ys;
    for (std::size_t j = window_begin; j < checkpoints.size(); ++j) {
        if (r.survivors[j] <= 0) continue;
        const double x = std::log(checkpoints[j]);
        const double y = std::log(r.survival[j]);
        xs.push_back(x);
        ys.push_back(y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const std::size_t m = xs.size();
    if (m < 5)
        throw std::runtime_error("tail_exponent_estimate: fewer than 5 nonzero survival points in the fit window");
    const double mm = static_cast<double>(m);
    const double det = mm * sxx - sx * sx;
    r.slope = (mm * sxy - sx * sy) / det;
    const double intercept = (sy - r.slope * sx) / mm;
    double ssr = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double resid = ys[j] - (intercept + r.slope * xs[j]);
        ssr += resid * resid;
    }
    const double sxx_centered = sxx - sx * sx / mm;
    r.slope_stderr = std::sqrt(ssr / (mm - 2.0) / sxx_centered);
    if (r.survivors.back() < 100) {
        r.low_tail_counts = true;
        r.slope_stderr *= 2.0;
    }

    r.trunc_horizons = options.trunc_horizons;
    r.trunc_sqrt_means.resize(r.trunc_horizons.size());
    for (std::size_t j = 0; j < r.trunc_horizons.size(); ++j) {
        double sum = 0.0;
        for (const double t : tau)
            if (t <= r.trunc_horizons[j]) sum += std::sqrt(t);
        r.trunc_sqrt_means[j] = sum / static_cast<double>(n_trials);
    }
    return r;
}

OvershootSummary summarize_overshoot(const PathSpec& spec, std::int64_t n_trials,
                                     std::uint64_t master_seed, std::int64_t t_max,
                                     int threads) {
    spec.validate();
    if (n_trials < 100) throw std::invalid_argument("summarize_overshoot: n_trials must be >= 100");
    if (t_max <= 0) {
        t_max = spec.step_mean > 0.0
                    ? static_cast<std::int64_t>(std::ceil(50.0 * spec.level / spec.step_mean)) + 1000
                    : 1'000'000;
    }

    std::vector<PassageResult> res(static_cast<std::size_t>(n_trials));
    parallel_for(n_trials, threads, [&](std::int64_t i) {
        res[static_cast<std::size_t>(i)] =
            first_passage(spec, master_seed, static_cast<std::uint64_t>(i), t_max);
    });

    OvershootSummary s;
    s.n_trials = n_trials;
    double sr = 0, sr2 = 0, sr2_sq = 0, st = 0, st_sq = 0;
    double sabs = 0, sabs_sq = 0, spos = 0, spos_sq = 0, smart = 0, smart_sq = 0;
    std::int64_t m = 0;
    for (const PassageResult& p : res) {
        if (p.censored) {
            ++s.n_censored;
            continue;
        }
        ++m;
        sr += p.overshoot;
        const double r2 = p.overshoot * p.overshoot;
        sr2 += r2;
        sr2_sq += r2 * r2;
        st += p.time;
        st_sq += p.time * p.time;
        const double fluct = spec.step_mean * p.time - spec.level;
        const double af = std::fabs(fluct);
        sabs += af;
        sabs_sq += af * af;
        const double pf = fluct > 0.0 ? fluct : 0.0;
        spos += pf;
        spos_sq += pf * pf;
        // X_tau = level + overshoot, so (X_tau - s tau)_+ = (level + R - s tau)_+.
        const double mg = spec.level + p.overshoot - spec.step_mean * p.time;
        const double mp = mg > 0.0 ? mg : 0.0;
        smart += mp;
        smart_sq += mp * mp;
    }

    const MeanSe r1 = mean_se(sr, sr2, m);  // sum of squares of R is sr2
    const MeanSe r2m = mean_se(sr2, sr2_sq, m);
    const MeanSe tm = mean_se(st, st_sq, m);
    const MeanSe ab = mean_se(sabs, sabs_sq, m);
    const MeanSe pf = mean_se(spos, spos_sq, m);
    const MeanSe mg = mean_se(smart, smart_sq, m);
    s.mean_overshoot = r1.mean;
    s.se_overshoot = r1.se;
    s.mean_sq_overshoot = r2m.mean;
    s.se_sq_overshoot = r2m.se;
    s.mean_time = tm.mean;
    s.se_time = tm.se;
    s.mean_abs_fluct = ab.mean;
    s.se_abs_fluct = ab.se;
    s.mean_pos_fluct = pf.mean;
    s.se_pos_fluct = pf.se;
    s.mean_martingale_pos = mg.mean;
    s.se_martingale_pos = mg.se;

    s.mean_overshoot_bound = overshoot_mean_bound(spec.step_mean, spec.step_std);
    s.sq_overshoot_bound = overshoot_moment_bound(spec.step_mean, spec.step_std, 2.0);
    s.mean_overshoot_ok = s.mean_overshoot <= s.mean_overshoot_bound + 3.0 * s.se_overshoot;
    s.sq_overshoot_ok = s.mean_sq_overshoot <= s.sq_overshoot_bound + 3.0 * s.se_sq_overshoot;

    if (spec.step_mean > 0.0 && spec.level > 0.0) {
        s.wald = wald_bracket(spec.step_mean, spec.step_std, spec.level);
        const double st_mean = spec.step_mean * s.mean_time;
        const double st_margin = 3.0 * spec.step_mean * s.se_time;
        s.wald_ok = st_mean >= s.wald.lo - st_margin && st_mean <= s.wald.hi + st_margin;
        s.fluct_bounds = crossing_fluctuation_bounds(spec.level, spec.step_mean);
        s.abs_fluct_ok = s.mean_abs_fluct <= s.fluct_bounds.abs_dev + 3.0 * s.se_abs_fluct;
        s.pos_fluct_ok = s.mean_pos_fluct <= s.fluct_bounds.pos_dev + 3.0 * s.se_pos_fluct;
        s.martingale_pos_ok =
            s.mean_martingale_pos <= s.fluct_bounds.martingale_pos + 3.0 * s.se_martingale_pos;
    } else {
        s.wald = {kNaN, kNaN};
        s.fluct_bounds = {kNaN, kNaN, kNaN};
    }
    return s;
}

}  // namespace tstlab
