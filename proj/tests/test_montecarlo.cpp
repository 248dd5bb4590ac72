#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracle_utils.hpp"
#include "tstlab/montecarlo.hpp"
#include "tstlab/serialize.hpp"

using namespace tstlab;

namespace {

WalkParams discrete_params(double l, double s = 1.0, double eps = 1.0) {
    WalkParams p;
    p.l = l;
    p.s = s;
    p.eps = eps;
    return p;
}

RunOptions threads(int n) {
    RunOptions o;
    o.threads = n;
    return o;
}

// Standard error of the signed deviation, reconstructed from the summary:
// Var(D) = Var(|D|) + (E|D|)^2 - (E D)^2.
double se_signed_dev(const ExperimentSummary& s) {
    const double m = static_cast<double>(s.n_trials - s.n_censored);
    const double extra = (s.mean_abs_dev * s.mean_abs_dev - s.mean_dev * s.mean_dev) / m;
    return std::sqrt(s.se_abs_dev * s.se_abs_dev + std::max(extra, 0.0));
}

}  // namespace

TEST_CASE("summaries are bit-identical across worker counts") {
    const WalkParams p = discrete_params(100);
    const EstimatorConfig est{0.5};
    const ExperimentSummary a = run_experiment(p, est, 500, 31337, threads(1));
    const ExperimentSummary b = run_experiment(p, est, 500, 31337, threads(4));
    CHECK(to_json(a).dump() == to_json(b).dump());
    const ExperimentSummary c = run_experiment(p, est, 500, 31337, threads(0));
    CHECK(to_json(a).dump() == to_json(c).dump());
}

TEST_CASE("too few trials rejected") {
    CHECK_THROWS_AS(run_experiment(discrete_params(100), EstimatorConfig{0.5}, 99, 1, {}),
                    std::invalid_argument);
}

TEST_CASE("noiseless runs deviate by exactly zero") {
    const ExperimentSummary s =
        run_experiment(discrete_params(100, 1.0, 0.0), EstimatorConfig{1.0}, 200, 5, {});
    CHECK(s.mean_abs_dev == 0.0);
    CHECK(s.mean_pos_dev == 0.0);
    CHECK(s.mean_dev == 0.0);
    CHECK(s.verdict == Verdict::inside_bracket);
    CHECK(s.n_censored == 0);
}

TEST_CASE("summary moment inequalities") {
    const ExperimentSummary s =
        run_experiment(discrete_params(200), EstimatorConfig{0.5}, 1000, 99, {});
    CHECK(s.mean_abs_dev >= std::fabs(s.mean_dev));
    CHECK(s.mean_abs_dev >= s.mean_pos_dev);
    CHECK(s.mean_pos_dev >= 0.0);
    CHECK(s.prob_eta_early >= 0.0);
    CHECK(s.prob_eta_early <= 1.0);
    CHECK(s.ci_halfwidth_abs_dev == doctest::Approx(kZ99 * s.se_abs_dev).epsilon(1e-15));
}

TEST_CASE("expected passage time obeys the bracket") {
    const ExperimentSummary s =
        run_experiment(discrete_params(100), EstimatorConfig{0.5}, 2000, 2718, {});
    const double margin = 3.0 * s.se_tau;
    CHECK(1.0 * s.mean_tau >= 100.0 - margin);
    CHECK(1.0 * s.mean_tau <= 106.0 + margin);
}

TEST_CASE("signed deviation respects the lower envelope") {
    // E(eta - tau) >= -(2s + 4)/s: the late side of the tracking error is
    // limited by the overshoot bound applied to both clocks.
    const ExperimentSummary s =
        run_experiment(discrete_params(500), EstimatorConfig{0.5}, 2000, 2731, {});
    CHECK(s.mean_dev - 3.0 * se_signed_dev(s) >= -6.0);
}

TEST_CASE("excess censoring flips the verdict") {
    WalkParams p = discrete_params(1000);
    p.t_max = 50;  // nearly every trial hits the cap
    const ExperimentSummary s = run_experiment(p, EstimatorConfig{0.5}, 200, 1, {});
    CHECK(s.verdict == Verdict::invalid_censoring);
    CHECK(s.n_censored > 0);
}

TEST_CASE("bracket verdict at a mid-size level") {
    const ExperimentSummary s =
        run_experiment(discrete_params(1000), EstimatorConfig{0.5}, 2000, 424242, {});
    CHECK(s.verdict == Verdict::inside_bracket);
    CHECK(s.bound_report.lower_ok);
    CHECK(s.bound_report.upper_ok);
    CHECK(s.mean_abs_dev - s.ci_halfwidth_abs_dev >= s.bound_report.lower);
    CHECK(s.mean_abs_dev + s.ci_halfwidth_abs_dev <= s.bound_report.upper);
}

TEST_CASE("collect returns one outcome per trial in index order") {
    std::vector<TrialOutcome> outcomes;
    const ExperimentSummary s = run_experiment_collect(discrete_params(50), EstimatorConfig{0.5},
                                                       120, 8, threads(3), &outcomes);
    CHECK(outcomes.size() == 120);
    CHECK(s.n_trials == 120);
    // Spot-check against direct resampling.
    for (std::size_t i : {std::size_t{0}, std::size_t{59}, std::size_t{119}}) {
        const TrialOutcome direct =
            sample_trial(discrete_params(50), EstimatorConfig{0.5}, 8, i, true);
        CHECK(outcomes[i].tau == direct.tau);
        CHECK(outcomes[i].eta == direct.eta);
    }
}

TEST_CASE("sweep rows are derived independently of later rows") {
    const std::vector<SweepPoint> small = {{100, 1, 1, 0.0, true}, {150, 1, 1, 0.5, false}};
    std::vector<SweepPoint> larger = small;
    larger.push_back({200, 1, 1, 0.0, true});

    WalkParams shared;
    const std::vector<SweepRow> a = sweep(small, shared, 200, 12345, {});
    const std::vector<SweepRow> b = sweep(larger, shared, 200, 12345, {});
    REQUIRE(a.size() == 2);
    REQUIRE(b.size() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a[i].row_seed == b[i].row_seed);
        CHECK(to_json(a[i].summary).dump() == to_json(b[i].summary).dump());
    }
    CHECK(a[0].resolved_c == 0.5);  // auto at eps = 1
    CHECK(a[1].resolved_c == 0.5);  // explicit
}

TEST_CASE("sweep records row failures and continues") {
    const std::vector<SweepPoint> grid = {{100, 1, 1, 0.0, true},
                                          {100, -1, 1, 0.0, true},
                                          {120, 1, 1, 0.0, true}};
    WalkParams shared;
    const std::vector<SweepRow> rows = sweep(grid, shared, 200, 5, {});
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[1].failed);
    CHECK_FALSE(rows[1].error.empty());
    CHECK_FALSE(rows[2].failed);
    CHECK(rows[0].ratio_to_main_term > 0.0);
    CHECK(std::isfinite(rows[0].ratio_to_main_term));
    CHECK_THROWS_AS(sweep({}, shared, 200, 5, {}), std::invalid_argument);
}

TEST_CASE("tracking ratio approaches one as the level grows") {
    const std::vector<SweepPoint> grid = {{100, 1, 1, 0.0, true}, {1000, 1, 1, 0.0, true}};
    WalkParams shared;
    const std::vector<SweepRow> rows = sweep(grid, shared, 1000, 777, {});
    const double final_ratio = rows[1].ratio_to_main_term;
    CHECK(final_ratio > 0.5);
    CHECK(final_ratio < 1.5);
}

TEST_CASE("fixed-rule rows track the closed-form envelope") {
    // With c = 0 the rule fires at ceil(l/s) deterministically and the
    // deviation is governed by sqrt(2l/(pi s^3)) + 2 + 4/s.
    const std::vector<SweepPoint> grid = {{1000, 1, 1, 0.0, false}};
    WalkParams shared;
    const std::vector<SweepRow> rows = sweep(grid, shared, 1000, 31415, {});
    const ExperimentSummary& s = rows[0].summary;
    const double envelope = std::sqrt(2000.0 / M_PI) + 6.0;
    CHECK(s.mean_abs_dev <= envelope + 3.0 * s.se_abs_dev);
    CHECK(s.mean_abs_dev >= 0.7 * envelope);
}

TEST_CASE("optimal coefficient beats the fixed rule at small noise") {
    const WalkParams p = discrete_params(10000, 1.0, 0.1);
    const ExperimentSummary tuned =
        run_experiment(p, EstimatorConfig{optimal_c(0.1)}, 800, 246, {});
    const ExperimentSummary fixed = run_experiment(p, EstimatorConfig{0.0}, 800, 246, {});
    // Disjoint 99% confidence intervals, tuned below fixed.
    CHECK(tuned.mean_abs_dev + tuned.ci_halfwidth_abs_dev <
          fixed.mean_abs_dev - fixed.ci_halfwidth_abs_dev);
}

TEST_CASE("default tail checkpoints form a log grid ending at the horizon") {
    const std::vector<double> cp = default_tail_checkpoints(1e6, 4);
    CHECK(cp.size() == 25);
    CHECK(cp.front() == 1.0);
    CHECK(cp.back() == 1e6);
    for (std::size_t i = 1; i < cp.size(); ++i) CHECK(cp[i] > cp[i - 1]);
    CHECK(default_tail_checkpoints(1e4, 4).size() == 17);
    CHECK_THROWS_AS(default_tail_checkpoints(0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(default_tail_checkpoints(100.0, 0), std::invalid_argument);
}

TEST_CASE("tail check input validation") {
    const std::vector<double> cp = default_tail_checkpoints(1e4, 4);
    CHECK_THROWS_AS(tail_exponent_estimate(0.0, 1000, cp, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(tail_exponent_estimate(1.0, 50, cp, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(tail_exponent_estimate(1.0, 1000, {1.0, 1.0, 2.0}, 1, {}),
                    std::invalid_argument);
    // Last decade must hold at least 5 checkpoints.
    CHECK_THROWS_AS(tail_exponent_estimate(1.0, 1000, {1.0, 10.0, 100.0}, 1, {}),
                    std::invalid_argument);
}

TEST_CASE("driftless survival matches the reflection law") {
    const std::vector<double> cp = default_tail_checkpoints(1e4, 4);
    TailCheckOptions opt;
    opt.threads = 0;
    const TailCheckResult r = tail_exponent_estimate(1.0, 20000, cp, 90901, opt);

    for (std::size_t i = 1; i < r.survival.size(); ++i) CHECK(r.survival[i] <= r.survival[i - 1]);

    // Pointwise agreement with 1 - 2Q(h/sqrt(t)) within 4 binomial SEs
    // (the acceptance profile tightens this to 3 at a pinned seed).
    for (std::size_t j = 0; j < cp.size(); ++j) {
        const double want = static_cast<double>(oracle::tail_survival(1.0, cp[j]));
        const double se = oracle::binom_se(want, 20000);
        CHECK(std::fabs(r.survival[j] - want) <= 4.0 * se);
    }
    CHECK(r.slope > -0.75);
    CHECK(r.slope < -0.25);
    CHECK(r.slope_stderr > 0.0);

    // Determinism.
    const TailCheckResult again = tail_exponent_estimate(1.0, 20000, cp, 90901, opt);
    CHECK(to_json(r).dump() == to_json(again).dump());
    TailCheckOptions par = opt;
    par.threads = 3;
    const TailCheckResult parallel = tail_exponent_estimate(1.0, 20000, cp, 90901, par);
    CHECK(to_json(r).dump() == to_json(parallel).dump());
}

TEST_CASE("truncated square-root moments keep growing by decades") {
    const std::vector<double> cp = default_tail_checkpoints(1e4, 4);
    const TailCheckResult r = tail_exponent_estimate(1.0, 20000, cp, 515151, {});
    REQUIRE(r.trunc_sqrt_means.size() == 3);
    // Closed-form truncated moments of the reflection law at T = 1, 10, 100.
    for (std::size_t j = 0; j < 3; ++j) {
        const double want =
            static_cast<double>(oracle::truncated_sqrt_mean(1.0L, r.trunc_horizons[j]));
        CHECK(std::fabs(r.trunc_sqrt_means[j] - want) < 0.05 * want + 0.02);
    }
    CHECK(r.trunc_sqrt_means[1] / r.trunc_sqrt_means[0] >= 1.5);
    CHECK(r.trunc_sqrt_means[2] / r.trunc_sqrt_means[1] >= 1.5);
}

TEST_CASE("small tail samples raise the low-count flag") {
    const std::vector<double> cp = default_tail_checkpoints(1e4, 4);
    const TailCheckResult r = tail_exponent_estimate(1.0, 1000, cp, 7, {});
    // Expected survivors at t = 1e4 are about 1000 * 0.008 = 8 << 100.
    CHECK(r.low_tail_counts);
}

TEST_CASE("overshoot summary on the deterministic ramp") {
    const OvershootSummary s = summarize_overshoot(PathSpec{1.0, 0.0, 10.5}, 200, 99);
    CHECK(s.mean_overshoot == 0.5);
    CHECK(s.se_overshoot == 0.0);
    CHECK(s.mean_time == 11.0);
    CHECK(s.n_censored == 0);
    CHECK(s.mean_overshoot_ok);
    CHECK(s.sq_overshoot_ok);
    CHECK(s.wald_ok);
    CHECK(s.abs_fluct_ok);
    CHECK(s.pos_fluct_ok);
    CHECK(s.martingale_pos_ok);
}

TEST_CASE("overshoot summary satisfies the closed-form bounds") {
    const OvershootSummary s = summarize_overshoot(PathSpec{1.0, 1.0, 100.0}, 20000, 20240823);
    CHECK(s.n_censored == 0);
    CHECK(s.mean_overshoot_ok);
    CHECK(s.sq_overshoot_ok);
    CHECK(s.wald_ok);
    CHECK(s.abs_fluct_ok);
    CHECK(s.pos_fluct_ok);
    CHECK(s.martingale_pos_ok);
    CHECK(s.mean_overshoot_bound == 6.0);
    CHECK(s.sq_overshoot_bound == doctest::Approx(40.0 / 3.0).epsilon(1e-14));
    CHECK(s.wald.lo == 100.0);
    CHECK(s.wald.hi == 106.0);
    // The sample means themselves sit well inside the bounds.
    CHECK(s.mean_overshoot < 6.0);
    CHECK(s.mean_sq_overshoot < 40.0 / 3.0);
}
