#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "oracle_utils.hpp"
#include "tstlab/core_model.hpp"

using namespace tstlab;

TEST_CASE("time mode string round trip") {
    CHECK(std::string(to_string(TimeMode::discrete)) == "discrete");
    CHECK(std::string(to_string(TimeMode::brownian)) == "brownian");
    CHECK(time_mode_from_string("discrete") == TimeMode::discrete);
    CHECK(time_mode_from_string("brownian") == TimeMode::brownian);
    CHECK_THROWS_AS(time_mode_from_string("weekly"), std::invalid_argument);
}

TEST_CASE("walk params validation") {
    WalkParams p;  // defaults are valid
    CHECK_NOTHROW(p.validate());

    SUBCASE("negative fields rejected") {
        WalkParams bad = p;
        bad.s = -1.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = p;
        bad.eps = -0.5;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = p;
        bad.l = -2.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = p;
        bad.t_max = -7;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
    SUBCASE("brownian mode needs a positive grid step") {
        WalkParams b = p;
        b.mode = TimeMode::brownian;
        b.dt = 0.0;
        CHECK_THROWS_AS(b.validate(), std::invalid_argument);
        b.dt = 0.01;
        CHECK_NOTHROW(b.validate());
    }
    SUBCASE("boundary values s = 0, eps = 0, l = 0 are admitted") {
        WalkParams z = p;
        z.s = 0.0;
        z.eps = 0.0;
        z.l = 0.0;
        CHECK_NOTHROW(z.validate());
    }
}

TEST_CASE("default horizon keeps censoring rare") {
    WalkParams p;
    p.l = 100.0;
    p.s = 1.0;
    // In discrete mode the default cap must cover at least 50 l / s steps.
    CHECK(p.horizon_steps() >= 50 * 100);
    CHECK(p.horizon_steps() >= 1);

    WalkParams b = p;
    b.mode = TimeMode::brownian;
    b.dt = 0.01;
    b.l = 10.0;
    // Same rule in time units: steps * dt >= 50 l / s.
    CHECK(static_cast<double>(b.horizon_steps()) * b.dt >= 50.0 * 10.0);

    WalkParams fixed = p;
    fixed.t_max = 123;
    CHECK(fixed.horizon_steps() == 123);

    WalkParams driftless;
    driftless.s = 0.0;
    CHECK(driftless.horizon_steps() >= 1);
}

TEST_CASE("gaussian tail values") {
    CHECK(gaussian_tail(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // The five-decimal figure is itself rounded; the tight comparison
    // below goes against quadrature.
    CHECK(std::fabs(gaussian_tail(0.7454) - 0.22804) < 1e-4);
    CHECK(std::fabs(gaussian_tail(0.7454) - static_cast<double>(oracle::q_quad(0.7454L))) <
          1e-14);
    CHECK_THROWS_AS(gaussian_tail(std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(gaussian_tail(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("gaussian tail symmetry and monotonicity") {
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unif(-8.0, 8.0);
    std::vector<double> xs(200);
    for (double& x : xs) x = unif(gen);
    for (double x : xs) CHECK(gaussian_tail(x) + gaussian_tail(-x) == doctest::Approx(1.0).epsilon(1e-14));
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double hi = gaussian_tail(xs[i - 1]);
        const double lo = gaussian_tail(xs[i]);
        CHECK(lo <= hi);
        // Deep in the left tail 1 - Q changes by less than an ulp of 1,
        // so strictness is only a representable claim away from saturation.
        if (lo > 1e-12 && hi < 1.0 - 1e-12) CHECK(lo < hi);
    }
}

TEST_CASE("gaussian tail matches quadrature to 1e-10 on [-8, 8]") {
    for (int i = 0; i <= 160; ++i) {
        const double x = -8.0 + 0.1 * i;
        const double ref = static_cast<double>(oracle::q_quad(x));
        CHECK(std::fabs(gaussian_tail(x) - ref) < 1e-10);
    }
}

TEST_CASE("optimal tracking coefficient") {
    CHECK(optimal_c(0.0) == 1.0);
    CHECK(optimal_c(1.0) == 0.5);
    CHECK(optimal_c(3.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(optimal_c(-0.1), std::invalid_argument);
}

TEST_CASE("variance factor algebra") {
    CHECK(variance_factor(1.0, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(variance_factor(0.0, 2.0) == 1.0);
    CHECK(variance_factor(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(variance_factor(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(variance_factor(0.5, -1.0), std::invalid_argument);
}

TEST_CASE("variance factor is minimized exactly at the optimal coefficient") {
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> ce(0.0, 3.0);
    for (int k = 0; k < 500; ++k) {
        const double eps = ce(gen);
        const double c = ce(gen);
        const double cbar = optimal_c(eps);
        const double floor = eps * eps / (1.0 + eps * eps);
        CHECK(variance_factor(c, eps) >= floor - 1e-15);
        CHECK(variance_factor(cbar, eps) == doctest::Approx(floor).epsilon(1e-13));
        if (std::fabs(c - cbar) > 1e-6)
            CHECK(variance_factor(c, eps) > floor + 1e-13 * (c - cbar) * (c - cbar));
    }
}

TEST_CASE("estimator config validation") {
    EstimatorConfig ok{0.0};
    CHECK_NOTHROW(ok.validate());
    EstimatorConfig bad{-0.25};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
