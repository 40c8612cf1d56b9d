#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "vecer/analytic.hpp"
#include "vecer/mc.hpp"
#include "vecer/normal.hpp"
#include "vecer/regularity.hpp"

using namespace vecer;

namespace {

const MarketParams kP02{.r = 0.0, .sigma = 0.2, .T = 1.0, .K = 1.0};

PricingEngine closed_engine(const MarketParams& p) {
    return PricingEngine{
        [p](double t, double x) { return v_reduced(t, x, p); }, {}};
}

std::vector<double> dyadic_x0s(double K, int j_lo, int j_hi) {
    std::vector<double> xs;
    for (int j = j_lo; j <= j_hi; ++j) xs.push_back(K * std::pow(2.0, -j));
    return xs;
}

double row_sum(const DecayRow& r) { return r.x_vx + r.x2_vxx + r.vt; }

// Space grid dense in ln x, built for tracking the vanishing rate toward 0+;
// 0 itself is a node, so the region x <= 0 decouples and stays exactly zero.
SpaceGrid log_dense_grid() {
    SpaceGrid g;
    g.nodes.push_back(0.0);
    for (int k = 0; k <= 480; ++k)
        g.nodes.push_back(std::pow(2.0, -12.0 + k / 40.0));
    for (int k = 1; k <= 320; ++k)
        g.nodes.push_back(std::exp(10.0 * k / 320.0));
    return g;
}

} // namespace

TEST_CASE("pointwise bound values and ordering") {
    SUBCASE("unit log-ratio collapses the formula") {
        const MarketParams p{.r = 0.0, .sigma = 1.0, .T = 1.0, .K = std::exp(1.0)};
        const double front = std::sqrt(2.0 / M_PI) * std::exp(1.0);
        CHECK(lemma_bound(0.0, 1.0, p, BoundVariant::printed) ==
              doctest::Approx(front * std::exp(-1.0)).epsilon(1e-14));
        CHECK(lemma_bound(0.0, 1.0, p, BoundVariant::derivation) ==
              doctest::Approx(front * std::exp(-0.5)).epsilon(1e-14));
    }
    SUBCASE("the derivation variant is always the weaker statement") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uy(0.05, 5.0), ut(0.0, 0.999);
        for (int i = 0; i < 200; ++i) {
            const double x = std::exp(-uy(rng));
            const double t = ut(rng);
            CHECK(lemma_bound(t, x, kP02, BoundVariant::derivation) >=
                  lemma_bound(t, x, kP02, BoundVariant::printed));
        }
    }
    SUBCASE("the derivation variant dominates the true value near 0+") {
        CHECK(lemma_bound(0.0, 0.01, kP02, BoundVariant::derivation) >=
              v_reduced(0.0, 0.01, kP02));
    }
    SUBCASE("negative strikes mirror") {
        const MarketParams m{.r = 0.0, .sigma = 0.2, .T = 1.0, .K = -1.0};
        CHECK(lemma_bound(0.0, -0.5, m, BoundVariant::derivation) ==
              doctest::Approx(lemma_bound(0.0, 0.5, kP02, BoundVariant::derivation))
                  .epsilon(1e-14));
    }
    SUBCASE("strip membership is enforced") {
        CHECK_THROWS(lemma_bound(1.0, 0.5, kP02, BoundVariant::printed));
        CHECK_THROWS(lemma_bound(0.0, 1.0, kP02, BoundVariant::printed));
        CHECK_THROWS(lemma_bound(0.0, -0.1, kP02, BoundVariant::printed));
        CHECK_THROWS(lemma_bound(0.0, 1.7, kP02, BoundVariant::printed));
    }
}

TEST_CASE("bound lattice for the closed form") {
    const BoundReport rep = check_bound(closed_engine(kP02), kP02, 20, 20);
    CHECK((int)rep.samples.size() == 400);
    // the factor-2-weaker exponent holds everywhere ...
    CHECK(rep.violations_derivation == 0);
    CHECK(rep.worst_margin_derivation > 0.0);
    // ... while the stronger printed exponent fails deep in the strip, where
    // the true value sits orders of magnitude above it
    CHECK(rep.violations_printed > 0);
    CHECK(rep.worst_margin_printed < 0.0);

    const MarketParams wide{.r = 0.0, .sigma = 0.5, .T = 1.0, .K = 1.0};
    CHECK(check_bound(closed_engine(wide), wide, 10, 15).violations_derivation == 0);

    CHECK_THROWS(check_bound(PricingEngine{}, kP02, 5, 5));
    CHECK_THROWS(check_bound(closed_engine(kP02), kP02, 0, 5));
}

TEST_CASE("bound lattice for the sampling engine stays within noise") {
    PricingEngine mc;
    mc.value = [](double t, double x) {
        PathConfig cfg;
        cfg.n_paths = 10000;
        cfg.seed = 123;
        return price_mc(t, x, StepDrift::zero(1.0), kP02, cfg).mean;
    };
    mc.tolerance = [](double t, double x) {
        PathConfig cfg;
        cfg.n_paths = 10000;
        cfg.seed = 123;  // counter-keyed draws: the replay sees identical paths
        return 3.0 * price_mc(t, x, StepDrift::zero(1.0), kP02, cfg).std_error;
    };
    const BoundReport rep = check_bound(mc, kP02, 10, 10);
    CHECK(rep.violations_derivation <= 3);
}

TEST_CASE("rescaled derivatives match the closed-form sensitivities") {
    const auto profile =
        decay_profile([](double t, double x) { return v_reduced(t, x, kP02); },
                      0.0, kP02, dyadic_x0s(1.0, 2, 10));
    REQUIRE(profile.rows.size() == 9);
    for (std::size_t i = 0; i <= 4; ++i) {  // x0 = 2^-2 .. 2^-6
        const double x = profile.rows[i].x0;
        const double d1 = (std::log(x) + 0.02) / 0.2;
        const double pdf = std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * M_PI);
        CAPTURE(x);
        CHECK(profile.rows[i].x_vx ==
              doctest::Approx(x * normal_cdf(d1)).epsilon(0.01));
        CHECK(profile.rows[i].x2_vxx ==
              doctest::Approx(x * pdf / 0.2).epsilon(0.01));
        CHECK(profile.rows[i].vt ==
              doctest::Approx(0.5 * 0.04 * x * pdf / 0.2).epsilon(0.01));
    }
}

TEST_CASE("decay columns fall monotonically toward 0+") {
    for (double t0 : {0.0, 0.125, 0.25, 0.375, 0.5}) {
        const auto profile = decay_profile(
            [](double t, double x) { return v_reduced(t, x, kP02); }, t0, kP02,
            dyadic_x0s(1.0, 2, 10));
        for (std::size_t i = 3; i < profile.rows.size(); ++i) {  // j >= 5 vs j-1
            CAPTURE(t0);
            CAPTURE(i);
            CHECK(profile.rows[i].x_vx <= profile.rows[i - 1].x_vx);
            CHECK(profile.rows[i].x2_vxx <= profile.rows[i - 1].x2_vxx);
            CHECK(profile.rows[i].vt <= profile.rows[i - 1].vt);
        }
    }
}

TEST_CASE("fitted envelope dominates the deeper rows") {
    const auto profile =
        decay_profile([](double t, double x) { return v_reduced(t, x, kP02); },
                      0.0, kP02, dyadic_x0s(1.0, 2, 10));
    const double N = fit_decay_envelope(profile, {2, 3});  // fit on 2^-4, 2^-5
    CHECK(N > 0.0);
    // the fit passes through the binding row ...
    CHECK(decay_envelope(N, profile.rows[2].x0) >= row_sum(profile.rows[2]));
    CHECK(decay_envelope(N, profile.rows[3].x0) >= row_sum(profile.rows[3]));
    // ... and stays above everything deeper
    for (std::size_t i = 4; i < profile.rows.size(); ++i) {
        CAPTURE(i);
        CHECK(decay_envelope(N, profile.rows[i].x0) >=
              row_sum(profile.rows[i]) * (1.0 - 1e-9));
    }

    SUBCASE("degenerate inputs") {
        DecayProfile zeros;
        zeros.rows.push_back({0.25, 0.125, 0.0, 0.0, 0.0});
        CHECK(fit_decay_envelope(zeros, {0}) == 0.0);
        CHECK_THROWS(fit_decay_envelope(profile, {}));
        CHECK_THROWS(fit_decay_envelope(profile, {99}));
        CHECK(decay_envelope(2.0, 1.0) == 2.0);
        CHECK(decay_envelope(3.0, 0.1) > decay_envelope(2.0, 0.1));
    }
    SUBCASE("argument checks") {
        CHECK_THROWS(decay_profile(
            [](double, double) { return 0.0; }, 1.0, kP02, dyadic_x0s(1, 2, 3)));
        CHECK_THROWS(decay_profile(
            [](double, double) { return 0.0; }, 0.0, kP02, {0.9}));
        CHECK_THROWS(decay_profile(
            [](double, double) { return 0.0; }, 0.0, kP02, {0.1, 0.2}));
        const MarketParams neg{.r = 0, .sigma = 0.2, .T = 1, .K = -1.0};
        CHECK_THROWS(decay_profile(
            [](double, double) { return 0.0; }, 0.0, neg, {0.1}));
    }
}

TEST_CASE("solver-based decay profile tracks the closed form") {
    // A wide-volatility setup keeps the deep rows well above solver error.
    const MarketParams p{.r = 0.0, .sigma = 1.0, .T = 2.0, .K = 1.0};
    SolverConfig sc;
    sc.time_steps = 1024;
    SpaceGrid grid = log_dense_grid();
    TimeGrid tg;
    for (int i = 0; i <= 1024; ++i) tg.levels.push_back(2.0 * (1.0 - i / 1024.0));
    tg.levels.back() = 0.0;
    const auto sol = solve_backward_on(StepDrift::zero(2.0), p, sc, grid, tg);

    const auto xs = dyadic_x0s(1.0, 2, 8);
    const auto got = decay_profile(sol, 0.0, xs);
    const auto want = decay_profile(
        [&p](double t, double x) { return v_reduced(t, x, p); }, 0.0, p, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CAPTURE(xs[i]);
        CHECK(got.rows[i].x_vx ==
              doctest::Approx(want.rows[i].x_vx).epsilon(0.05));
        CHECK(got.rows[i].x2_vxx ==
              doctest::Approx(want.rows[i].x2_vxx).epsilon(0.05));
        CHECK(got.rows[i].vt == doctest::Approx(want.rows[i].vt).epsilon(0.05));
    }
}

TEST_CASE("the value vanishes identically left of the origin") {
    SUBCASE("closed form") {
        CHECK(vanishing_region_check(closed_engine(kP02), kP02, 100) == 0);
    }
    SUBCASE("sampling engine hits exact zeros") {
        PricingEngine mc;
        mc.value = [](double t, double x) {
            PathConfig cfg;
            cfg.n_paths = 2000;
            cfg.seed = 5;
            double sum = 0.0;
            for (double xt : simulate_terminal(t, x, StepDrift::zero(1.0), 0.2,
                                               1.0, cfg))
                sum += std::max(xt - 1.0, 0.0);
            return sum / cfg.n_paths;
        };
        CHECK(vanishing_region_check(mc, kP02, 50) == 0);
    }
    SUBCASE("pde solution") {
        SolverConfig sc;
        sc.space_cells = 256;
        sc.time_steps = 256;
        sc.x_min = -2.5;
        sc.x_max = std::exp(1.2);
        const auto sol = solve_backward(StepDrift::zero(1.0), kP02, sc);
        PricingEngine pe;
        pe.value = [&sol](double t, double x) { return get_u(sol, t, x); };
        pe.tolerance = [](double, double) { return 1e-8; };
        CHECK(vanishing_region_check(pe, kP02, 100) == 0);
    }
    SUBCASE("argument checks") {
        const MarketParams neg{.r = 0, .sigma = 0.2, .T = 1, .K = -1.0};
        CHECK_THROWS(vanishing_region_check(closed_engine(kP02), neg, 10));
        CHECK_THROWS(vanishing_region_check(closed_engine(kP02), kP02, 1));
    }
}

TEST_CASE("the value never exceeds the strike inside the strip") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ut(0.0, 1.0), ux(1e-6, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double t = ut(rng), x = ux(rng);
        CHECK(v_reduced(t, x, kP02) <= 1.0 * (1.0 + 1e-12));
        CHECK(v_reduced(t, x, kP02) >= 0.0);
    }
}

TEST_CASE("gaussian tail inequality") {
    const double r1 = gaussian_tail_check({1.0});
    const double want =
        std::sqrt(M_PI / 2.0) * std::erfc(1.0 / std::sqrt(2.0)) / std::exp(-0.5);
    CHECK(r1 == doctest::Approx(want).epsilon(1e-9));

    CHECK(gaussian_tail_check({10.0}) >= 0.98);
    CHECK(gaussian_tail_check({10.0}) < 1.0);

    std::vector<double> alphas;
    for (int i = 0; i < 50; ++i)
        alphas.push_back(1e-3 * std::pow(1e4, i / 49.0));
    const double rmax = gaussian_tail_check(alphas);
    CHECK(rmax <= 1.0);
    CHECK(rmax >= 0.98);  // the alpha = 10 endpoint drives the max

    CHECK_THROWS(gaussian_tail_check({}));
    CHECK_THROWS(gaussian_tail_check({-1.0}));
    CHECK_THROWS(gaussian_tail_check({0.0}));
}
