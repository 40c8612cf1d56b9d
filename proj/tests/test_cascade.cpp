#include <cmath>
#include <random>

#include "doctest.h"
#include "vecer/analytic.hpp"
#include "vecer/cascade.hpp"

using namespace vecer;

namespace {

const MarketParams kBench{.r = 0.0, .sigma = 0.2, .T = 1.0, .K = 0.8};

StepDrift two_atom_drift() {
    return StepDrift({0.5, 1.0}, {1.0, 0.5, 0.0}, 1.0);
}

StepDrift three_atom_drift() {
    return StepDrift({0.3, 0.6, 0.9}, {0.9, 0.6, 0.3, 0.0}, 1.0);
}

// In-test oracle: piecewise-exact path simulation with the standard library
// generator, sharing nothing with the production engine.
double mt_price(double x0, const StepDrift& d, double sigma, double K,
                long n_paths, unsigned long long seed, double* se_out) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& bp = d.breakpoints();
    const auto& bv = d.values();
    double sum = 0.0, sumsq = 0.0;
    for (long p = 0; p < n_paths; ++p) {
        double x = x0, t = 0.0;
        for (std::size_t i = 0; i < bp.size(); ++i) {
            const double dt = bp[i] - t;
            if (dt > 0.0) {
                const double z = gauss(rng);
                x = bv[i] + (x - bv[i]) * std::exp(sigma * std::sqrt(dt) * z -
                                                   0.5 * sigma * sigma * dt);
            }
            t = bp[i];
        }
        if (t < d.horizon()) {
            const double dt = d.horizon() - t;
            const double z = gauss(rng);
            x = bv.back() + (x - bv.back()) * std::exp(sigma * std::sqrt(dt) * z -
                                                       0.5 * sigma * sigma * dt);
        }
        const double pay = std::max(x - K, 0.0);
        sum += pay;
        sumsq += pay * pay;
    }
    const double mean = sum / n_paths;
    *se_out = std::sqrt((sumsq / n_paths - mean * mean) / (n_paths - 1));
    return mean;
}

} // namespace

TEST_CASE("configuration validation") {
    CascadeConfig cfg;
    cfg.quad_order = 4;
    CHECK_THROWS(cfg.validate());
    cfg = CascadeConfig{};
    cfg.nodes_per_stage = 10;
    CHECK_THROWS(cfg.validate());
    cfg = CascadeConfig{};
    cfg.range_sd = 0.0;
    CHECK_THROWS(cfg.validate());
    CHECK_THROWS(CascadePricer(two_atom_drift(),
                               MarketParams{.r = 0, .sigma = 0.2, .T = 1, .K = 0},
                               CascadeConfig{}, 0.5, 2.0));
    CHECK_THROWS(CascadePricer(two_atom_drift(), kBench, CascadeConfig{}, 2.0,
                               0.5));  // inverted guard interval
}

TEST_CASE("zero drift reduces to the closed form everywhere") {
    const MarketParams p{.r = 0.0, .sigma = 0.2, .T = 1.0, .K = 1.0};
    const CascadePricer pr(StepDrift::zero(1.0), p, CascadeConfig{}, 0.5, 2.0);
    CHECK(pr.n_stages() == 0);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double t = i / 20.0;
            const double x = -1.0 + 4.0 * j / 19.0;
            CHECK(std::fabs(pr.price(t, x) - u_reduced(t, x, p)) < 1e-8);
        }
}

TEST_CASE("constant drift level shifts the closed form") {
    const StepDrift d({1.0}, {0.4, 0.0}, 1.0);
    const CascadePricer pr(d, kBench, CascadeConfig{}, 0.5, 2.0);
    CHECK(pr.n_stages() == 0);  // a break at expiry is not an interior stage
    for (double t : {0.0, 0.3, 0.9})
        for (double x : {0.5, 0.9, 1.3}) {
            CHECK(pr.price(t, x) ==
                  doctest::Approx(lognormal_call(x - 0.4, 0.8 - 0.4, 0.2, 1.0 - t))
                      .epsilon(1e-13));
        }
}

TEST_CASE("two-interval benchmark") {
    const CascadePricer pr(two_atom_drift(), kBench, CascadeConfig{}, 0.5, 2.0);
    CHECK(pr.n_stages() == 1);
    const double u = pr.price(0.0, 1.0);

    // Starting exactly on the first drift level freezes the state over the
    // first interval, so the value collapses to a single closed form.
    CHECK(std::fabs(u - gbm_call(0.5, 0.3, 0.2, 0.5)) < 1e-7);
    CHECK(std::fabs(u - 0.200002034751623) < 1e-7);

    // pinned by a 10^7-path mt19937_64 oracle run before the build:
    // mean 0.2000220675, se 2.247e-5
    CHECK(std::fabs(u - 0.2000220675) < 3.0 * 2.247e-5);

    // past the last interior breakpoint the price is the exact tail form
    CHECK(pr.price(0.7, 1.0) ==
          doctest::Approx(lognormal_call(0.5, 0.3, 0.2, 0.3)).epsilon(1e-13));

    // convenience wrapper agrees
    CHECK(cascade_price(0.0, 1.0, two_atom_drift(), kBench, CascadeConfig{}) ==
          doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("three-stage drift against an independent simulation") {
    const MarketParams p{.r = 0.0, .sigma = 0.3, .T = 1.0, .K = 0.5};
    const CascadePricer pr(three_atom_drift(), p, CascadeConfig{}, 0.6, 1.6);
    CHECK(pr.n_stages() == 3);
    const double u = pr.price(0.0, 1.0);
    double se = 0.0;
    const double mc = mt_price(1.0, three_atom_drift(), 0.3, 0.5, 1000000, 31, &se);
    CHECK(std::fabs(u - mc) < 3.0 * se);
}

TEST_CASE("price is stable in the quadrature order and table density") {
    const MarketParams p{.r = 0.0, .sigma = 0.3, .T = 1.0, .K = 0.5};
    CascadeConfig lo, hi;
    lo.quad_order = 32;
    hi.quad_order = 64;
    const double a = cascade_price(0.0, 1.0, three_atom_drift(), p, lo);
    const double b = cascade_price(0.0, 1.0, three_atom_drift(), p, hi);
    CHECK(std::fabs(a - b) < 1e-6);

    CascadeConfig dense;
    dense.nodes_per_stage = 1024;
    const double c = cascade_price(0.0, 1.0, three_atom_drift(), p, dense);
    CHECK(std::fabs(b - c) < 1e-6);
}

TEST_CASE("queries outside the tabulated range are rejected") {
    // A single interior breakpoint reaches the closed-form tail directly, so
    // no tables exist and any finite query point is admissible.
    const CascadePricer direct(two_atom_drift(), kBench, CascadeConfig{}, 0.5, 2.0);
    CHECK(direct.built_lo() == direct.built_hi());
    CHECK(std::isfinite(direct.price(0.25, 50.0)));
    CHECK(std::isfinite(direct.price(0.25, -50.0)));

    // Several interior breakpoints force interpolation tables, and the pricer
    // refuses to extrapolate beyond them.
    const CascadePricer pr(three_atom_drift(), kBench, CascadeConfig{}, 0.5, 2.0);
    CHECK(pr.built_lo() < pr.built_hi());
    CHECK_THROWS_AS(pr.price(0.25, pr.built_hi() + 1.0), std::domain_error);
    CHECK_THROWS_AS(pr.price(0.25, pr.built_lo() - 1.0), std::domain_error);
    CHECK_THROWS(pr.price(-0.1, 1.0));
    CHECK_THROWS(pr.price(1.1, 1.0));
    // inside the guaranteed interval everything works, right up to expiry
    CHECK(pr.price(1.0, 1.3) == doctest::Approx(0.5).epsilon(1e-15));
}
