#include <cmath>
#include <random>

#include "doctest.h"
#include "vecer/market.hpp"

using namespace vecer;

namespace {
const MarketParams kBase{.r = 0.0, .sigma = 0.2, .T = 1.0, .K = 1.0};
}

TEST_CASE("market params validation") {
    CHECK_NOTHROW(kBase.validate());
    CHECK_THROWS(MarketParams{.r = 0.0, .sigma = 0.0, .T = 1.0, .K = 1.0}.validate());
    CHECK_THROWS(MarketParams{.r = 0.0, .sigma = -0.2, .T = 1.0, .K = 1.0}.validate());
    CHECK_THROWS(MarketParams{.r = 0.0, .sigma = 0.2, .T = 0.0, .K = 1.0}.validate());
    CHECK_THROWS(MarketParams{.r = 0.0, .sigma = 0.2, .T = 1.0, .K = 0.0}.validate());
}

TEST_CASE("weighting measure invariants") {
    CHECK_THROWS(WeightingMeasure({{0.0, 1.0}}, 1.0));   // atom at time zero
    CHECK_THROWS(WeightingMeasure({{0.5, -1.0}}, 1.0));  // negative mass
    CHECK_THROWS(WeightingMeasure({{0.5, 0.0}}, 1.0));   // zero mass
    CHECK_THROWS(WeightingMeasure({{1.5, 1.0}}, 1.0));   // beyond horizon
    CHECK_THROWS(WeightingMeasure({}, 1.0));             // no mass at all

    // Dividend measures are laxer: time 0, zero masses, empty all fine.
    CHECK_NOTHROW(DividendMeasure({{0.0, 0.5}}, 1.0));
    CHECK_NOTHROW(DividendMeasure({{0.5, 0.0}}, 1.0));
    CHECK_NOTHROW(DividendMeasure::zero(1.0));
    CHECK_THROWS(DividendMeasure({{0.5, -0.1}}, 1.0));
}

TEST_CASE("atoms closer than the merge tolerance combine") {
    const WeightingMeasure mu({{0.5, 0.25}, {0.5 + 1e-13, 0.25}}, 1.0);
    REQUIRE(mu.atoms().size() == 1);
    CHECK(mu.atoms()[0].mass == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("trading strategy q") {
    const DividendMeasure nu0 = DividendMeasure::zero(1.0);

    SUBCASE("single unit atom at maturity, all exponents zero") {
        const WeightingMeasure mu({{1.0, 1.0}}, 1.0);
        CHECK(compute_q(kBase, nu0, mu, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
        // the closed-interval [t, T] convention keeps the endpoint atom
        CHECK(compute_q(kBase, nu0, mu, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("two atoms with interest") {
        const MarketParams p{.r = 0.1, .sigma = 0.2, .T = 1.0, .K = 1.0};
        const WeightingMeasure mu({{0.5, 1.0}, {1.0, 1.0}}, 1.0);
        // direct summation: e^{-0.1*(1-0.5)} + e^{0}
        CHECK(compute_q(p, nu0, mu, 0.0) ==
              doctest::Approx(std::exp(-0.05) + 1.0).epsilon(1e-14));
    }

    SUBCASE("density part via quadrature") {
        const MarketParams p{.r = 0.1, .sigma = 0.2, .T = 1.0, .K = 1.0};
        const WeightingMeasure mu({}, StepDensity{{0.0, 1.0}, {1.0}}, 1.0);
        // integral of e^{-r(1-s)} over [t,1] = (1 - e^{-r(1-t)}) / r
        const double t = 0.3;
        const double expect = (1.0 - std::exp(-0.1 * (1.0 - t))) / 0.1;
        CHECK(compute_q(p, nu0, mu, t) == doctest::Approx(expect).epsilon(1e-9));
        // r = 0 collapses to the remaining length
        CHECK(compute_q(kBase, nu0, mu, t) == doctest::Approx(0.7).epsilon(1e-9));
    }

    SUBCASE("dividend atoms enter through both cumulative factors") {
        const DividendMeasure nu({{0.25, 0.04}}, 1.0);
        const WeightingMeasure mu({{1.0, 1.0}}, 1.0);
        // t = 0: prefactor e^{-nu((0,1])} = e^{-0.04}; atom weight e^{nu([1,1])} = 1
        CHECK(compute_q(kBase, nu, mu, 0.0) ==
              doctest::Approx(std::exp(-0.04)).epsilon(1e-14));
        // t = 0.25: the dividend atom is excluded from (0.25, 1]
        CHECK(compute_q(kBase, nu, mu, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("rejects t outside the horizon") {
        const WeightingMeasure mu({{1.0, 1.0}}, 1.0);
        CHECK_THROWS(compute_q(kBase, nu0, mu, -0.1));
        CHECK_THROWS(compute_q(kBase, nu0, mu, 1.1));
    }
}

TEST_CASE("drift construction") {
    const DividendMeasure nu0 = DividendMeasure::zero(1.0);

    SUBCASE("single atom, zero rates") {
        const StepDrift b = compute_b(kBase, nu0, WeightingMeasure({{1.0, 1.0}}, 1.0));
        REQUIRE(b.n_steps() == 1);
        CHECK(b.values()[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(b.values()[1] == 0.0);
        CHECK(b(0.0) == doctest::Approx(1.0));
        CHECK(b(1.0) == doctest::Approx(1.0));  // atom at T keeps b(T) positive
    }

    SUBCASE("two equal atoms give partial sums") {
        const StepDrift b =
            compute_b(kBase, nu0, WeightingMeasure({{0.5, 0.5}, {1.0, 0.5}}, 1.0));
        REQUIRE(b.n_steps() == 2);
        CHECK(b.values()[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(b.values()[1] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(b(0.5) == doctest::Approx(1.0));          // right endpoint included
        CHECK(b(0.5 + 1e-9) == doctest::Approx(0.5));   // half-open switch
        CHECK(b(1.0) == doctest::Approx(0.5));
    }

    SUBCASE("interest discounts the suffix sums") {
        const MarketParams p{.r = 0.1, .sigma = 0.2, .T = 1.0, .K = 1.0};
        const StepDrift b =
            compute_b(p, nu0, WeightingMeasure({{0.5, 1.0}, {1.0, 1.0}}, 1.0));
        CHECK(b.values()[0] == doctest::Approx(std::exp(-0.05) + 1.0).epsilon(1e-14));
        CHECK(b.values()[1] == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("b vanishes at T when the last atom is interior") {
        const StepDrift b = compute_b(kBase, nu0, WeightingMeasure({{0.8, 1.0}}, 1.0));
        CHECK(b(1.0) == 0.0);
        CHECK(b(0.9) == 0.0);
        CHECK(b(0.8) == doctest::Approx(1.0));
    }

    SUBCASE("density components are rejected in step form") {
        const WeightingMeasure mu({{0.5, 1.0}}, StepDensity{{0.0, 1.0}, {1.0}}, 1.0);
        CHECK_THROWS(compute_b(kBase, nu0, mu));
    }

    SUBCASE("doubling every mass doubles every level exactly") {
        const WeightingMeasure mu1({{0.3, 0.2}, {0.7, 0.5}, {1.0, 0.1}}, 1.0);
        const WeightingMeasure mu2({{0.3, 0.4}, {0.7, 1.0}, {1.0, 0.2}}, 1.0);
        const StepDrift b1 = compute_b(kBase, nu0, mu1);
        const StepDrift b2 = compute_b(kBase, nu0, mu2);
        REQUIRE(b1.values().size() == b2.values().size());
        for (std::size_t i = 0; i < b1.values().size(); ++i)
            CHECK(b2.values()[i] == 2.0 * b1.values()[i]);
    }
}

TEST_CASE("b(t) = exp(-nu([0,t])) q(t) with dividends") {
    const MarketParams p{.r = 0.07, .sigma = 0.3, .T = 1.0, .K = 1.0};
    const DividendMeasure nu({{0.2, 0.1}, {0.6, 0.05}}, 1.0);
    const WeightingMeasure mu({{0.3, 0.5}, {0.9, 0.5}}, 1.0);
    const StepDrift b = compute_b(p, nu, mu);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double t = ut(rng);
        const double nu0t = nu.mass_closed(0.0, t);
        const double lhs = b(t);
        const double rhs = std::exp(-nu0t) * compute_q(p, nu, mu, t);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("step drift evaluation and invariants") {
    const StepDrift two({0.5, 1.0}, {1.0, 0.5, 0.0}, 1.0);
    CHECK(eval_b(two, 0.5) == doctest::Approx(1.0));
    CHECK(eval_b(two, 0.5 + 1e-9) == doctest::Approx(0.5));
    CHECK_THROWS(two(-0.01));
    CHECK_THROWS(two(1.01));

    // direct-construction invariants
    CHECK_THROWS(StepDrift({0.5}, {1.0, 0.1}, 1.0));        // trailing not zero
    CHECK_THROWS(StepDrift({0.5}, {-1.0, 0.0}, 1.0));       // negative level
    CHECK_THROWS(StepDrift({0.5, 0.4}, {1.0, 0.5, 0.0}, 1.0));  // breaks unsorted
    CHECK_THROWS(StepDrift({0.5, 0.9}, {0.5, 1.0, 0.0}, 1.0));  // values increasing
    CHECK_THROWS(StepDrift({1.5}, {1.0, 0.0}, 1.0));        // break beyond T
    CHECK_THROWS(StepDrift({0.5}, {1.0, 0.5, 0.0}, 1.0));   // size mismatch
    CHECK_NOTHROW(StepDrift::zero(1.0));
    CHECK(StepDrift::zero(1.0)(0.3) == 0.0);
}

TEST_CASE("b is nonincreasing on random time pairs") {
    const DividendMeasure nu0 = DividendMeasure::zero(1.0);
    const StepDrift b = compute_b(
        kBase, nu0,
        WeightingMeasure({{0.2, 0.3}, {0.4, 0.2}, {0.7, 0.25}, {1.0, 0.25}}, 1.0));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double a = ut(rng), c = ut(rng);
        if (a > c) std::swap(a, c);
        CHECK(b(a) >= b(c));
    }
}
