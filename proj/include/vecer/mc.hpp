#pragma once

#include <cstdint>
#include <vector>

#include "vecer/market.hpp"

namespace vecer {

enum class Scheme {
    exact_piecewise,  // one lognormal update per drift interval, no time bias
    euler             // explicit Euler substeps, kept for convergence studies
};

struct PathConfig {
    long long n_paths = 100000;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::exact_piecewise;
    int euler_substeps = 1;    // substeps per drift interval (euler only)
    bool antithetic = false;   // pairs path 2i+1 with the negated draws of 2i

    void validate() const;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long n_paths = 0;
};

// Terminal values X_T of the reduced state started at (t, x), one entry per
// path in path order.  Identical output for any thread count: draws come from
// a counter keyed by (seed, path, step) and each path writes its own slot.
std::vector<double> simulate_terminal(double t, double x, const StepDrift& drift,
                                      double sigma, double T,
                                      const PathConfig& cfg);

// Monte Carlo price E (X_T - K)_+ with a batched mean/variance reduction that
// combines fixed-size path chunks in index order, so the result is
// bit-identical across thread counts.
MCEstimate price_mc(double t, double x, const StepDrift& drift,
                    const MarketParams& params, const PathConfig& cfg);

// Estimate of E[X_T] - x; the exact scheme should keep this at statistical
// zero for any drift.
MCEstimate martingale_residual(double t, double x, const StepDrift& drift,
                               double sigma, double T, const PathConfig& cfg);

// Plain single-threaded loops with a straight running-moment accumulator.
// They re-use the per-path kernel but none of the chunked reduction, serving
// as the reference the parallel engine is checked against.
namespace reference {
MCEstimate price_mc(double t, double x, const StepDrift& drift,
                    const MarketParams& params, const PathConfig& cfg);
MCEstimate martingale_residual(double t, double x, const StepDrift& drift,
                               double sigma, double T, const PathConfig& cfg);
} // namespace reference

} // namespace vecer
