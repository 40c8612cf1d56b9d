#pragma once

#include <optional>
#include <vector>

#include "vecer/gauss_hermite.hpp"
#include "vecer/market.hpp"
#include "vecer/pchip.hpp"

namespace vecer {

struct CascadeConfig {
    int quad_order = 64;        // Gauss-Hermite order per stage, >= 8
    int nodes_per_stage = 512;  // tabulation nodes per interior breakpoint, >= 64
    double range_sd = 8.0;      // reachable-interval half-width in lognormal sds

    void validate() const;
};

// Semi-analytic pricer for a step drift: between breakpoints the state is a
// shifted exponential martingale, so the value function is propagated
// backwards one breakpoint at a time.  The final span carries an exact closed
// form; each earlier span is a Gauss-Hermite expectation of the next span's
// value, tabulated on a shape-preserving cubic so later stages can query it.
class CascadePricer {
  public:
    // The pricer guarantees queries started from x in [x_lo, x_hi] at time 0;
    // table ranges follow the interval reachable from there plus the payoff
    // anchors (strike, drift levels, zero).
    CascadePricer(StepDrift drift, MarketParams params, CascadeConfig cfg,
                  double x_lo, double x_hi);

    double price(double t, double x) const;

    // Endpoints of the tabulated region (equal when no tables were needed).
    double built_lo() const { return built_lo_; }
    double built_hi() const { return built_hi_; }
    std::size_t n_stages() const { return stage_times_.size(); }

  private:
    double tail_value(double t, double x) const;
    double stage_value(std::size_t stage, double x) const;
    double propagate(std::size_t stage, double t, double x) const;

    StepDrift drift_;
    MarketParams params_;
    CascadeConfig cfg_;
    GaussHermiteRule rule_;
    std::vector<double> stage_times_;        // breakpoints strictly inside (0, T)
    std::vector<std::optional<MonotoneCubic>> tables_;  // per stage, last stays empty
    double tail_shift_ = 0.0;                // drift level on the final span
    double built_lo_ = 0.0, built_hi_ = 0.0;
    bool guard_range_ = false;
};

// One-shot convenience wrapper: builds a pricer centred at the query point.
double cascade_price(double t, double x, const StepDrift& drift,
                     const MarketParams& params, const CascadeConfig& cfg);

} // namespace vecer
