#include "vecer/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vecer/analytic.hpp"

namespace vecer {

void CascadeConfig::validate() const {
    if (quad_order < 8)
        throw std::invalid_argument("CascadeConfig: quad_order must be >= 8");
    if (nodes_per_stage < 64)
        throw std::invalid_argument("CascadeConfig: nodes_per_stage must be >= 64");
    if (!(range_sd > 0.0))
        throw std::invalid_argument("CascadeConfig: range_sd must be positive");
}

namespace {

struct Interval {
    double lo, hi;
};

// Image of [lo, hi] under w -> beta + (w - beta) * f for the extreme
// lognormal factors at +-sd standard deviations over a span of length dt.
Interval propagate_interval(Interval iv, double beta, double sigma, double dt,
                            double sd) {
    const double s = sigma * std::sqrt(dt);
    const double f_lo = std::exp(-sd * s - 0.5 * s * s);
    const double f_hi = std::exp(sd * s - 0.5 * s * s);
    double lo = iv.lo, hi = iv.hi;
    Interval out{1e300, -1e300};
    for (double w : {lo, hi})
        for (double f : {f_lo, f_hi}) {
            const double v = beta + (w - beta) * f;
            out.lo = std::min(out.lo, v);
            out.hi = std::max(out.hi, v);
        }
    return out;
}

} // namespace

CascadePricer::CascadePricer(StepDrift drift, MarketParams params,
                             CascadeConfig cfg, double x_lo, double x_hi)
    : drift_(std::move(drift)), params_(params), cfg_(cfg),
      rule_(gauss_hermite(cfg.quad_order)) {
    params_.validate();
    cfg_.validate();
    if (drift_.horizon() != params_.T)
        throw std::invalid_argument("CascadePricer: drift horizon must equal T");
    if (!(x_lo <= x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi))
        throw std::invalid_argument("CascadePricer: bad query interval");

    const double T = params_.T;
    for (double tb : drift_.breakpoints())
        if (tb < T) stage_times_.push_back(tb);
    tail_shift_ = drift_(T);

    const std::size_t m = stage_times_.size();
    if (m < 2) return;  // closed-form tail reachable directly, no tables needed
    built_lo_ = x_lo;
    built_hi_ = x_hi;

    // Reachable interval at each interior breakpoint, then widen with the
    // anchors every stage function bends at.
    std::vector<double> anchors{0.0, params_.K};
    for (double v : drift_.values()) anchors.push_back(v);

    std::vector<Interval> ranges(m);
    Interval iv{x_lo, x_hi};
    double prev_t = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        iv = propagate_interval(iv, drift_(stage_times_[i]), params_.sigma,
                                stage_times_[i] - prev_t, cfg_.range_sd);
        for (double a : anchors) {
            iv.lo = std::min(iv.lo, a);
            iv.hi = std::max(iv.hi, a);
        }
        ranges[i] = iv;
        prev_t = stage_times_[i];
    }

    // Build tables back to front; stage m-1 stays closed form.
    tables_.resize(m);
    for (std::size_t i = m - 1; i-- > 0;) {
        const int n = cfg_.nodes_per_stage;
        std::vector<double> xs(n), ys(n);
        const double lo = ranges[i].lo, hi = ranges[i].hi;
        for (int j = 0; j < n; ++j)
            xs[j] = lo + (hi - lo) * j / (n - 1);
#pragma omp parallel for schedule(static)
        for (int j = 0; j < n; ++j)
            ys[j] = propagate(i + 1, stage_times_[i], xs[j]);
        tables_[i].emplace(std::move(xs), std::move(ys));
        built_lo_ = std::min(built_lo_, lo);
        built_hi_ = std::max(built_hi_, hi);
    }
    guard_range_ = true;
}

double CascadePricer::tail_value(double t, double x) const {
    return lognormal_call(x - tail_shift_, params_.K - tail_shift_, params_.sigma,
                          params_.T - t);
}

// Value function at interior breakpoint `stage`, with asymptotic fill-in
// outside the tabulated range: deep above, the time value is below the table
// padding error and u ~ x - K; deep below, u ~ 0.
double CascadePricer::stage_value(std::size_t stage, double x) const {
    if (stage + 1 == stage_times_.size())
        return tail_value(stage_times_[stage], x);
    const MonotoneCubic& tb = *tables_[stage];
    if (x > tb.hi()) return x - params_.K;
    if (x < tb.lo()) return 0.0;
    return tb(x);
}

// Gauss-Hermite expectation of the stage-`stage` value over the span (t, s_stage].
double CascadePricer::propagate(std::size_t stage, double t, double x) const {
    const double dt = stage_times_[stage] - t;
    const double beta = drift_(stage_times_[stage]);
    const double s = params_.sigma * std::sqrt(dt);
    const double w = x - beta;
    const double inv_sqrt_pi = 0.5641895835477562869;
    double acc = 0.0;
    for (int q = 0; q < cfg_.quad_order; ++q) {
        const double g = std::exp(M_SQRT2 * s * rule_.nodes[q] - 0.5 * s * s);
        acc += rule_.weights[q] * stage_value(stage, beta + w * g);
    }
    return acc * inv_sqrt_pi;
}

double CascadePricer::price(double t, double x) const {
    if (!(t >= 0.0) || t > params_.T)
        throw std::domain_error("CascadePricer: t outside [0, T]");
    if (!std::isfinite(x))
        throw std::domain_error("CascadePricer: x must be finite");
    if (guard_range_ && (x < built_lo_ || x > built_hi_))
        throw std::domain_error("CascadePricer: query outside built range");

    const auto it =
        std::upper_bound(stage_times_.begin(), stage_times_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - stage_times_.begin());
    if (idx == stage_times_.size()) return tail_value(t, x);
    return propagate(idx, t, x);
}

double cascade_price(double t, double x, const StepDrift& drift,
                     const MarketParams& params, const CascadeConfig& cfg) {
    CascadePricer pricer(drift, params, cfg, x, x);
    return pricer.price(t, x);
}

} // namespace vecer
