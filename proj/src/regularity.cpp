#include "vecer/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vecer {

namespace {

void require_in_strip(double t, double x, const MarketParams& params) {
    params.validate();
    if (!(t >= 0.0) || t >= params.T)
        throw std::domain_error("lemma_bound: t must lie in [0, T)");
    const bool inside = params.K > 0.0 ? (x > 0.0 && x < params.K)
                                       : (x > params.K && x < 0.0);
    if (!inside)
        throw std::domain_error("lemma_bound: x outside the strip Q");
}

double simpson_rule(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_rule(a, m, fa, flm, fm);
    const double right = simpson_rule(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson(f, a, b, fa, fm, fb,
                            simpson_rule(a, b, fa, fm, fb), tol, 40);
}

} // namespace

double lemma_bound(double t, double x, const MarketParams& params,
                   BoundVariant variant) {
    require_in_strip(t, x, params);
    const double ratio = std::log(std::fabs(params.K / x));
    if (ratio == 0.0)
        throw std::domain_error("lemma_bound: ln|K/x| must be nonzero");
    const double sig2T = params.sigma * params.sigma * params.T;
    const double denom = variant == BoundVariant::printed ? sig2T : 2.0 * sig2T;
    const double front = std::sqrt(2.0 / M_PI) * params.sigma *
                         std::fabs(params.K) * std::sqrt(params.T) / ratio;
    return front * std::exp(-ratio * ratio / denom);
}

BoundReport check_bound(const PricingEngine& engine, const MarketParams& params,
                        int n_t, int n_x) {
    params.validate();
    if (n_t < 1 || n_x < 2)
        throw std::invalid_argument("check_bound: lattice too small");
    if (!engine.value)
        throw std::invalid_argument("check_bound: engine has no value function");

    // Uniform in y = ln|K/x| over [0.05, 5]; y stays off 0 so the bound is
    // finite, and off the far tail where every engine underflows to zero.
    const double y_lo = 0.05, y_hi = 5.0;
    BoundReport report;
    report.worst_margin_printed = std::numeric_limits<double>::infinity();
    report.worst_margin_derivation = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_t; ++i) {
        const double t = params.T * i / n_t;
        for (int j = 0; j < n_x; ++j) {
            const double y = y_lo + (y_hi - y_lo) * j / (n_x - 1);
            const double x = params.K * std::exp(-y);
            BoundSample s;
            s.t = t;
            s.x = x;
            s.v = engine.value(t, x);
            s.bound_printed = lemma_bound(t, x, params, BoundVariant::printed);
            s.bound_derivation =
                lemma_bound(t, x, params, BoundVariant::derivation);
            const double tol = engine.tolerance ? engine.tolerance(t, x) : 0.0;
            s.margin_printed = s.bound_printed - s.v;
            s.margin_derivation = s.bound_derivation - s.v;
            s.violates_printed = s.margin_printed < -tol;
            s.violates_derivation = s.margin_derivation < -tol;
            report.violations_printed += s.violates_printed;
            report.violations_derivation += s.violates_derivation;
            report.worst_margin_printed =
                std::min(report.worst_margin_printed, s.margin_printed);
            report.worst_margin_derivation =
                std::min(report.worst_margin_derivation, s.margin_derivation);
            report.samples.push_back(s);
        }
    }
    return report;
}

namespace {

std::vector<double> checked_x0s(const MarketParams& params, double t0,
                                const std::vector<double>& x0s) {
    params.validate();
    if (params.K <= 0.0)
        throw std::invalid_argument("decay_profile: requires K > 0");
    if (!(t0 >= 0.0) || t0 >= params.T)
        throw std::domain_error("decay_profile: t0 must lie in [0, T)");
    if (x0s.empty())
        throw std::invalid_argument("decay_profile: empty x0 sequence");
    for (std::size_t i = 0; i < x0s.size(); ++i) {
        if (!(x0s[i] > 0.0 && x0s[i] < 2.0 * params.K / 3.0))
            throw std::domain_error("decay_profile: x0 outside (0, 2K/3)");
        if (i > 0 && !(x0s[i] < x0s[i - 1]))
            throw std::invalid_argument("decay_profile: x0 must decrease");
    }
    return x0s;
}

} // namespace

DecayProfile decay_profile(const std::function<double(double, double)>& v,
                           double t0, const MarketParams& params,
                           const std::vector<double>& x0s) {
    checked_x0s(params, t0, x0s);
    DecayProfile profile;
    profile.t0 = t0;
    const double ht = 1e-4 * params.T;
    for (double x0 : x0s) {
        const double h = x0 / 100.0;
        const double vm = v(t0, x0 - h), v0 = v(t0, x0), vp = v(t0, x0 + h);
        const double vx = (vp - vm) / (2.0 * h);
        const double vxx = (vp - 2.0 * v0 + vm) / (h * h);
        double vt;
        if (t0 >= ht && t0 + ht < params.T) {
            vt = (v(t0 + ht, x0) - v(t0 - ht, x0)) / (2.0 * ht);
        } else if (t0 < ht) {
            vt = (-3.0 * v0 + 4.0 * v(t0 + ht, x0) - v(t0 + 2.0 * ht, x0)) /
                 (2.0 * ht);
        } else {
            vt = (3.0 * v0 - 4.0 * v(t0 - ht, x0) + v(t0 - 2.0 * ht, x0)) /
                 (2.0 * ht);
        }
        profile.rows.push_back({x0, 0.5 * x0, x0 * std::fabs(vx),
                                x0 * x0 * std::fabs(vxx), std::fabs(vt)});
    }
    return profile;
}

DecayProfile decay_profile(const PDESolution& sol, double t0,
                           const std::vector<double>& x0s) {
    checked_x0s(sol.params, t0, x0s);
    DecayProfile profile;
    profile.t0 = t0;
    for (double x0 : x0s) {
        const DerivativeEstimate d = estimate_derivatives(sol, t0, x0);
        profile.rows.push_back({x0, 0.5 * x0, x0 * std::fabs(d.u_x),
                                x0 * x0 * std::fabs(d.u_xx), std::fabs(d.u_t)});
    }
    return profile;
}

double decay_envelope(double N, double x0) {
    const double l = std::log(x0);
    return N * std::exp(-l * l / N);
}

double fit_decay_envelope(const DecayProfile& profile,
                          const std::vector<std::size_t>& fit_rows) {
    if (fit_rows.empty())
        throw std::invalid_argument("fit_decay_envelope: no rows selected");
    double best = 0.0;
    for (std::size_t idx : fit_rows) {
        if (idx >= profile.rows.size())
            throw std::invalid_argument("fit_decay_envelope: row index out of range");
        const DecayRow& row = profile.rows[idx];
        const double target = row.x_vx + row.x2_vxx + row.vt;
        if (!(target > 0.0))
            continue;  // an exactly-zero row is satisfied by any envelope
        // decay_envelope is increasing in N for fixed x0 < 1, so bisect.
        double lo = 1e-8, hi = 1e8;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (decay_envelope(mid, row.x0) < target)
                lo = mid;
            else
                hi = mid;
        }
        best = std::max(best, hi);
    }
    return best;
}

int vanishing_region_check(const PricingEngine& engine,
                           const MarketParams& params, int n_samples) {
    params.validate();
    if (params.K <= 0.0)
        throw std::invalid_argument("vanishing_region_check: requires K > 0");
    if (n_samples < 2)
        throw std::invalid_argument("vanishing_region_check: need >= 2 samples");
    int violations = 0;
    for (int i = 0; i < n_samples; ++i) {
        const double x = -2.0 * params.K * i / (n_samples - 1);
        const double t = params.T * (i % 7) / 7.0;
        const double v = engine.value(t, x);
        const double tol = engine.tolerance ? engine.tolerance(t, x) : 0.0;
        if (std::fabs(v) > tol) ++violations;
    }
    return violations;
}

double gaussian_tail_check(const std::vector<double>& alpha_samples) {
    if (alpha_samples.empty())
        throw std::invalid_argument("gaussian_tail_check: no samples");
    double max_ratio = 0.0;
    for (double alpha : alpha_samples) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("gaussian_tail_check: alpha must be > 0");
        const double rhs = std::exp(-0.5 * alpha * alpha) / alpha;
        // The integrand is below e^{-(alpha+45)^2/2} past the cutoff, which
        // underflows for every representable ratio scale.
        const double lhs =
            integrate([](double x) { return std::exp(-0.5 * x * x); }, alpha,
                      alpha + 45.0, 1e-14 * rhs);
        if (lhs > rhs * (1.0 + 1e-12))
            throw std::runtime_error("gaussian_tail_check: inequality violated");
        max_ratio = std::max(max_ratio, lhs / rhs);
    }
    return max_ratio;
}

} // namespace vecer
