#include "vecer/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vecer/normal.hpp"

namespace vecer {

double gbm_call(double x, double K, double sigma, double tau) {
    if (tau < 0.0 || !std::isfinite(tau))
        throw std::invalid_argument("gbm_call: tau must be nonnegative");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("gbm_call: sigma must be nonnegative");
    if (!std::isfinite(x) || !std::isfinite(K))
        throw std::invalid_argument("gbm_call: x and K must be finite");

    if (K <= 0.0) return x - K;  // payoff is linear, expectation is exact
    if (x <= 0.0) return 0.0;    // the exponential stays on x's side of zero
    const double s = sigma * std::sqrt(tau);
    if (s == 0.0) return std::max(x - K, 0.0);

    const double d1 = (std::log(x / K) + 0.5 * s * s) / s;
    const double d2 = d1 - s;
    return x * normal_cdf(d1) - K * normal_cdf(d2);
}

double gbm_put(double x, double K, double sigma, double tau) {
    return gbm_call(x, K, sigma, tau) - x + K;
}

double lognormal_call(double y, double kappa, double sigma, double tau) {
    if (y >= 0.0 && kappa <= 0.0) return y - kappa;
    if (y <= 0.0 && kappa >= 0.0) return 0.0;
    if (y > 0.0) return gbm_call(y, kappa, sigma, tau);
    // y < 0, kappa < 0: the payoff reads (|kappa| - |y| e^G)_+, a put struck
    // at |kappa|, which parity turns back into a call.
    return gbm_call(-y, -kappa, sigma, tau) + y - kappa;
}

static void check_reduced_args(double t, const MarketParams& params) {
    params.validate();
    if (!(t >= 0.0) || t > params.T)
        throw std::domain_error("reduced value: t outside [0, T]");
}

double v_reduced(double t, double x, const MarketParams& params) {
    check_reduced_args(t, params);
    const double tau = params.T - t;
    if (params.K > 0.0) return lognormal_call(x, params.K, params.sigma, tau);
    return lognormal_call(-x, -params.K, params.sigma, tau);
}

double u_reduced(double t, double x, const MarketParams& params) {
    check_reduced_args(t, params);
    const double v = v_reduced(t, x, params);
    if (params.K > 0.0) return v;
    return x - params.K + v;
}

} // namespace vecer
