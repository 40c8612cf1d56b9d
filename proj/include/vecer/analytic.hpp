#pragma once

#include "vecer/market.hpp"

namespace vecer {

// E(x e^G - K)_+ with G ~ N(-sigma^2 tau / 2, sigma^2 tau), i.e. the
// undiscounted Black-Scholes call on a driftless geometric Brownian motion.
// Degenerate cases: K <= 0 gives x - K, x <= 0 < K gives 0, sigma*sqrt(tau)=0
// gives the payoff (x - K)_+.
double gbm_call(double x, double K, double sigma, double tau);

// Put by parity: gbm_put = gbm_call - x + K, exact in floating point by
// construction.
double gbm_put(double x, double K, double sigma, double tau);

// E(y e^G - kappa)_+ for arbitrary signs of y and kappa (same G as above).
// Covers the four sign quadrants; reduces to gbm_call when y, kappa > 0.
double lognormal_call(double y, double kappa, double sigma, double tau);

// Value of the reduced terminal problem with drift b identically zero:
//   v(t, x) = E (X_T - K)_+ restricted to the K > 0 branch convention,
// where X is the driftless exponential martingale started at x.
// For K < 0 this is E(K - X_T)_+ mapped through x -> -x, K -> -K.
double v_reduced(double t, double x, const MarketParams& params);

// u(t, x) for zero drift: equals v for K > 0 and x - K + v for K < 0.
// At t = T this reproduces the payoff (x - K)_+ exactly.
double u_reduced(double t, double x, const MarketParams& params);

} // namespace vecer
