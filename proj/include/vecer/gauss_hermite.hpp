#pragma once

#include <vector>

namespace vecer {

// Nodes and weights for integrals of the form
//   int_{-inf}^{inf} e^{-y^2} f(y) dy  ~=  sum_i w[i] f(y[i]).
// Nodes come out in ascending order; weights sum to sqrt(pi).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Computes the order-n rule by Newton iteration on the orthonormal Hermite
// recurrence.  n must be at least 2; orders up to a few hundred stay stable.
GaussHermiteRule gauss_hermite(int n);

} // namespace vecer
