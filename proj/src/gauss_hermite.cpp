#include "vecer/gauss_hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace vecer {

GaussHermiteRule gauss_hermite(int n) {
    if (n < 2)
        throw std::invalid_argument("gauss_hermite: order must be at least 2");

    const double pi_quarter_inv = 0.7511255444649424828587;  // pi^(-1/4)
    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        // Stroud/Secrest starting guesses, walking inward from the largest root.
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.nodes[n - 1];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.nodes[n - 2];
        else
            z = 2.0 * z - rule.nodes[n - i + 1];

        double pp = 0.0;
        for (int iter = 0; iter < 60; ++iter) {
            double p1 = pi_quarter_inv, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) <= 1e-14 * std::max(1.0, std::fabs(z))) break;
        }

        rule.nodes[n - 1 - i] = z;   // positive half, descending fill from the top
        rule.nodes[i] = -z;
        rule.weights[n - 1 - i] = 2.0 / (pp * pp);
        rule.weights[i] = rule.weights[n - 1 - i];
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // clean up the symmetric midpoint
    return rule;
}

} // namespace vecer
