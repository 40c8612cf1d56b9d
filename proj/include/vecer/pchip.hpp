#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vecer {

// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
// Monotone data yields a monotone interpolant, which keeps tabulated price
// curves free of quadrature-ringing overshoots between nodes.
class MonotoneCubic {
  public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("MonotoneCubic: nodes must increase");

        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }

        d_.assign(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d_.front() = edge_slope(h[0], n > 2 ? h[1] : h[0], delta[0],
                                n > 2 ? delta[1] : delta[0]);
        d_.back() = edge_slope(h[n - 2], n > 2 ? h[n - 3] : h[n - 2], delta[n - 2],
                               n > 2 ? delta[n - 3] : delta[n - 2]);
    }

    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }

    double operator()(double xq) const {
        if (xq < x_.front() || xq > x_.back())
            throw std::domain_error("MonotoneCubic: query outside node range");
        const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        const std::size_t i =
            std::min(x_.size() - 2,
                     static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - x_.begin() - 1)));
        const double h = x_[i + 1] - x_[i];
        const double s = (xq - x_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

  private:
    // One-sided three-point slope, clipped so the end interval stays monotone.
    static double edge_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0)
            d = 0.0;
        else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
            d = 3.0 * del0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

} // namespace vecer
