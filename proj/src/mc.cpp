#include "vecer/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vecer/rng.hpp"

namespace vecer {

void PathConfig::validate() const {
    if (n_paths < 1)
        throw std::invalid_argument("PathConfig: n_paths must be positive");
    if (scheme == Scheme::euler && euler_substeps < 1)
        throw std::invalid_argument("PathConfig: euler_substeps must be positive");
    if (antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("PathConfig: antithetic needs an even n_paths");
}

namespace {

struct Leg {
    double dt;
    double beta;
};

// Spans of constant drift between t and T, each carrying its drift level.
std::vector<Leg> build_legs(double t, const StepDrift& drift) {
    const double T = drift.horizon();
    if (!(t >= 0.0) || t > T)
        throw std::domain_error("simulate: t outside [0, T]");
    std::vector<Leg> legs;
    double prev = t;
    for (double tb : drift.breakpoints())
        if (tb > t && tb < T) {
            legs.push_back({tb - prev, drift(tb)});
            prev = tb;
        }
    if (T > prev) legs.push_back({T - prev, drift(T)});
    return legs;
}

double terminal_one_path(double x, const std::vector<Leg>& legs, double sigma,
                         std::uint64_t seed, std::uint64_t ctr_path, bool negate,
                         Scheme scheme, int substeps) {
    double X = x;
    std::uint64_t draw = 0;
    for (const Leg& leg : legs) {
        if (scheme == Scheme::exact_piecewise) {
            double z = normal_draw(seed, ctr_path, draw++);
            if (negate) z = -z;
            const double s = sigma * std::sqrt(leg.dt);
            X = leg.beta + (X - leg.beta) * std::exp(s * z - 0.5 * s * s);
        } else {
            const double h = leg.dt / substeps;
            const double sh = sigma * std::sqrt(h);
            for (int k = 0; k < substeps; ++k) {
                double z = normal_draw(seed, ctr_path, draw++);
                if (negate) z = -z;
                X += (X - leg.beta) * sh * z;
            }
        }
    }
    return X;
}

// Running mean / second central moment (Welford), mergeable in a fixed order.
struct Moments {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const long long nt = n + o.n;
        mean += d * o.n / nt;
        m2 += o.m2 + d * d * (static_cast<double>(n) * o.n / nt);
        n = nt;
    }
};

MCEstimate finish(const Moments& m, long long paths) {
    MCEstimate e;
    e.mean = m.mean;
    e.std_error = m.n > 1 ? std::sqrt(m.m2 / (m.n - 1) / m.n) : 0.0;
    e.n_paths = paths;
    return e;
}

constexpr long long chunk_size = 8192;

// Sample index -> value, where a "sample" is one path, or one antithetic pair
// averaged, so the standard error reflects the variance actually realised.
template <class F>
MCEstimate reduce_samples(long long n_samples, long long n_paths, F&& value) {
    const long long n_chunks = (n_samples + chunk_size - 1) / chunk_size;
    std::vector<Moments> partial(static_cast<std::size_t>(n_chunks));
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < n_chunks; ++c) {
        Moments m;
        const long long lo = c * chunk_size;
        const long long hi = std::min(n_samples, lo + chunk_size);
        for (long long i = lo; i < hi; ++i) m.add(value(i));
        partial[static_cast<std::size_t>(c)] = m;
    }
    Moments total;
    for (const Moments& m : partial) total.merge(m);  // fixed chunk order
    return finish(total, n_paths);
}

template <class Payoff>
MCEstimate run_engine(double t, double x, const StepDrift& drift, double sigma,
                      const PathConfig& cfg, Payoff&& payoff) {
    cfg.validate();
    const std::vector<Leg> legs = build_legs(t, drift);
    auto one = [&](std::uint64_t ctr, bool neg) {
        return payoff(terminal_one_path(x, legs, sigma, cfg.seed, ctr, neg,
                                        cfg.scheme, cfg.euler_substeps));
    };
    if (!cfg.antithetic)
        return reduce_samples(cfg.n_paths, cfg.n_paths,
                              [&](long long i) { return one(i, false); });
    return reduce_samples(cfg.n_paths / 2, cfg.n_paths, [&](long long i) {
        return 0.5 * (one(i, false) + one(i, true));
    });
}

template <class Payoff>
MCEstimate run_reference(double t, double x, const StepDrift& drift, double sigma,
                         const PathConfig& cfg, Payoff&& payoff) {
    cfg.validate();
    const std::vector<Leg> legs = build_legs(t, drift);
    auto one = [&](std::uint64_t ctr, bool neg) {
        return payoff(terminal_one_path(x, legs, sigma, cfg.seed, ctr, neg,
                                        cfg.scheme, cfg.euler_substeps));
    };
    Moments m;
    if (!cfg.antithetic) {
        for (long long i = 0; i < cfg.n_paths; ++i) m.add(one(i, false));
    } else {
        for (long long i = 0; i < cfg.n_paths / 2; ++i)
            m.add(0.5 * (one(i, false) + one(i, true)));
    }
    return finish(m, cfg.n_paths);
}

} // namespace

std::vector<double> simulate_terminal(double t, double x, const StepDrift& drift,
                                      double sigma, double T,
                                      const PathConfig& cfg) {
    cfg.validate();
    if (!(sigma >= 0.0))
        throw std::invalid_argument("simulate_terminal: sigma must be nonnegative");
    if (drift.horizon() != T)
        throw std::invalid_argument("simulate_terminal: drift horizon must equal T");
    const std::vector<Leg> legs = build_legs(t, drift);
    std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < cfg.n_paths; ++p) {
        const std::uint64_t ctr = cfg.antithetic ? p / 2 : p;
        const bool neg = cfg.antithetic && (p % 2 == 1);
        out[static_cast<std::size_t>(p)] = terminal_one_path(
            x, legs, sigma, cfg.seed, ctr, neg, cfg.scheme, cfg.euler_substeps);
    }
    return out;
}

MCEstimate price_mc(double t, double x, const StepDrift& drift,
                    const MarketParams& params, const PathConfig& cfg) {
    params.validate();
    if (drift.horizon() != params.T)
        throw std::invalid_argument("price_mc: drift horizon must equal T");
    const double K = params.K;
    return run_engine(t, x, drift, params.sigma, cfg,
                      [K](double xT) { return std::max(xT - K, 0.0); });
}

MCEstimate martingale_residual(double t, double x, const StepDrift& drift,
                               double sigma, double T, const PathConfig& cfg) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("martingale_residual: sigma must be nonnegative");
    if (drift.horizon() != T)
        throw std::invalid_argument("martingale_residual: drift horizon must equal T");
    return run_engine(t, x, drift, sigma, cfg,
                      [x](double xT) { return xT - x; });
}

namespace reference {

MCEstimate price_mc(double t, double x, const StepDrift& drift,
                    const MarketParams& params, const PathConfig& cfg) {
    params.validate();
    if (drift.horizon() != params.T)
        throw std::invalid_argument("price_mc: drift horizon must equal T");
    const double K = params.K;
    return run_reference(t, x, drift, params.sigma, cfg,
                         [K](double xT) { return std::max(xT - K, 0.0); });
}

MCEstimate martingale_residual(double t, double x, const StepDrift& drift,
                               double sigma, double T, const PathConfig& cfg) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("martingale_residual: sigma must be nonnegative");
    if (drift.horizon() != T)
        throw std::invalid_argument("martingale_residual: drift horizon must equal T");
    return run_reference(t, x, drift, sigma, cfg,
                         [x](double xT) { return xT - x; });
}

} // namespace reference

} // namespace vecer
