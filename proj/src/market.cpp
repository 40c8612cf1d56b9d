#include "vecer/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vecer {

void MarketParams::validate() const {
    if (!std::isfinite(r))
        throw std::invalid_argument("MarketParams: r must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("MarketParams: sigma must be positive");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("MarketParams: T must be positive");
    if (K == 0.0 || !std::isfinite(K))
        throw std::invalid_argument("MarketParams: K must be finite and nonzero");
}

namespace detail {

MeasureBase::MeasureBase(std::vector<PointMass> atoms,
                         std::optional<StepDensity> density, double horizon)
    : density_(std::move(density)), horizon_(horizon) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
        throw std::invalid_argument("measure: horizon must be positive");

    std::sort(atoms.begin(), atoms.end(),
              [](const PointMass& a, const PointMass& b) { return a.time < b.time; });
    for (const PointMass& a : atoms) {
        if (!std::isfinite(a.time) || !std::isfinite(a.mass))
            throw std::invalid_argument("measure: atom entries must be finite");
        if (a.time < 0.0 || a.time > horizon_)
            throw std::invalid_argument("measure: atom time outside [0, T]");
        if (!atoms_.empty() && a.time - atoms_.back().time < atom_merge_tol)
            atoms_.back().mass += a.mass;  // merge near-coincident sampling dates
        else
            atoms_.push_back(a);
    }

    if (density_) {
        const StepDensity& d = *density_;
        if (d.edges.size() < 2 || d.values.size() + 1 != d.edges.size())
            throw std::invalid_argument("measure: malformed density");
        if (d.edges.front() != 0.0 || d.edges.back() != horizon_)
            throw std::invalid_argument("measure: density must span [0, T]");
        for (std::size_t i = 0; i + 1 < d.edges.size(); ++i)
            if (!(d.edges[i] < d.edges[i + 1]))
                throw std::invalid_argument("measure: density edges must increase");
    }
}

double MeasureBase::density_integral(double a, double b) const {
    if (!density_ || b <= a) return 0.0;
    const StepDensity& d = *density_;
    double acc = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double lo = std::max(a, d.edges[i]);
        const double hi = std::min(b, d.edges[i + 1]);
        if (hi > lo) acc += d.values[i] * (hi - lo);
    }
    return acc;
}

double MeasureBase::mass_closed(double a, double b) const {
    double acc = density_integral(a, b);
    for (const PointMass& p : atoms_)
        if (p.time >= a && p.time <= b) acc += p.mass;
    return acc;
}

double MeasureBase::mass_left_open(double a, double b) const {
    double acc = density_integral(a, b);
    for (const PointMass& p : atoms_)
        if (p.time > a && p.time <= b) acc += p.mass;
    return acc;
}

} // namespace detail

WeightingMeasure::WeightingMeasure(std::vector<PointMass> atoms, double horizon)
    : WeightingMeasure(std::move(atoms), std::nullopt, horizon) {}

WeightingMeasure::WeightingMeasure(std::vector<PointMass> atoms,
                                   std::optional<StepDensity> density,
                                   double horizon)
    : MeasureBase(std::move(atoms), std::move(density), horizon) {
    for (const PointMass& a : atoms_) {
        if (!(a.mass > 0.0))
            throw std::invalid_argument("WeightingMeasure: atom masses must be positive");
        if (!(a.time > 0.0))
            throw std::invalid_argument("WeightingMeasure: atom times must be positive");
    }
    if (density_)
        for (double v : density_->values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("WeightingMeasure: density must be nonnegative");
    if (!(total_mass() > 0.0))
        throw std::invalid_argument("WeightingMeasure: total mass must be positive");
}

DividendMeasure::DividendMeasure(std::vector<PointMass> atoms, double horizon)
    : DividendMeasure(std::move(atoms), std::nullopt, horizon) {}

DividendMeasure::DividendMeasure(std::vector<PointMass> atoms,
                                 std::optional<StepDensity> density,
                                 double horizon)
    : MeasureBase(std::move(atoms), std::move(density), horizon) {
    for (const PointMass& a : atoms_)
        if (!(a.mass >= 0.0))
            throw std::invalid_argument("DividendMeasure: atom masses must be nonnegative");
    if (density_)
        for (double v : density_->values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("DividendMeasure: density must be nonnegative");
}

DividendMeasure DividendMeasure::zero(double horizon) {
    return DividendMeasure({}, std::nullopt, horizon);
}

StepDrift::StepDrift(std::vector<double> breakpoints, std::vector<double> values,
                     double horizon)
    : breaks_(std::move(breakpoints)), values_(std::move(values)),
      horizon_(horizon) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
        throw std::invalid_argument("StepDrift: horizon must be positive");
    if (values_.size() != breaks_.size() + 1)
        throw std::invalid_argument("StepDrift: need one more value than breakpoints");
    if (values_.back() != 0.0)
        throw std::invalid_argument("StepDrift: trailing value must be zero");
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        if (!(breaks_[i] > 0.0) || breaks_[i] > horizon_)
            throw std::invalid_argument("StepDrift: breakpoints must lie in (0, T]");
        if (i > 0 && !(breaks_[i] > breaks_[i - 1]))
            throw std::invalid_argument("StepDrift: breakpoints must strictly increase");
        if (!(values_[i] > values_[i + 1]))
            throw std::invalid_argument("StepDrift: values must strictly decrease to zero");
    }
}

StepDrift StepDrift::zero(double horizon) {
    return StepDrift({}, {0.0}, horizon);
}

double StepDrift::operator()(double t) const {
    if (!(t >= 0.0) || t > horizon_)
        throw std::domain_error("StepDrift: t outside [0, T]");
    const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
    return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double eval_b(const StepDrift& b, double t) { return b(t); }

double compute_q(const MarketParams& params, const DividendMeasure& nu,
                 const WeightingMeasure& mu, double t) {
    params.validate();
    if (nu.horizon() != params.T || mu.horizon() != params.T)
        throw std::invalid_argument("compute_q: measure horizons must equal T");
    if (!(t >= 0.0) || t > params.T)
        throw std::domain_error("compute_q: t outside [0, T]");

    const double T = params.T;
    auto growth = [&](double s) {
        // exp(-r (T-s) + nu([s, T])), the forward factor applied to a unit of
        // weight collected at time s
        return std::exp(-params.r * (T - s) + nu.mass_closed(s, T));
    };

    double acc = 0.0;
    for (const PointMass& a : mu.atoms())
        if (a.time >= t) acc += a.mass * growth(a.time);

    if (mu.density() && t < T) {
        // Composite Simpson on the density part; 2^10 panels keeps the
        // quadrature error far below the atom contributions at any t.
        const StepDensity& d = *mu.density();
        auto rho = [&](double s) {
            auto it = std::upper_bound(d.edges.begin(), d.edges.end(), s);
            std::size_t idx = static_cast<std::size_t>(it - d.edges.begin());
            if (idx == 0) return d.values.front();
            if (idx > d.values.size()) idx = d.values.size();
            return d.values[idx - 1];
        };
        const int panels = 1 << 10;
        const double h = (T - t) / panels;
        double sum = rho(t) * growth(t) + rho(T) * growth(T);
        for (int i = 1; i < panels; ++i) {
            const double s = t + i * h;
            sum += (i % 2 ? 4.0 : 2.0) * rho(s) * growth(s);
        }
        acc += sum * h / 3.0;
    }

    return std::exp(-nu.mass_left_open(t, T)) * acc;
}

StepDrift compute_b(const MarketParams& params, const DividendMeasure& nu,
                    const WeightingMeasure& mu) {
    params.validate();
    if (nu.horizon() != params.T || mu.horizon() != params.T)
        throw std::invalid_argument("compute_b: measure horizons must equal T");
    if (mu.density()) {
        for (double v : mu.density()->values)
            if (v > 0.0)
                throw std::invalid_argument(
                    "compute_b: weighting measure must be purely atomic");
    }
    if (mu.atoms().empty())
        throw std::invalid_argument("compute_b: weighting measure has no atoms");

    const double T = params.T;
    const double nu_total = nu.mass_closed(0.0, T);
    const std::size_t k = mu.atoms().size();

    std::vector<double> breaks(k), values(k + 1, 0.0);
    double suffix = 0.0;
    for (std::size_t i = k; i-- > 0;) {
        const PointMass& a = mu.atoms()[i];
        suffix += a.mass * std::exp(-params.r * (T - a.time) + nu.mass_closed(a.time, T));
        breaks[i] = a.time;
        values[i] = std::exp(-nu_total) * suffix;
    }
    return StepDrift(std::move(breaks), std::move(values), T);
}

} // namespace vecer
