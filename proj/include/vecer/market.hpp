#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace vecer {

// Global contract inputs.  sigma and T are required positive; r may take any
// sign; K may take any sign except exactly zero (the reduced problem is not
// defined there).
struct MarketParams {
    double r = 0.0;      // short rate
    double sigma = 0.0;  // volatility, > 0
    double T = 0.0;      // maturity, > 0
    double K = 0.0;      // strike of the reduced payoff, != 0

    void validate() const;
};

// One atom of a discrete measure on the time axis.
struct PointMass {
    double time = 0.0;
    double mass = 0.0;
};

// Piecewise-constant density on [0, T]: value[i] applies on
// [edge[i], edge[i+1]).  Edges must start at 0, end at T, strictly increase.
struct StepDensity {
    std::vector<double> edges;
    std::vector<double> values;
};

namespace detail {

// Shared storage for a finite measure with atoms plus an optional
// piecewise-constant density part.  Atoms are kept sorted; atoms closer than
// the merge tolerance are combined so downstream breakpoint lists stay
// strictly increasing.
class MeasureBase {
  public:
    static constexpr double atom_merge_tol = 1e-12;

    const std::vector<PointMass>& atoms() const { return atoms_; }
    const std::optional<StepDensity>& density() const { return density_; }
    double horizon() const { return horizon_; }

    // nu([a, b]): atoms in the closed interval plus the density integral.
    double mass_closed(double a, double b) const;
    // nu((a, b]): same but excluding an atom sitting exactly at a.
    double mass_left_open(double a, double b) const;
    double total_mass() const { return mass_closed(0.0, horizon_); }

  protected:
    MeasureBase(std::vector<PointMass> atoms, std::optional<StepDensity> density,
                double horizon);

    std::vector<PointMass> atoms_;
    std::optional<StepDensity> density_;
    double horizon_ = 0.0;

  private:
    double density_integral(double a, double b) const;
};

} // namespace detail

// Averaging weights mu: atom masses strictly positive, atom times in (0, T],
// density nonnegative, total mass strictly positive.
class WeightingMeasure : public detail::MeasureBase {
  public:
    WeightingMeasure(std::vector<PointMass> atoms, double horizon);
    WeightingMeasure(std::vector<PointMass> atoms,
                     std::optional<StepDensity> density, double horizon);
};

// Dividend measure nu: like the weighting measure but masses may be zero,
// atoms may sit at time 0, and the measure may vanish identically.
class DividendMeasure : public detail::MeasureBase {
  public:
    DividendMeasure(std::vector<PointMass> atoms, double horizon);
    DividendMeasure(std::vector<PointMass> atoms,
                    std::optional<StepDensity> density, double horizon);
    static DividendMeasure zero(double horizon);
};

// Left-continuous step function b(t) with breakpoints t_1 < ... < t_k <= T and
// values beta_1 > ... > beta_k > 0, constant beta_i on (t_{i-1}, t_i] and zero
// after t_k.  This is the drift target of the reduced state process.
class StepDrift {
  public:
    // values must have size breakpoints.size() + 1 with a trailing zero.
    StepDrift(std::vector<double> breakpoints, std::vector<double> values,
              double horizon);
    static StepDrift zero(double horizon);

    double operator()(double t) const;  // b(t), valid on [0, T]
    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& values() const { return values_; }
    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return breaks_.size(); }

  private:
    std::vector<double> breaks_;
    std::vector<double> values_;  // size breaks_.size() + 1, last entry 0
    double horizon_ = 0.0;
};

// Discounted dividend-adjusted average of the remaining weight:
//   q(t) = exp(-nu((t,T])) * integral over [t,T] of
//          exp(-r (T-s) + nu([s,T])) dmu(s).
double compute_q(const MarketParams& params, const DividendMeasure& nu,
                 const WeightingMeasure& mu, double t);

// Collapse b(t) = exp(-nu([0,t])) q(t) to its explicit step form.  Requires a
// purely atomic mu; a density part would make b continuous rather than a step
// function.
StepDrift compute_b(const MarketParams& params, const DividendMeasure& nu,
                    const WeightingMeasure& mu);

// Convenience free-function form of StepDrift::operator().
double eval_b(const StepDrift& b, double t);

} // namespace vecer
