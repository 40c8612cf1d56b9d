#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "vecer/market.hpp"

namespace vecer {

struct SolverConfig {
    double theta = 0.5;        // in [1/2, 1]; 1/2 = Crank-Nicolson
    int rannacher_steps = 4;   // implicit startup steps after T and each breakpoint
    int space_cells = 512;     // M: number of cells (M+1 nodes)
    int time_steps = 512;      // N: number of backward steps
    // Truncation overrides; NaN selects the automatic 6-standard-deviation box.
    double x_min = std::numeric_limits<double>::quiet_NaN();
    double x_max = std::numeric_limits<double>::quiet_NaN();

    void validate() const;
};

// Strictly increasing nodes containing the strike and every drift level
// exactly, with geometric clustering (factor 4) toward those anchors and
// adjacent-cell ratios kept within 4.
struct SpaceGrid {
    std::vector<double> nodes;

    std::size_t size() const { return nodes.size(); }
    // Index of the node equal to `value`, if present within 1e-13 relative.
    std::ptrdiff_t find_node(double value) const;
};

// Backward time levels T = s_0 > s_1 > ... > s_N = 0.
struct TimeGrid {
    std::vector<double> levels;

    std::size_t steps() const { return levels.size() - 1; }
    bool contains(double t, double tol = 1e-12) const;
};

std::pair<SpaceGrid, TimeGrid> build_grids(const MarketParams& params,
                                           const StepDrift& drift,
                                           const SolverConfig& cfg);

// Uniform backward grid whose interior levels avoid every drift breakpoint
// (steps are added until no breakpoint sits within 1e-9 of a level).  Used by
// the alignment study; deliberately violates the breakpoint-containment rule.
TimeGrid misaligned_time_grid(const StepDrift& drift, int n_steps);

struct PDESolution {
    SpaceGrid grid;
    TimeGrid times;
    std::vector<double> values;  // row-major: level index * grid.size() + node
    StepDrift drift;
    MarketParams params;

    double at(std::size_t level, std::size_t node) const {
        return values[level * grid.size() + node];
    }
};

// Backward theta-scheme sweep of u_t + (1/2) sigma^2 (x - b(t))^2 u_xx = 0
// from the terminal payoff (x - K)_+.  Nodes sitting exactly on the current
// drift level have zero diffusion coefficient and stay frozen across the
// step; boundary rows impose u_xx = 0 by linear extrapolation.
PDESolution solve_backward(const StepDrift& drift, const MarketParams& params,
                           const SolverConfig& cfg);

// Same sweep on caller-supplied grids (convergence and alignment studies).
PDESolution solve_backward_on(const StepDrift& drift, const MarketParams& params,
                              const SolverConfig& cfg, SpaceGrid grid,
                              TimeGrid times);

// Bilinear interpolation; exact at grid points.
double get_u(const PDESolution& sol, double t, double x);

struct DerivativeEstimate {
    double u_x = 0.0;
    double u_xx = 0.0;
    double u_t = 0.0;
};

// Finite-difference derivatives at (t, x): second-order nonuniform stencils
// in x, a quadratic fit through time levels on one side of t for u_t.
// Rejects queries nearer than two nodes to a space edge and times within
// 1e-12 of a drift breakpoint (u_t may jump there).
DerivativeEstimate estimate_derivatives(const PDESolution& sol, double t,
                                        double x);

} // namespace vecer
