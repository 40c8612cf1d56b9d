#include "vecer/pde.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace vecer {

void SolverConfig::validate() const {
    if (!(theta >= 0.5 && theta <= 1.0))
        throw std::invalid_argument("SolverConfig: theta must lie in [1/2, 1]");
    if (rannacher_steps < 0)
        throw std::invalid_argument("SolverConfig: rannacher_steps must be >= 0");
    if (space_cells < 16)
        throw std::invalid_argument("SolverConfig: space_cells must be >= 16");
    if (time_steps < 4)
        throw std::invalid_argument("SolverConfig: time_steps must be >= 4");
    const bool lo = std::isfinite(x_min), hi = std::isfinite(x_max);
    if (lo != hi)
        throw std::invalid_argument("SolverConfig: override both bounds or neither");
    if (lo && !(x_min < x_max))
        throw std::invalid_argument("SolverConfig: x_min must be below x_max");
}

std::ptrdiff_t SpaceGrid::find_node(double value) const {
    const double span = nodes.back() - nodes.front();
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), value - 1e-13 * span);
    if (it != nodes.end() && std::fabs(*it - value) <= 1e-13 * span)
        return it - nodes.begin();
    return -1;
}

bool TimeGrid::contains(double t, double tol) const {
    for (double s : levels)
        if (std::fabs(s - t) <= tol) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Space grid construction
// ---------------------------------------------------------------------------

namespace {

constexpr double grade_ratio = 1.4;  // geometric growth of cell widths

// Cell widths for one segment.  Anchored ends start at their junction width
// and grow geometrically, capped at h0 between two anchors and at 8*h0 when
// running out toward a free truncation edge.  The two anchored half-profiles
// are interleaved by accumulated length so the middle cells stay comparable.
std::vector<double> segment_widths(double len, bool left_anchored,
                                   bool right_anchored, double wl, double wr,
                                   double h0) {
    std::vector<double> left, right;
    if (left_anchored && right_anchored) {
        double cl = wl, cr = wr, tot_l = 0.0, tot_r = 0.0;
        while (tot_l + tot_r < len) {
            if (tot_l <= tot_r) {
                left.push_back(cl);
                tot_l += cl;
                cl = std::min(cl * grade_ratio, h0);
            } else {
                right.push_back(cr);
                tot_r += cr;
                cr = std::min(cr * grade_ratio, h0);
            }
        }
        const double scale = len / (tot_l + tot_r);
        std::vector<double> w(std::move(left));
        for (std::size_t i = right.size(); i-- > 0;) w.push_back(right[i]);
        for (double& v : w) v *= scale;
        return w;
    }

    // One free end: a single ramp away from the anchor, allowed to coarsen
    // further in the far field.
    double c = left_anchored ? wl : wr;
    std::vector<double> w;
    double tot = 0.0;
    while (tot < len) {
        w.push_back(c);
        tot += c;
        c = std::min(c * grade_ratio, 8.0 * h0);
    }
    const double scale = len / tot;
    for (double& v : w) v *= scale;
    if (right_anchored) std::reverse(w.begin(), w.end());
    return w;
}

struct GradedPlan {
    std::vector<std::vector<double>> widths;  // per segment
    std::size_t cells = 0;
};

GradedPlan plan_grid(const std::vector<double>& pts, double h0) {
    // pts: x_min, anchors..., x_max.  Junction widths shrink for segments
    // narrower than the standard fine width so adjacent-cell ratios stay
    // bounded even when anchors crowd together.
    const std::size_t nseg = pts.size() - 1;
    std::vector<double> len(nseg);
    for (std::size_t i = 0; i < nseg; ++i) len[i] = pts[i + 1] - pts[i];

    const double h_fine = h0 / 4.0;
    std::vector<double> junction(pts.size(), h_fine);
    for (std::size_t j = 1; j + 1 < pts.size(); ++j)
        junction[j] = std::min({h_fine, len[j - 1] / 2.0, len[j] / 2.0});

    GradedPlan plan;
    plan.widths.resize(nseg);
    for (std::size_t i = 0; i < nseg; ++i) {
        const bool la = (i != 0), ra = (i + 1 != nseg);
        plan.widths[i] =
            segment_widths(len[i], la, ra, junction[i], junction[i + 1], h0);
        plan.cells += plan.widths[i].size();
    }
    return plan;
}

SpaceGrid assemble_grid(const std::vector<double>& pts, GradedPlan plan,
                        std::size_t target_cells) {
    // Split the widest cells until the budget is met exactly; splitting only
    // inserts midpoints, so anchors and ratio bounds are unaffected.
    while (plan.cells < target_cells) {
        std::size_t si = 0, sj = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < plan.widths.size(); ++i)
            for (std::size_t j = 0; j < plan.widths[i].size(); ++j)
                if (plan.widths[i][j] > best) {
                    best = plan.widths[i][j];
                    si = i;
                    sj = j;
                }
        plan.widths[si][sj] = best / 2.0;
        plan.widths[si].insert(plan.widths[si].begin() + sj, best / 2.0);
        ++plan.cells;
    }

    SpaceGrid grid;
    grid.nodes.reserve(plan.cells + 1);
    grid.nodes.push_back(pts.front());
    for (std::size_t i = 0; i < plan.widths.size(); ++i) {
        double pos = pts[i];
        for (std::size_t j = 0; j + 1 < plan.widths[i].size(); ++j) {
            pos += plan.widths[i][j];
            grid.nodes.push_back(pos);
        }
        grid.nodes.push_back(pts[i + 1]);  // land on the anchor exactly
    }
    return grid;
}

SpaceGrid build_space_grid(const std::vector<double>& pts, int target_cells) {
    // Find the coarsest base width whose plan fits the budget, then split to
    // hit it exactly.
    const double span = pts.back() - pts.front();
    double lo = span * 1e-9, hi = span;
    if (plan_grid(pts, hi).cells > static_cast<std::size_t>(target_cells))
        throw std::invalid_argument(
            "build_grids: space_cells too small for this anchor set");
    for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (plan_grid(pts, mid).cells <= static_cast<std::size_t>(target_cells))
            hi = mid;
        else
            lo = mid;
    }
    GradedPlan plan = plan_grid(pts, hi);
    return assemble_grid(pts, std::move(plan), static_cast<std::size_t>(target_cells));
}

std::vector<double> time_markers(const StepDrift& drift) {
    std::set<double> marks{0.0, drift.horizon()};
    for (double tb : drift.breakpoints())
        if (tb > 0.0 && tb < drift.horizon()) marks.insert(tb);
    return {marks.begin(), marks.end()};
}

} // namespace

std::pair<SpaceGrid, TimeGrid> build_grids(const MarketParams& params,
                                           const StepDrift& drift,
                                           const SolverConfig& cfg) {
    params.validate();
    cfg.validate();
    if (drift.horizon() != params.T)
        throw std::invalid_argument("build_grids: drift horizon must equal T");

    const double beta1 = drift.values().front();
    std::set<double> anchor_set{params.K};
    for (double v : drift.values()) anchor_set.insert(v);
    std::vector<double> anchors(anchor_set.begin(), anchor_set.end());

    double x_min = cfg.x_min, x_max = cfg.x_max;
    if (!std::isfinite(x_min)) {
        const double ref = std::max(std::fabs(params.K), beta1);
        const double margin =
            ref * (std::exp(6.0 * params.sigma * std::sqrt(params.T)) - 1.0);
        x_max = std::max({params.K, beta1, 0.0}) + margin;
        x_min = std::min(0.0, params.K) - margin;
    }
    for (double a : anchors)
        if (!(a > x_min && a < x_max))
            throw std::invalid_argument(
                "build_grids: truncation bounds exclude an anchor");

    std::vector<double> pts;
    pts.push_back(x_min);
    pts.insert(pts.end(), anchors.begin(), anchors.end());
    pts.push_back(x_max);

    SpaceGrid grid = build_space_grid(pts, cfg.space_cells);

    // Time levels: distribute the step budget over the spans between
    // breakpoints proportionally to span length, each span uniform.
    const std::vector<double> marks = time_markers(drift);
    const std::size_t nspan = marks.size() - 1;
    std::vector<long long> steps(nspan);
    long long total = 0;
    for (std::size_t i = 0; i < nspan; ++i) {
        steps[i] = std::max<long long>(
            1, std::llround(cfg.time_steps * (marks[i + 1] - marks[i]) / params.T));
        total += steps[i];
    }
    while (total > cfg.time_steps) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < nspan; ++i)
            if (steps[i] > steps[pick]) pick = i;
        if (steps[pick] <= 1) break;  // cannot shrink further, keep the extras
        --steps[pick];
        --total;
    }
    while (total < cfg.time_steps) {
        std::size_t pick = 0;
        double coarsest = 0.0;
        for (std::size_t i = 0; i < nspan; ++i) {
            const double h = (marks[i + 1] - marks[i]) / steps[i];
            if (h > coarsest) {
                coarsest = h;
                pick = i;
            }
        }
        ++steps[pick];
        ++total;
    }

    TimeGrid tg;
    tg.levels.reserve(static_cast<std::size_t>(total) + 1);
    for (std::size_t i = 0; i < nspan; ++i)
        for (long long s = 0; s < steps[i]; ++s)
            tg.levels.push_back(marks[i] + (marks[i + 1] - marks[i]) * s / steps[i]);
    tg.levels.push_back(params.T);
    std::reverse(tg.levels.begin(), tg.levels.end());

    return {std::move(grid), std::move(tg)};
}

TimeGrid misaligned_time_grid(const StepDrift& drift, int n_steps) {
    if (n_steps < 4)
        throw std::invalid_argument("misaligned_time_grid: need >= 4 steps");
    const double T = drift.horizon();
    int n = n_steps;
    for (;; ++n) {
        bool clash = false;
        for (double tb : drift.breakpoints()) {
            if (!(tb > 0.0 && tb < T)) continue;
            const double pos = tb / T * n;
            if (std::fabs(pos - std::llround(pos)) * T / n < 1e-9) clash = true;
        }
        if (!clash) break;
    }
    TimeGrid tg;
    tg.levels.reserve(n + 1);
    for (int i = n; i >= 0; --i) tg.levels.push_back(T * i / n);
    return tg;
}

// ---------------------------------------------------------------------------
// Backward sweep
// ---------------------------------------------------------------------------

PDESolution solve_backward_on(const StepDrift& drift, const MarketParams& params,
                              const SolverConfig& cfg, SpaceGrid grid,
                              TimeGrid times) {
    params.validate();
    cfg.validate();
    if (drift.horizon() != params.T)
        throw std::invalid_argument("solve_backward: drift horizon must equal T");
    const std::size_t n_nodes = grid.size();
    if (n_nodes < 5)
        throw std::invalid_argument("solve_backward: grid too small");
    if (times.levels.size() < 2 || times.levels.front() != params.T ||
        times.levels.back() != 0.0)
        throw std::invalid_argument("solve_backward: time grid must span [0, T]");

    PDESolution sol{std::move(grid), std::move(times), {}, drift, params};
    const std::vector<double>& xs = sol.grid.nodes;
    const std::size_t M = n_nodes - 1;

    // Nonuniform three-point second-difference coefficients (exact on
    // quadratics): u_xx ~ cm*u[j-1] - c0*u[j] + cp*u[j+1].
    std::vector<double> cm(n_nodes, 0.0), cp(n_nodes, 0.0);
    for (std::size_t j = 1; j < M; ++j) {
        const double hm = xs[j] - xs[j - 1], hp = xs[j + 1] - xs[j];
        cm[j] = 2.0 / (hm * (hm + hp));
        cp[j] = 2.0 / (hp * (hm + hp));
    }
    const double g0 = (xs[1] - xs[0]) / (xs[2] - xs[1]);
    const double gM = (xs[M] - xs[M - 1]) / (xs[M - 1] - xs[M - 2]);

    const std::size_t n_levels = sol.times.levels.size();
    sol.values.assign(n_levels * n_nodes, 0.0);
    for (std::size_t j = 0; j < n_nodes; ++j)
        sol.values[j] = std::max(xs[j] - params.K, 0.0);

    std::vector<double> low(n_nodes), diag(n_nodes), up(n_nodes), rhs(n_nodes),
        scratch(n_nodes);
    int damping = cfg.rannacher_steps;

    for (std::size_t lev = 1; lev < n_levels; ++lev) {
        const double s_prev = sol.times.levels[lev - 1];
        const double s_next = sol.times.levels[lev];
        const double dt = s_prev - s_next;
        const double beta = drift(s_prev);
        const double theta = damping > 0 ? 1.0 : cfg.theta;
        if (damping > 0) --damping;

        const double* u0 = &sol.values[(lev - 1) * n_nodes];
        double* u1 = &sol.values[lev * n_nodes];

        for (std::size_t j = 1; j < M; ++j) {
            const double a = 0.5 * params.sigma * params.sigma * (xs[j] - beta) *
                             (xs[j] - beta);
            const double c0 = cm[j] + cp[j];
            low[j] = -theta * dt * a * cm[j];
            diag[j] = 1.0 + theta * dt * a * c0;
            up[j] = -theta * dt * a * cp[j];
            rhs[j] = u0[j] + (1.0 - theta) * dt * a *
                                 (cm[j] * u0[j - 1] - c0 * u0[j] + cp[j] * u0[j + 1]);
        }
        // Fold the u_xx = 0 boundary rows (linear extrapolation of the ghost
        // values) into the first and last interior equations.
        diag[1] += low[1] * (1.0 + g0);
        up[1] -= low[1] * g0;
        low[1] = 0.0;
        diag[M - 1] += up[M - 1] * (1.0 + gM);
        low[M - 1] -= up[M - 1] * gM;
        up[M - 1] = 0.0;

        // Thomas elimination over the interior unknowns.
        scratch[1] = up[1] / diag[1];
        rhs[1] /= diag[1];
        for (std::size_t j = 2; j < M; ++j) {
            const double denom = diag[j] - low[j] * scratch[j - 1];
            if (denom == 0.0)
                throw std::runtime_error("solve_backward: singular tridiagonal row");
            scratch[j] = up[j] / denom;
            rhs[j] = (rhs[j] - low[j] * rhs[j - 1]) / denom;
        }
        u1[M - 1] = rhs[M - 1];
        for (std::size_t j = M - 1; j-- > 1;) u1[j] = rhs[j] - scratch[j] * u1[j + 1];
        u1[0] = (1.0 + g0) * u1[1] - g0 * u1[2];
        u1[M] = (1.0 + gM) * u1[M - 1] - gM * u1[M - 2];

        if (s_next > 0.0)
            for (double tb : drift.breakpoints())
                if (std::fabs(tb - s_next) <= 1e-12) damping = cfg.rannacher_steps;
    }
    return sol;
}

PDESolution solve_backward(const StepDrift& drift, const MarketParams& params,
                           const SolverConfig& cfg) {
    auto [grid, times] = build_grids(params, drift, cfg);
    return solve_backward_on(drift, params, cfg, std::move(grid), std::move(times));
}

// ---------------------------------------------------------------------------
// Accessors
// ---------------------------------------------------------------------------

namespace {

// Bracketing indices for descending time levels: levels[l] >= t >= levels[l+1].
std::size_t time_bracket(const std::vector<double>& levels, double t) {
    if (!(t >= levels.back()) || !(t <= levels.front()))
        throw std::domain_error("pde accessor: t outside solved range");
    std::size_t lo = 0, hi = levels.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (levels[mid] >= t)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::size_t space_bracket(const std::vector<double>& xs, double x) {
    if (!(x >= xs.front()) || !(x <= xs.back()))
        throw std::domain_error("pde accessor: x outside solved range");
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t idx = static_cast<std::size_t>(it - xs.begin());
    return std::min(std::max<std::size_t>(idx, 1), xs.size() - 1) - 1;
}

} // namespace

double get_u(const PDESolution& sol, double t, double x) {
    const std::size_t l = time_bracket(sol.times.levels, t);
    const std::size_t j = space_bracket(sol.grid.nodes, x);
    const double s_hi = sol.times.levels[l], s_lo = sol.times.levels[l + 1];
    const double wt = (s_hi == s_lo) ? 0.0 : (s_hi - t) / (s_hi - s_lo);
    const double x0 = sol.grid.nodes[j], x1 = sol.grid.nodes[j + 1];
    const double wx = (x - x0) / (x1 - x0);
    const double a = (1.0 - wx) * sol.at(l, j) + wx * sol.at(l, j + 1);
    const double b = (1.0 - wx) * sol.at(l + 1, j) + wx * sol.at(l + 1, j + 1);
    return (1.0 - wt) * a + wt * b;
}

DerivativeEstimate estimate_derivatives(const PDESolution& sol, double t,
                                        double x) {
    for (double tb : sol.drift.breakpoints())
        if (std::fabs(t - tb) <= 1e-12)
            throw std::domain_error(
                "estimate_derivatives: t sits on a drift breakpoint");

    const std::vector<double>& xs = sol.grid.nodes;
    const std::size_t j = space_bracket(xs, x);
    // Center the space stencil on the node nearest x; need one spare node
    // beyond it on each side.
    std::size_t c = (x - xs[j] <= xs[j + 1] - x) ? j : j + 1;
    if (c < 2 || c + 2 > xs.size() - 1)
        throw std::domain_error("estimate_derivatives: too close to a space edge");

    // Time levels strictly inside the same drift interval as t (interval
    // endpoints included: values are continuous there, slopes are one-sided).
    double int_lo = 0.0, int_hi = sol.params.T;
    for (double tb : sol.drift.breakpoints()) {
        if (tb < t && tb > int_lo) int_lo = tb;
        if (tb > t && tb < int_hi) int_hi = tb;
    }
    std::vector<std::size_t> lv;
    for (std::size_t l = 0; l < sol.times.levels.size(); ++l) {
        const double s = sol.times.levels[l];
        if (s >= int_lo - 1e-14 && s <= int_hi + 1e-14) lv.push_back(l);
    }
    std::sort(lv.begin(), lv.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(sol.times.levels[a] - t) < std::fabs(sol.times.levels[b] - t);
    });
    if (lv.size() < 3)
        throw std::domain_error(
            "estimate_derivatives: too few time levels between breakpoints");
    lv.resize(3);

    // u at the three stencil nodes, time-interpolated to t; and u at x for
    // each of the three chosen levels, space-interpolated.
    auto u_at = [&](double tt, std::size_t node) {
        const std::size_t l = time_bracket(sol.times.levels, tt);
        const double s_hi = sol.times.levels[l], s_lo = sol.times.levels[l + 1];
        const double wt = (s_hi == s_lo) ? 0.0 : (s_hi - tt) / (s_hi - s_lo);
        return (1.0 - wt) * sol.at(l, node) + wt * sol.at(l + 1, node);
    };
    const double xm = xs[c - 1], xc = xs[c], xp = xs[c + 1];
    const double um = u_at(t, c - 1), uc = u_at(t, c), up = u_at(t, c + 1);

    // Quadratic through the three space points, differentiated at x.
    const double d01 = (uc - um) / (xc - xm);
    const double d12 = (up - uc) / (xp - xc);
    const double second = (d12 - d01) / (xp - xm);  // half of u_xx
    DerivativeEstimate est;
    est.u_xx = 2.0 * second;
    est.u_x = d01 + second * (2.0 * x - xm - xc);

    // Quadratic through the three time levels at fixed x, differentiated at t.
    double ts[3], us[3];
    for (int i = 0; i < 3; ++i) {
        ts[i] = sol.times.levels[lv[i]];
        const double wx = (x - xs[j]) / (xs[j + 1] - xs[j]);
        us[i] = (1.0 - wx) * sol.at(lv[i], j) + wx * sol.at(lv[i], j + 1);
    }
    const double e01 = (us[1] - us[0]) / (ts[1] - ts[0]);
    const double e12 = (us[2] - us[1]) / (ts[2] - ts[1]);
    const double curv = (e12 - e01) / (ts[2] - ts[0]);
    est.u_t = e01 + curv * (2.0 * t - ts[0] - ts[1]);
    return est;
}

} // namespace vecer
