#include "vecer/reporting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include "vecer/analytic.hpp"

namespace vecer {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
            .count();
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// The closed form covers exactly the drifts that are constant on all of
// [0, T]: no atoms at all, or a single atom sitting at maturity.
std::optional<double> constant_drift_level(const StepDrift& drift) {
    if (drift.breakpoints().empty()) return 0.0;
    if (drift.n_steps() == 1 &&
        std::fabs(drift.breakpoints()[0] - drift.horizon()) <=
            1e-12 * std::max(1.0, drift.horizon()))
        return drift.values()[0];
    return std::nullopt;
}

bool uses(const RunConfig& cfg, EngineKind kind) {
    return std::find(cfg.engines.begin(), cfg.engines.end(), kind) !=
           cfg.engines.end();
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

} // namespace

PriceReport run_price(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const StepDrift drift = cfg.make_drift();
    const MarketParams& mk = cfg.market;
    PriceReport rep;

    const double k_tol = 1e-12 * std::max(1.0, std::fabs(mk.K));
    if (std::fabs(drift(mk.T) - mk.K) <= k_tol) {
        rep.degenerate_terminal = true;
        const std::vector<double>& vals = drift.values();
        for (std::size_t i = 0; i < vals.size(); ++i)
            if (std::fabs(vals[i] - mk.K) <= k_tol) {
                rep.t_prime = i == 0 ? 0.0 : drift.breakpoints()[i - 1];
                break;
            }
    }

    for (EngineKind kind : cfg.engines) {
        EngineResult res;
        res.kind = kind;
        Timer timer;
        try {
            switch (kind) {
                case EngineKind::analytic: {
                    const std::optional<double> level = constant_drift_level(drift);
                    if (!level)
                        throw std::runtime_error(
                            "analytic engine needs a constant drift (no "
                            "sampling atoms before maturity); use cascade, mc "
                            "or pde");
                    res.price = lognormal_call(cfg.x0 - *level, mk.K - *level,
                                               mk.sigma, mk.T);
                    break;
                }
                case EngineKind::cascade:
                    res.price =
                        cascade_price(0.0, cfg.x0, drift, mk, cfg.cascade);
                    break;
                case EngineKind::mc: {
                    const MCEstimate est =
                        price_mc(0.0, cfg.x0, drift, mk, cfg.mc);
                    res.price = est.mean;
                    res.std_error = est.std_error;
                    res.n_paths = est.n_paths;
                    break;
                }
                case EngineKind::pde: {
                    const PDESolution sol = solve_backward(drift, mk, cfg.pde);
                    res.price = get_u(sol, 0.0, cfg.x0);
                    break;
                }
            }
        } catch (const std::exception& ex) {
            res.error = ex.what();
            rep.pass = false;
        }
        res.seconds = timer.elapsed();
        rep.engines.push_back(res);
    }

    for (std::size_t i = 0; i < rep.engines.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.engines.size(); ++j) {
            const EngineResult& a = rep.engines[i];
            const EngineResult& b = rep.engines[j];
            if (!a.error.empty() || !b.error.empty()) continue;
            Disagreement d;
            d.a = a.kind;
            d.b = b.kind;
            d.abs_diff = std::fabs(a.price - b.price);
            const double se = a.std_error + b.std_error;
            d.tol = se > 0.0 ? 3.0 * se
                             : 0.01 * std::max({std::fabs(a.price),
                                                std::fabs(b.price), 1e-12});
            d.pass = d.abs_diff <= d.tol;
            rep.pass = rep.pass && d.pass;
            rep.disagreements.push_back(d);
        }
    }

    std::string csv = "engine,price,std_error,n_paths\n";
    for (const EngineResult& res : rep.engines) {
        csv += engine_name(res.kind);
        csv += ',';
        if (res.error.empty()) csv += fmt(res.price);
        csv += ',';
        if (res.error.empty() && res.kind == EngineKind::mc)
            csv += fmt(res.std_error);
        csv += ',';
        if (res.error.empty() && res.kind == EngineKind::mc)
            csv += std::to_string(res.n_paths);
        csv += '\n';
    }
    write_file(fs::path(out_dir) / "price.csv", csv);

    std::ostringstream sum;
    sum << "price run\n";
    sum << "query u(0, " << fmt(cfg.x0) << ") with sigma=" << fmt(mk.sigma)
        << " r=" << fmt(mk.r) << " T=" << fmt(mk.T) << " K=" << fmt(mk.K)
        << ", " << cfg.sampling_atoms.size() << " sampling atom(s)\n";
    if (rep.degenerate_terminal)
        sum << "warning: the strike equals the terminal drift level b(T); on "
               "the final\n  sampling interval the value function reduces to "
               "the payoff (x - K)+,\n  starting at T' = "
            << fmt(rep.t_prime) << "\n";
    sum << "\nengines:\n";
    for (const EngineResult& res : rep.engines) {
        sum << "  " << engine_name(res.kind) << ": ";
        if (!res.error.empty()) {
            sum << "FAILED (" << res.error << ")";
        } else {
            sum << "price = " << fmt(res.price);
            if (res.kind == EngineKind::mc)
                sum << ", std_error = " << fmt(res.std_error)
                    << ", paths = " << res.n_paths;
        }
        sum << "  [" << fmt(res.seconds) << " s]\n";
    }
    if (!rep.disagreements.empty()) {
        sum << "\ncross-checks:\n";
        for (const Disagreement& d : rep.disagreements)
            sum << "  " << engine_name(d.a) << " vs " << engine_name(d.b)
                << ": |diff| = " << fmt(d.abs_diff) << ", tol = " << fmt(d.tol)
                << " -> " << verdict(d.pass) << "\n";
    }
    sum << "\noverall: " << verdict(rep.pass) << "\n";
    write_file(fs::path(out_dir) / "summary.txt", sum.str());
    return rep;
}

ConvergenceReport run_convergence(const RunConfig& cfg,
                                  const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (!uses(cfg, EngineKind::pde))
        throw ConfigError(
            {"the converge verb requires the pde engine in [engines] use"});
    const StepDrift drift = cfg.make_drift();
    const MarketParams& mk = cfg.market;
    ConvergenceReport rep;

    Timer ref_timer;
    rep.reference = cascade_price(0.0, cfg.x0, drift, mk, cfg.cascade);
    const double ref_seconds = ref_timer.elapsed();

    const int resolutions[] = {64, 128, 256, 512};
    Timer solve_timer;
    for (int n : resolutions) {
        SolverConfig sc = cfg.pde;
        sc.space_cells = n;
        sc.time_steps = n;
        auto [sg, tg] = build_grids(mk, drift, sc);
        const TimeGrid mg = misaligned_time_grid(drift, n);

        const PDESolution a_sol = solve_backward_on(drift, mk, sc, sg, tg);
        const PDESolution m_sol = solve_backward_on(drift, mk, sc, sg, mg);
        const double pa = get_u(a_sol, 0.0, cfg.x0);
        const double pm = get_u(m_sol, 0.0, cfg.x0);
        const double scale = std::max(std::fabs(rep.reference), 1e-300);
        rep.aligned.push_back({static_cast<int>(tg.steps()), n, pa,
                               std::fabs(pa - rep.reference),
                               std::fabs(pa - rep.reference) / scale});
        rep.misaligned.push_back({static_cast<int>(mg.steps()), n, pm,
                                  std::fabs(pm - rep.reference),
                                  std::fabs(pm - rep.reference) / scale});
    }
    const double solve_seconds = solve_timer.elapsed();

    for (std::size_t i = 0; i < rep.aligned.size(); ++i) {
        const double ae = rep.aligned[i].abs_error;
        const double me = rep.misaligned[i].abs_error;
        if (ae > me * (1.0 + 1e-12) + 1e-15) rep.aligned_never_worse = false;
        if (ae < me) ++rep.strictly_better;
    }
    rep.pass = rep.aligned_never_worse && rep.aligned.back().rel_error <= 0.01;

    auto table_csv = [](const std::vector<ConvergenceRow>& rows) {
        std::string csv = "n_time,n_space,price,abs_error,rel_error\n";
        for (const ConvergenceRow& r : rows)
            csv += std::to_string(r.n_time) + "," + std::to_string(r.n_space) +
                   "," + fmt(r.price) + "," + fmt(r.abs_error) + "," +
                   fmt(r.rel_error) + "\n";
        return csv;
    };
    write_file(fs::path(out_dir) / "convergence_aligned.csv",
               table_csv(rep.aligned));
    write_file(fs::path(out_dir) / "convergence_misaligned.csv",
               table_csv(rep.misaligned));

    std::ostringstream sum;
    sum << "convergence run\n";
    sum << "reference price (semi-analytic) u(0, " << fmt(cfg.x0)
        << ") = " << fmt(rep.reference) << "  [" << fmt(ref_seconds) << " s]\n";
    sum << "\n  resolution   aligned rel. error   misaligned rel. error\n";
    for (std::size_t i = 0; i < rep.aligned.size(); ++i) {
        char line[128];
        std::snprintf(line, sizeof line, "  %5dx%-5d  %-19.6g  %-19.6g\n",
                      rep.aligned[i].n_space, rep.aligned[i].n_time,
                      rep.aligned[i].rel_error, rep.misaligned[i].rel_error);
        sum << line;
    }
    sum << "\nbreakpoint-aligned time grids never worse: "
        << (rep.aligned_never_worse ? "yes" : "NO") << "\n";
    sum << "strictly better at " << rep.strictly_better << " of "
        << rep.aligned.size() << " resolutions\n";
    sum << "finest aligned relative error " << fmt(rep.aligned.back().rel_error)
        << " (tolerance 0.01)\n";
    sum << "total solve time " << fmt(solve_seconds) << " s\n";
    sum << "\noverall: " << verdict(rep.pass) << "\n";
    write_file(fs::path(out_dir) / "summary.txt", sum.str());
    return rep;
}

VerifyReport run_verify(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const MarketParams& mk = cfg.market;
    VerifyReport rep;
    rep.mirrored = mk.K < 0.0;
    MarketParams pm = mk;
    pm.K = std::fabs(mk.K);

    // Exponential bound over Q, closed-form engine (gold standard).
    const PricingEngine closed{
        [mk](double t, double x) { return v_reduced(t, x, mk); }, {}};
    rep.closed_form = check_bound(closed, mk, 20, 20);

    // Same lattice with the Monte Carlo engine when selected; its violation
    // flags already absorb 3 standard errors per point, and the counter-based
    // draws make value/tolerance replays see identical samples.
    if (uses(cfg, EngineKind::mc)) {
        const PathConfig pc = cfg.mc;
        rep.mc_tolerance_widened = pc.n_paths < 10000;
        const StepDrift zero = StepDrift::zero(mk.T);
        auto stats = [mk, pc, zero](double t, double x) {
            const std::vector<double> xs =
                simulate_terminal(t, x, zero, mk.sigma, mk.T, pc);
            double mean = 0.0, m2 = 0.0;
            long long n = 0;
            for (double X : xs) {
                const double pay = mk.K > 0.0 ? std::max(X - mk.K, 0.0)
                                              : std::max(mk.K - X, 0.0);
                ++n;
                const double d = pay - mean;
                mean += d / n;
                m2 += d * (pay - mean);
            }
            const double se = n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0;
            return std::pair<double, double>(mean, se);
        };
        const PricingEngine engine{
            [stats](double t, double x) { return stats(t, x).first; },
            [stats](double t, double x) { return 3.0 * stats(t, x).second; }};
        rep.mc = check_bound(engine, mk, 20, 20);
    }

    // Derivative decay toward the degeneracy at x = 0 (mirrored problem when
    // the strike is negative): x0 = K 2^{-j}, j = 2..10, all inside (0, 2K/3).
    std::vector<double> x0s;
    for (int j = 2; j <= 10; ++j) x0s.push_back(pm.K * std::ldexp(1.0, -j));
    rep.decay = decay_profile(
        [pm](double t, double x) { return v_reduced(t, x, pm); }, 0.0, pm, x0s);
    rep.fitted_envelope = fit_decay_envelope(rep.decay, {2, 3});
    auto row_sum = [](const DecayRow& r) { return r.x_vx + r.x2_vxx + r.vt; };
    rep.decay_monotone = true;
    for (std::size_t i = 2; i + 1 < rep.decay.rows.size(); ++i) {
        const double s0 = row_sum(rep.decay.rows[i]);
        const double s1 = row_sum(rep.decay.rows[i + 1]);
        if (s0 > 0.0 ? !(s1 < s0) : s1 > s0) rep.decay_monotone = false;
    }
    rep.envelope_ok = true;
    for (std::size_t i = 4; i < rep.decay.rows.size(); ++i)
        if (row_sum(rep.decay.rows[i]) >
            decay_envelope(rep.fitted_envelope, rep.decay.rows[i].x0) *
                    (1.0 + 1e-9) +
                1e-300)
            rep.envelope_ok = false;

    // Vanishing region x <= 0 (positive-strike form), per selected engine.
    std::ostringstream vanish_lines;
    {
        const PricingEngine engine{
            [pm](double t, double x) { return v_reduced(t, x, pm); }, {}};
        const int v = vanishing_region_check(engine, pm, 100);
        rep.vanishing_violations += v;
        vanish_lines << "    closed form: " << v << " violation(s)\n";
    }
    if (uses(cfg, EngineKind::mc)) {
        const PathConfig pc = cfg.mc;
        const StepDrift zero = StepDrift::zero(pm.T);
        const PricingEngine engine{
            [pm, pc, zero](double t, double x) {
                const std::vector<double> xs =
                    simulate_terminal(t, x, zero, pm.sigma, pm.T, pc);
                double mean = 0.0;
                long long n = 0;
                for (double X : xs) {
                    ++n;
                    mean += (std::max(X - pm.K, 0.0) - mean) / n;
                }
                return mean;
            },
            {}};
        const int v = vanishing_region_check(engine, pm, 100);
        rep.vanishing_violations += v;
        vanish_lines << "    mc (pathwise): " << v << " violation(s)\n";
    }
    if (uses(cfg, EngineKind::pde)) {
        SolverConfig sc = cfg.pde;
        sc.x_min = -2.5 * pm.K;  // sample set reaches x = -2K
        sc.x_max = pm.K * std::exp(6.0 * pm.sigma * std::sqrt(pm.T));
        const PDESolution sol = solve_backward(StepDrift::zero(pm.T), pm, sc);
        const PricingEngine engine{
            [&sol](double t, double x) { return get_u(sol, t, x); },
            [](double, double) { return 1e-8; }};
        const int v = vanishing_region_check(engine, pm, 100);
        rep.vanishing_violations += v;
        vanish_lines << "    pde (|u| <= 1e-8): " << v << " violation(s)\n";
    }

    // v(t, K) never exceeds K.
    rep.strike_cap_ok = true;
    for (int i = 0; i < 100; ++i) {
        const double t = pm.T * i / 99.0;
        if (v_reduced(t, pm.K, pm) > pm.K * (1.0 + 1e-12))
            rep.strike_cap_ok = false;
    }

    // Gaussian tail inequality, 50 log-spaced alphas plus the tightness probe.
    try {
        std::vector<double> alphas;
        for (int i = 0; i < 50; ++i)
            alphas.push_back(1e-3 * std::pow(1e4, i / 49.0));
        rep.tail_max_ratio = gaussian_tail_check(alphas);
        rep.tail_ratio_at_10 = gaussian_tail_check({10.0});
        rep.tail_ok = rep.tail_ratio_at_10 >= 0.98;
    } catch (const std::exception&) {
        rep.tail_ok = false;
    }

    rep.pass = rep.closed_form.violations_derivation == 0 &&
               rep.decay_monotone && rep.envelope_ok &&
               rep.vanishing_violations == 0 && rep.tail_ok &&
               rep.strike_cap_ok;

    std::string bound_csv =
        "t,x,v,bound_printed,bound_derivation,margin_printed,margin_derivation\n";
    for (const BoundSample& s : rep.closed_form.samples)
        bound_csv += fmt(s.t) + "," + fmt(s.x) + "," + fmt(s.v) + "," +
                     fmt(s.bound_printed) + "," + fmt(s.bound_derivation) +
                     "," + fmt(s.margin_printed) + "," +
                     fmt(s.margin_derivation) + "\n";
    write_file(fs::path(out_dir) / "bound_report.csv", bound_csv);

    std::string decay_csv = "x0,r,x0_abs_vx,x0sq_abs_vxx,abs_vt\n";
    for (const DecayRow& r : rep.decay.rows)
        decay_csv += fmt(r.x0) + "," + fmt(r.r) + "," + fmt(r.x_vx) + "," +
                     fmt(r.x2_vxx) + "," + fmt(r.vt) + "\n";
    write_file(fs::path(out_dir) / "decay_profile.csv", decay_csv);

    std::ostringstream sum;
    sum << "verification run (reduced problem: drift 0, sigma=" << fmt(mk.sigma)
        << " T=" << fmt(mk.T) << " K=" << fmt(mk.K) << ")\n";
    if (rep.mirrored)
        sum << "note: K < 0; decay and vanishing suites run on the mirrored "
               "positive-strike problem\n";
    sum << "\nexponential bound over the strip Q (closed form, 20x20 "
           "lattice):\n";
    sum << "  derivation variant (exponent /(2 sigma^2 T)): "
        << rep.closed_form.violations_derivation
        << " violation(s), worst margin "
        << fmt(rep.closed_form.worst_margin_derivation) << " -> "
        << verdict(rep.closed_form.violations_derivation == 0) << "\n";
    sum << "  printed variant (exponent /(sigma^2 T)):      "
        << rep.closed_form.violations_printed << " violation(s), worst margin "
        << fmt(rep.closed_form.worst_margin_printed)
        << "  (reported, not gated)\n";
    if (rep.mc) {
        sum << "  monte carlo engine (3 SE tolerance per point): "
            << rep.mc->violations_derivation
            << " derivation-variant violation(s) (informational)\n";
        if (rep.mc_tolerance_widened)
            sum << "  note: fewer than 10^4 paths; statistical tolerance "
                   "widened accordingly\n";
    }
    sum << "\nderivative decay at t0 = 0 along x0 = K 2^-j, j = 2..10:\n";
    sum << "  row sums decrease monotonically from j = 4 on -> "
        << verdict(rep.decay_monotone) << "\n";
    sum << "  envelope N exp(-(ln x0)^2 / N), N = " << fmt(rep.fitted_envelope)
        << " fitted on j in {4, 5}; rows j >= 6 stay below it -> "
        << verdict(rep.envelope_ok) << "\n";
    sum << "\nvanishing region (x <= 0, 100 samples):\n" << vanish_lines.str();
    sum << "  total: " << rep.vanishing_violations << " violation(s) -> "
        << verdict(rep.vanishing_violations == 0) << "\n";
    sum << "\nstrike cap v(t, K) <= K on 100 times -> "
        << verdict(rep.strike_cap_ok) << "\n";
    sum << "\ngaussian tail inequality, 50 log-spaced alpha in [1e-3, 10]:\n";
    sum << "  max LHS/RHS = " << fmt(rep.tail_max_ratio)
        << ", at alpha = 10: " << fmt(rep.tail_ratio_at_10)
        << " (>= 0.98 required) -> " << verdict(rep.tail_ok) << "\n";
    sum << "\noverall: " << verdict(rep.pass) << "\n";
    write_file(fs::path(out_dir) / "summary.txt", sum.str());
    return rep;
}

} // namespace vecer
