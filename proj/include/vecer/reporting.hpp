#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vecer/regularity.hpp"
#include "vecer/run_config.hpp"

namespace vecer {

struct EngineResult {
    EngineKind kind = EngineKind::analytic;
    double price = 0.0;
    double std_error = 0.0;  // meaningful for mc only
    long long n_paths = 0;   // meaningful for mc only
    double seconds = 0.0;
    std::string error;       // nonempty when the engine failed
};

struct Disagreement {
    EngineKind a = EngineKind::analytic;
    EngineKind b = EngineKind::analytic;
    double abs_diff = 0.0;
    double tol = 0.0;  // 3 combined standard errors vs mc, 1% otherwise
    bool pass = true;
};

struct PriceReport {
    std::vector<EngineResult> engines;
    std::vector<Disagreement> disagreements;
    // Set when the strike coincides with the drift's terminal level: on the
    // final sampling interval the value function collapses to the payoff.
    bool degenerate_terminal = false;
    double t_prime = 0.0;  // start of the payoff-preserving interval
    bool pass = true;
};

struct ConvergenceRow {
    int n_time = 0;
    int n_space = 0;
    double price = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
};

struct ConvergenceReport {
    double reference = 0.0;  // semi-analytic price at (0, x0)
    std::vector<ConvergenceRow> aligned;
    std::vector<ConvergenceRow> misaligned;
    bool aligned_never_worse = true;
    int strictly_better = 0;
    bool pass = true;
};

struct VerifyReport {
    BoundReport closed_form;            // closed-form engine on the Q lattice
    std::optional<BoundReport> mc;      // present when the mc engine is selected
    bool mc_tolerance_widened = false;  // fewer than 10^4 paths
    DecayProfile decay;                 // x0 = K 2^{-j}, j = 2..10, t0 = 0
    double fitted_envelope = 0.0;       // N fitted on the j = 4, 5 rows
    bool decay_monotone = false;        // row sums decrease from j = 4 on
    bool envelope_ok = false;           // rows j >= 6 under the fitted envelope
    int vanishing_violations = 0;
    double tail_max_ratio = 0.0;
    double tail_ratio_at_10 = 0.0;
    bool tail_ok = false;
    bool strike_cap_ok = false;         // v(t, K) <= K across [0, T]
    bool mirrored = false;              // suites ran on |K| because K < 0
    bool pass = false;
};

// Each runner executes one CLI verb and writes its reports under out_dir
// (created if missing): price.csv, convergence_aligned.csv plus
// convergence_misaligned.csv, or bound_report.csv plus decay_profile.csv.
// Every verb also writes summary.txt.  CSV numbers carry 12 significant
// digits and are byte-stable across thread counts; wall-clock timings appear
// only in the summary.  The returned `pass` drives the process exit status.
PriceReport run_price(const RunConfig& cfg, const std::string& out_dir);
ConvergenceReport run_convergence(const RunConfig& cfg,
                                  const std::string& out_dir);
VerifyReport run_verify(const RunConfig& cfg, const std::string& out_dir);

} // namespace vecer
