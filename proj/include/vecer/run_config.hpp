#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vecer/cascade.hpp"
#include "vecer/market.hpp"
#include "vecer/mc.hpp"
#include "vecer/pde.hpp"

namespace vecer {

enum class EngineKind { analytic, cascade, mc, pde };

const char* engine_name(EngineKind kind);

// Carries every parse/validation issue, one "line N: message" entry each.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

struct RunConfig {
    MarketParams market;
    double x0 = 1.0;                       // query point for u(0, x0)
    std::vector<PointMass> sampling_atoms; // empty means drift identically 0
    std::vector<PointMass> dividend_atoms;
    std::vector<EngineKind> engines;
    PathConfig mc;
    SolverConfig pde;
    CascadeConfig cascade;
    std::string out_dir = "out";

    StepDrift make_drift() const;

    bool operator==(const RunConfig&) const;
};

// Sectioned key-value text; see README for the format.  Throws ConfigError
// listing every problem found, each tagged with its line number.
RunConfig parse_config(const std::string& text);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

} // namespace vecer
