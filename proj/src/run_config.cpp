#include "vecer/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace vecer {

const char* engine_name(EngineKind kind) {
    switch (kind) {
        case EngineKind::analytic: return "analytic";
        case EngineKind::cascade: return "cascade";
        case EngineKind::mc: return "mc";
        case EngineKind::pde: return "pde";
    }
    return "?";
}

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string all = "config error";
    for (const std::string& s : issues) {
        all += "\n  ";
        all += s;
    }
    return all;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

StepDrift RunConfig::make_drift() const {
    if (sampling_atoms.empty()) return StepDrift::zero(market.T);
    WeightingMeasure mu(sampling_atoms, market.T);
    DividendMeasure nu(dividend_atoms, market.T);
    return compute_b(market, nu, mu);
}

bool RunConfig::operator==(const RunConfig& o) const {
    auto atoms_eq = [](const std::vector<PointMass>& a,
                       const std::vector<PointMass>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].time != b[i].time || a[i].mass != b[i].mass) return false;
        return true;
    };
    return market.sigma == o.market.sigma && market.r == o.market.r &&
           market.T == o.market.T && market.K == o.market.K && x0 == o.x0 &&
           atoms_eq(sampling_atoms, o.sampling_atoms) &&
           atoms_eq(dividend_atoms, o.dividend_atoms) && engines == o.engines &&
           mc.n_paths == o.mc.n_paths && mc.seed == o.mc.seed &&
           mc.scheme == o.mc.scheme && mc.euler_substeps == o.mc.euler_substeps &&
           mc.antithetic == o.mc.antithetic && pde.theta == o.pde.theta &&
           pde.rannacher_steps == o.pde.rannacher_steps &&
           pde.space_cells == o.pde.space_cells &&
           pde.time_steps == o.pde.time_steps &&
           (pde.x_min == o.pde.x_min ||
            (std::isnan(pde.x_min) && std::isnan(o.pde.x_min))) &&
           (pde.x_max == o.pde.x_max ||
            (std::isnan(pde.x_max) && std::isnan(o.pde.x_max))) &&
           cascade.quad_order == o.cascade.quad_order &&
           cascade.nodes_per_stage == o.cascade.nodes_per_stage &&
           cascade.range_sd == o.cascade.range_sd && out_dir == o.out_dir;
}

namespace {

struct Parser {
    std::vector<std::string> issues;

    void fail(int line, const std::string& msg) {
        issues.push_back("line " + std::to_string(line) + ": " + msg);
    }

    bool to_double(int line, const std::string& v, double& out) {
        char* end = nullptr;
        out = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0' || !std::isfinite(out)) {
            fail(line, "expected a number, got '" + v + "'");
            return false;
        }
        return true;
    }

    bool to_ll(int line, const std::string& v, long long& out) {
        char* end = nullptr;
        out = std::strtoll(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0') {
            fail(line, "expected an integer, got '" + v + "'");
            return false;
        }
        return true;
    }

    bool to_u64(int line, const std::string& v, std::uint64_t& out) {
        char* end = nullptr;
        out = std::strtoull(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0') {
            fail(line, "expected an unsigned integer, got '" + v + "'");
            return false;
        }
        return true;
    }

    bool to_bool(int line, const std::string& v, bool& out) {
        if (v == "true" || v == "1") { out = true; return true; }
        if (v == "false" || v == "0") { out = false; return true; }
        fail(line, "expected true/false, got '" + v + "'");
        return false;
    }
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    Parser p;
    std::string section;
    bool saw_sigma = false, saw_T = false, saw_K = false;
    int last_atom_line = 0;

    std::stringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                p.fail(line_no, "malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"market", "sampling", "engines",
                                          "mc", "pde", "cascade", "report"};
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return section == k;
                }) == std::end(known))
                p.fail(line_no, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.fail(line_no, "expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (section == "market") {
            double d;
            if (key == "sigma") { if (p.to_double(line_no, val, d)) { cfg.market.sigma = d; saw_sigma = true;
                    if (!(d > 0.0)) p.fail(line_no, "sigma must be positive"); } }
            else if (key == "r") { if (p.to_double(line_no, val, d)) cfg.market.r = d; }
            else if (key == "T") { if (p.to_double(line_no, val, d)) { cfg.market.T = d; saw_T = true;
                    if (!(d > 0.0)) p.fail(line_no, "T must be positive"); } }
            else if (key == "K") { if (p.to_double(line_no, val, d)) { cfg.market.K = d; saw_K = true;
                    if (d == 0.0) p.fail(line_no, "K must be nonzero"); } }
            else if (key == "x0") { if (p.to_double(line_no, val, d)) cfg.x0 = d; }
            else p.fail(line_no, "unknown key '" + key + "' in [market]");
        } else if (section == "sampling") {
            if (key == "atom" || key == "dividend") {
                const std::vector<std::string> parts = split(val, ',');
                double t = 0.0, m = 0.0;
                if (parts.size() != 2) {
                    p.fail(line_no, "expected '" + key + " = time, mass'");
                } else if (p.to_double(line_no, parts[0], t) &&
                           p.to_double(line_no, parts[1], m)) {
                    if (key == "atom") {
                        if (!cfg.sampling_atoms.empty() &&
                            t <= cfg.sampling_atoms.back().time)
                            p.fail(line_no, "sampling atoms out of order");
                        if (!(m > 0.0)) p.fail(line_no, "atom mass must be positive");
                        cfg.sampling_atoms.push_back({t, m});
                        last_atom_line = line_no;
                    } else {
                        if (m < 0.0) p.fail(line_no, "dividend mass must be >= 0");
                        cfg.dividend_atoms.push_back({t, m});
                    }
                }
            } else {
                p.fail(line_no, "unknown key '" + key + "' in [sampling]");
            }
        } else if (section == "engines") {
            if (key == "use") {
                for (const std::string& name : split(val, ',')) {
                    if (name == "analytic") cfg.engines.push_back(EngineKind::analytic);
                    else if (name == "cascade") cfg.engines.push_back(EngineKind::cascade);
                    else if (name == "mc") cfg.engines.push_back(EngineKind::mc);
                    else if (name == "pde") cfg.engines.push_back(EngineKind::pde);
                    else p.fail(line_no, "unknown engine '" + name + "'");
                }
            } else {
                p.fail(line_no, "unknown key '" + key + "' in [engines]");
            }
        } else if (section == "mc") {
            if (key == "paths") { long long n; if (p.to_ll(line_no, val, n)) cfg.mc.n_paths = n; }
            else if (key == "seed") { std::uint64_t s; if (p.to_u64(line_no, val, s)) cfg.mc.seed = s; }
            else if (key == "scheme") {
                if (val == "exact") cfg.mc.scheme = Scheme::exact_piecewise;
                else if (val == "euler") cfg.mc.scheme = Scheme::euler;
                else p.fail(line_no, "scheme must be 'exact' or 'euler'");
            }
            else if (key == "substeps") { long long n; if (p.to_ll(line_no, val, n)) cfg.mc.euler_substeps = static_cast<int>(n); }
            else if (key == "antithetic") { bool b; if (p.to_bool(line_no, val, b)) cfg.mc.antithetic = b; }
            else p.fail(line_no, "unknown key '" + key + "' in [mc]");
        } else if (section == "pde") {
            double d;
            long long n;
            if (key == "theta") { if (p.to_double(line_no, val, d)) cfg.pde.theta = d; }
            else if (key == "cells") { if (p.to_ll(line_no, val, n)) cfg.pde.space_cells = static_cast<int>(n); }
            else if (key == "steps") { if (p.to_ll(line_no, val, n)) cfg.pde.time_steps = static_cast<int>(n); }
            else if (key == "rannacher") { if (p.to_ll(line_no, val, n)) cfg.pde.rannacher_steps = static_cast<int>(n); }
            else if (key == "x_min") { if (p.to_double(line_no, val, d)) cfg.pde.x_min = d; }
            else if (key == "x_max") { if (p.to_double(line_no, val, d)) cfg.pde.x_max = d; }
            else p.fail(line_no, "unknown key '" + key + "' in [pde]");
        } else if (section == "cascade") {
            long long n;
            double d;
            if (key == "quad_order") { if (p.to_ll(line_no, val, n)) cfg.cascade.quad_order = static_cast<int>(n); }
            else if (key == "nodes") { if (p.to_ll(line_no, val, n)) cfg.cascade.nodes_per_stage = static_cast<int>(n); }
            else if (key == "range_sd") { if (p.to_double(line_no, val, d)) cfg.cascade.range_sd = d; }
            else p.fail(line_no, "unknown key '" + key + "' in [cascade]");
        } else if (section == "report") {
            if (key == "out_dir") cfg.out_dir = val;
            else p.fail(line_no, "unknown key '" + key + "' in [report]");
        } else {
            p.fail(line_no, "key outside any known section");
        }
    }

    if (!saw_sigma) p.issues.push_back("missing required key: [market] sigma");
    if (!saw_T) p.issues.push_back("missing required key: [market] T");
    if (!saw_K) p.issues.push_back("missing required key: [market] K");
    if (cfg.engines.empty())
        p.issues.push_back("missing required key: [engines] use (select at least one engine)");

    // Deduplicate engines, preserving first occurrence order.
    std::vector<EngineKind> dedup;
    for (EngineKind e : cfg.engines)
        if (std::find(dedup.begin(), dedup.end(), e) == dedup.end())
            dedup.push_back(e);
    cfg.engines = std::move(dedup);

    if (p.issues.empty()) {
        for (const PointMass& a : cfg.sampling_atoms)
            if (!(a.time > 0.0) || a.time > cfg.market.T)
                p.issues.push_back(
                    "line " + std::to_string(last_atom_line) +
                    ": sampling atom times must lie in (0, T]");
        for (const PointMass& a : cfg.dividend_atoms)
            if (a.time < 0.0 || a.time > cfg.market.T)
                p.issues.push_back("dividend atom times must lie in [0, T]");
        try {
            cfg.market.validate();
            cfg.mc.validate();
            cfg.pde.validate();
            cfg.cascade.validate();
            if (!std::isfinite(cfg.x0))
                throw std::invalid_argument("x0 must be finite");
        } catch (const std::exception& e) {
            p.issues.push_back(e.what());
        }
    }
    if (!p.issues.empty()) throw ConfigError(std::move(p.issues));
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    out += "[market]\n";
    out += "sigma = " + fmt_double(cfg.market.sigma) + "\n";
    out += "r = " + fmt_double(cfg.market.r) + "\n";
    out += "T = " + fmt_double(cfg.market.T) + "\n";
    out += "K = " + fmt_double(cfg.market.K) + "\n";
    out += "x0 = " + fmt_double(cfg.x0) + "\n";
    out += "\n[sampling]\n";
    for (const PointMass& a : cfg.sampling_atoms)
        out += "atom = " + fmt_double(a.time) + ", " + fmt_double(a.mass) + "\n";
    for (const PointMass& a : cfg.dividend_atoms)
        out += "dividend = " + fmt_double(a.time) + ", " + fmt_double(a.mass) + "\n";
    out += "\n[engines]\nuse = ";
    for (std::size_t i = 0; i < cfg.engines.size(); ++i) {
        if (i) out += ", ";
        out += engine_name(cfg.engines[i]);
    }
    out += "\n";
    out += "\n[mc]\n";
    out += "paths = " + std::to_string(cfg.mc.n_paths) + "\n";
    out += "seed = " + std::to_string(cfg.mc.seed) + "\n";
    out += std::string("scheme = ") +
           (cfg.mc.scheme == Scheme::exact_piecewise ? "exact" : "euler") + "\n";
    out += "substeps = " + std::to_string(cfg.mc.euler_substeps) + "\n";
    out += std::string("antithetic = ") + (cfg.mc.antithetic ? "true" : "false") + "\n";
    out += "\n[pde]\n";
    out += "theta = " + fmt_double(cfg.pde.theta) + "\n";
    out += "cells = " + std::to_string(cfg.pde.space_cells) + "\n";
    out += "steps = " + std::to_string(cfg.pde.time_steps) + "\n";
    out += "rannacher = " + std::to_string(cfg.pde.rannacher_steps) + "\n";
    if (std::isfinite(cfg.pde.x_min)) {
        out += "x_min = " + fmt_double(cfg.pde.x_min) + "\n";
        out += "x_max = " + fmt_double(cfg.pde.x_max) + "\n";
    }
    out += "\n[cascade]\n";
    out += "quad_order = " + std::to_string(cfg.cascade.quad_order) + "\n";
    out += "nodes = " + std::to_string(cfg.cascade.nodes_per_stage) + "\n";
    out += "range_sd = " + fmt_double(cfg.cascade.range_sd) + "\n";
    out += "\n[report]\n";
    out += "out_dir = " + cfg.out_dir + "\n";
    return out;
}

} // namespace vecer
