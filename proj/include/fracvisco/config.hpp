#pragma once

// Flat key-value run configuration with dotted section names:
//
//   problem.alpha = 0.5
//   problem.forcing = sin(pi*x) * (2 + t^2)
//   discretization.basis = sine
//   ...
//
// '#' starts a comment. Parsing either succeeds completely or fails with a
// line-anchored message; unknown keys are errors.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracvisco/assembly.hpp"
#include "fracvisco/errors.hpp"
#include "fracvisco/expr.hpp"
#include "fracvisco/volterra.hpp"

namespace fracvisco::config {

struct RunConfig {
    // problem block
    double length = 1.0;
    double horizon = 1.0;
    double alpha = 0.5;
    expr::Expression rho = expr::Expression::parse("1");
    expr::Expression a_coef = expr::Expression::parse("1");
    expr::Expression b_coef = expr::Expression::parse("1");
    double nu = 0.5;
    double rho0 = 0.5;
    expr::Expression forcing = expr::Expression::parse("0");
    expr::Expression initial_displacement = expr::Expression::parse("0");
    expr::Expression initial_velocity = expr::Expression::parse("0");
    // discretization block
    assembly::BasisKind basis = assembly::BasisKind::sine_spectral;
    std::size_t modes = 8;
    std::size_t space_cells = 256;
    std::size_t n_steps = 256;
    // solver block
    volterra::SolverConfig solver;
    // output block
    std::vector<std::string> reports = {"solution", "energy", "summary"};

    assembly::ProblemSpec problem() const {
        assembly::MaterialModel mat{
            [this](double x) { return rho.eval(x, 0.0); },
            [this](double x) { return a_coef.eval(x, 0.0); },
            [this](double x) { return b_coef.eval(x, 0.0); },
            nu, rho0};
        return assembly::ProblemSpec{
            length,
            horizon,
            FracOrder(alpha),
            mat,
            [this](double x, double t) { return forcing.eval(x, t); },
            [this](double x) { return initial_displacement.eval(x, 0.0); },
            [this](double x) { return initial_velocity.eval(x, 0.0); }};
    }

    static RunConfig parse(std::istream& in, const std::string& name);
    static RunConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path + ": cannot open config file");
        return parse(in, path);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

struct RawConfig {
    struct Entry {
        std::string value;
        int line;
        bool used = false;
    };
    std::string name;
    std::map<std::string, Entry> entries;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }
    int line_of(const std::string& key) const {
        auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    }

    double number(const std::string& key, double fallback) {
        auto v = take(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double d = std::stod(*v, &used);
            if (trim(v->substr(used)).empty()) return d;
        } catch (...) {
        }
        fail(line_of(key), key + ": expected a number, got '" + *v + "'");
    }
    std::size_t count(const std::string& key, std::size_t fallback) {
        const double d = number(key, static_cast<double>(fallback));
        if (d < 0.0 || d != std::floor(d))
            fail(line_of(key), key + ": expected a nonnegative integer");
        return static_cast<std::size_t>(d);
    }
    expr::Expression expression(const std::string& key, const char* fallback) {
        auto v = take(key);
        try {
            return expr::Expression::parse(v ? *v : std::string(fallback));
        } catch (const ConfigError& e) {
            fail(line_of(key), key + ": " + e.what());
        }
    }
};

} // namespace detail

inline RunConfig RunConfig::parse(std::istream& in, const std::string& name) {
    static const std::vector<std::string> known = {
        "problem.length", "problem.horizon", "problem.alpha", "problem.rho",
        "problem.a_coef", "problem.b_coef", "problem.nu", "problem.rho0",
        "problem.forcing", "problem.initial_displacement", "problem.initial_velocity",
        "discretization.basis", "discretization.modes", "discretization.space_cells",
        "discretization.n_steps",
        "solver.scheme", "solver.picard_tol", "solver.picard_max_iter",
        "output.reports"};

    detail::RawConfig raw;
    raw.name = name;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) raw.fail(lineno, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) raw.fail(lineno, "empty key");
        if (std::find(known.begin(), known.end(), key) == known.end())
            raw.fail(lineno, "unknown key '" + key + "'");
        if (raw.entries.count(key)) raw.fail(lineno, "duplicate key '" + key + "'");
        if (value.empty()) raw.fail(lineno, key + ": empty value");
        raw.entries[key] = {value, lineno};
    }

    RunConfig cfg;
    cfg.length = raw.number("problem.length", cfg.length);
    cfg.horizon = raw.number("problem.horizon", cfg.horizon);
    cfg.alpha = raw.number("problem.alpha", cfg.alpha);
    cfg.rho = raw.expression("problem.rho", "1");
    cfg.a_coef = raw.expression("problem.a_coef", "1");
    cfg.b_coef = raw.expression("problem.b_coef", "1");
    cfg.nu = raw.number("problem.nu", cfg.nu);
    cfg.rho0 = raw.number("problem.rho0", cfg.rho0);
    cfg.forcing = raw.expression("problem.forcing", "0");
    cfg.initial_displacement = raw.expression("problem.initial_displacement", "0");
    cfg.initial_velocity = raw.expression("problem.initial_velocity", "0");

    if (auto b = raw.take("discretization.basis")) {
        if (*b == "sine")
            cfg.basis = assembly::BasisKind::sine_spectral;
        else if (*b == "p1")
            cfg.basis = assembly::BasisKind::p1_fem;
        else
            raw.fail(raw.line_of("discretization.basis"),
                     "discretization.basis: expected 'sine' or 'p1', got '" + *b + "'");
    }
    cfg.modes = raw.count("discretization.modes", cfg.modes);
    cfg.space_cells = raw.count("discretization.space_cells", cfg.space_cells);
    cfg.n_steps = raw.count("discretization.n_steps", cfg.n_steps);

    if (auto s = raw.take("solver.scheme")) {
        if (*s == "marching")
            cfg.solver.scheme = volterra::SolverConfig::Scheme::marching;
        else if (*s == "picard")
            cfg.solver.scheme = volterra::SolverConfig::Scheme::picard;
        else
            raw.fail(raw.line_of("solver.scheme"),
                     "solver.scheme: expected 'marching' or 'picard', got '" + *s + "'");
    }
    cfg.solver.picard_tol = raw.number("solver.picard_tol", cfg.solver.picard_tol);
    cfg.solver.picard_max_iter =
        static_cast<int>(raw.count("solver.picard_max_iter",
                                   static_cast<std::size_t>(cfg.solver.picard_max_iter)));

    if (auto r = raw.take("output.reports")) {
        cfg.reports.clear();
        std::stringstream ss(*r);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item != "solution" && item != "energy" && item != "summary")
                raw.fail(raw.line_of("output.reports"),
                         "output.reports: unknown report '" + item + "'");
            cfg.reports.push_back(item);
        }
    }

    // range validation, anchored to the config line when one exists
    auto anchored = [&](const std::string& key, const std::string& msg) -> ConfigError {
        const int ln = raw.line_of(key);
        return ConfigError(ln > 0 ? name + ":" + std::to_string(ln) + ": " + msg
                                  : name + ": " + msg);
    };
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw anchored("problem.alpha", "problem.alpha must lie in (0,1)");
    if (!(cfg.length > 0.0)) throw anchored("problem.length", "problem.length must be positive");
    if (!(cfg.horizon > 0.0))
        throw anchored("problem.horizon", "problem.horizon must be positive");
    if (!(cfg.nu > 0.0)) throw anchored("problem.nu", "problem.nu must be positive");
    if (!(cfg.rho0 > 0.0)) throw anchored("problem.rho0", "problem.rho0 must be positive");
    if (cfg.modes < 1) throw anchored("discretization.modes", "need at least one mode");
    if (cfg.space_cells < 2)
        throw anchored("discretization.space_cells", "need at least two cells");
    if (cfg.n_steps < 1) throw anchored("discretization.n_steps", "need at least one step");
    if (!(cfg.solver.picard_tol > 0.0))
        throw anchored("solver.picard_tol", "solver.picard_tol must be positive");
    if (cfg.solver.picard_max_iter < 1)
        throw anchored("solver.picard_max_iter", "solver.picard_max_iter must be >= 1");

    for (const auto& [key, entry] : raw.entries)
        if (!entry.used) raw.fail(entry.line, "internal: unconsumed key '" + key + "'");
    return cfg;
}

} // namespace fracvisco::config
