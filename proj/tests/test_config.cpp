#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracvisco/config.hpp"
#include "fracvisco/convergence.hpp"
#include "fracvisco/csv.hpp"
#include "fracvisco/parallel.hpp"
#include "fracvisco/verify.hpp"

using namespace fracvisco;

TEST_CASE("expression parser") {
    using expr::Expression;

    SUBCASE("arithmetic, precedence, right-associative power") {
        CHECK(Expression::parse("2+3*4^2").eval(0, 0) == doctest::Approx(50.0));
        CHECK(Expression::parse("2^3^2").eval(0, 0) == doctest::Approx(512.0));
        CHECK(Expression::parse("-x^2").eval(3, 0) == doctest::Approx(-9.0));
        CHECK(Expression::parse("(2+3)*4").eval(0, 0) == doctest::Approx(20.0));
        CHECK(Expression::parse("7/2/2").eval(0, 0) == doctest::Approx(1.75));
    }

    SUBCASE("variables, constants and functions") {
        Expression e = Expression::parse("sin(pi*x) * (2 + t^2)");
        CHECK(e.eval(0.5, 2.0) == doctest::Approx(6.0));
        CHECK(e.depends_on('x'));
        CHECK(e.depends_on('t'));
        CHECK(!Expression::parse("sin(pi*x)").depends_on('t'));
        CHECK(Expression::parse("pow(t, 1.5)").eval(0, 4.0) == doctest::Approx(8.0));
        CHECK(Expression::parse("min(x, t) + max(x, t)").eval(1.0, 5.0) == doctest::Approx(6.0));
        CHECK(Expression::parse("exp(0) + sqrt(9) + abs(-2)").eval(0, 0) == doctest::Approx(6.0));
        CHECK(Expression::parse("e").eval(0, 0) == doctest::Approx(M_E));
    }

    SUBCASE("malformed expressions raise ConfigError with a position") {
        CHECK_THROWS_AS(Expression::parse("2+"), ConfigError);
        CHECK_THROWS_AS(Expression::parse("foo(3)"), ConfigError);
        CHECK_THROWS_AS(Expression::parse("sin 3"), ConfigError);
        CHECK_THROWS_AS(Expression::parse("(1+2"), ConfigError);
        CHECK_THROWS_AS(Expression::parse("1 2"), ConfigError);
        CHECK_THROWS_AS(Expression::parse("pow(2)"), ConfigError);
    }
}

TEST_CASE("run configuration parsing") {
    using config::RunConfig;

    SUBCASE("full config round-trips into a problem spec") {
        std::istringstream in(R"(# comment
problem.length = 2.0
problem.horizon = 1.5
problem.alpha = 0.4
problem.rho = 1 + 0.2*sin(2*pi*x)
problem.nu = 0.4
problem.forcing = sin(pi*x/2) * t
problem.initial_displacement = sin(pi*x/2)
problem.initial_velocity = 0
discretization.basis = p1
discretization.modes = 15
discretization.space_cells = 16
discretization.n_steps = 64
solver.scheme = picard
solver.picard_tol = 1e-8
output.reports = energy, summary
)");
        RunConfig cfg = RunConfig::parse(in, "test.cfg");
        CHECK(cfg.length == 2.0);
        CHECK(cfg.alpha == 0.4);
        CHECK(cfg.basis == assembly::BasisKind::p1_fem);
        CHECK(cfg.solver.scheme == volterra::SolverConfig::Scheme::picard);
        CHECK(cfg.solver.picard_tol == 1e-8);
        CHECK(cfg.reports == std::vector<std::string>{"energy", "summary"});
        assembly::ProblemSpec spec = cfg.problem();
        CHECK(spec.material.rho(0.25) == doctest::Approx(1.2));
        CHECK(spec.forcing(1.0, 3.0) == doctest::Approx(3.0));
    }

    SUBCASE("defaults fill the optional keys") {
        std::istringstream in("problem.alpha = 0.3\n");
        RunConfig cfg = RunConfig::parse(in, "mini.cfg");
        CHECK(cfg.length == 1.0);
        CHECK(cfg.nu == 0.5);
        CHECK(cfg.modes == 8);
        CHECK(cfg.solver.scheme == volterra::SolverConfig::Scheme::marching);
    }

    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            RunConfig::parse(in, "bad.cfg");
            FAIL("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    SUBCASE("errors are line anchored") {
        expect_error("problem.alpha = 0.5\nnonsense line\n", "bad.cfg:2");
        expect_error("problem.alphaa = 0.5\n", "unknown key");
        expect_error("problem.alpha = 0.5\nproblem.alpha = 0.6\n", "duplicate");
        expect_error("problem.alpha = 1.5\n", "must lie in (0,1)");
        expect_error("problem.alpha = banana\n", "expected a number");
        expect_error("discretization.basis = fourier\n", "expected 'sine' or 'p1'");
        expect_error("output.reports = energy, plots\n", "unknown report");
        expect_error("problem.forcing = sin(\n", "expression");
    }
}

TEST_CASE("csv formatting and atomic writes") {
    SUBCASE("17 significant digits round-trip") {
        for (double v : {1.0 / 3.0, M_PI, 6.02e23, -1.25e-17, 0.0}) {
            const std::string s = csv::format_value(v);
            CHECK(std::stod(s) == v);
        }
    }

    SUBCASE("table layout: header, comma separation, LF endings") {
        csv::Table t({"a", "b"});
        t.add_numeric_row({1.0, 2.0});
        const std::string s = t.str();
        CHECK(s.find("a,b\n") == 0);
        CHECK(s.find('\r') == std::string::npos);
        CHECK_THROWS_AS(t.add_numeric_row({1.0}), std::invalid_argument);
    }

    SUBCASE("atomic write leaves no temp file") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "fracvisco_csv_test";
        fs::create_directories(dir);
        csv::write_file_atomic(dir / "x.csv", "a\n1\n");
        CHECK(fs::exists(dir / "x.csv"));
        CHECK(!fs::exists(dir / "x.csv.tmp"));
        fs::remove_all(dir);
    }
}

TEST_CASE("parallel_for visits every index once and honors the env cap") {
    std::vector<int> hits(257, 0);
    parallel::parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (int h : hits) CHECK(h == 1);

    setenv("FRACVISCO_THREADS", "2", 1);
    CHECK(parallel::thread_cap() <= 2);
    unsetenv("FRACVISCO_THREADS");
}

TEST_CASE("verify suites") {
    SUBCASE("operators suite passes at the documented resolution") {
        auto rows = verify::run_suite("operators", 0);
        CHECK(!rows.empty());
        for (const auto& r : rows) CHECK(r.pass);
    }

    SUBCASE("unknown suite name rejected") {
        CHECK_THROWS_AS(verify::run_suite("bogus", 0), ConfigError);
    }

    SUBCASE("fault injection: a broken gamma fails the suite") {
        special::set_gamma_perturbation(1.001);
        auto rows = verify::run_suite("operators", 0);
        special::set_gamma_perturbation(1.0);
        bool any_fail = false;
        for (const auto& r : rows) any_fail = any_fail || !r.pass;
        CHECK(any_fail);
        // and the clean suite is green again
        for (const auto& r : verify::run_suite("operators", 0)) CHECK(r.pass);
    }
}

TEST_CASE("manufactured convergence studies") {
    std::istringstream in(R"(problem.alpha = 0.5
discretization.modes = 2
discretization.space_cells = 64
discretization.n_steps = 32
)");
    config::RunConfig cfg = config::RunConfig::parse(in, "converge.cfg");

    SUBCASE("levels precondition") {
        CHECK_THROWS_AS(convergence::run_convergence(cfg, 2), ConfigError);
    }

    SUBCASE("orders: classical >= 1.8, spatial P1 >= 1.8, fractional positive") {
        convergence::ConvergenceTable table = convergence::run_convergence(cfg, 3);
        CHECK(convergence::estimated_order(table, "temporal_classical") >= 1.8);
        CHECK(convergence::estimated_order(table, "spatial_p1") >= 1.8);
        CHECK(convergence::estimated_order(table, "temporal_fractional") > 0.0);
    }

    SUBCASE("non-constant coefficients are rejected for the manufactured study") {
        config::RunConfig bad = cfg;
        bad.rho = expr::Expression::parse("1 + 0.2*sin(2*pi*x)");
        CHECK_THROWS_AS(convergence::run_convergence(bad, 3), ConfigError);
    }
}
