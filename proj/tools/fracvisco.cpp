// fracvisco command line driver: simulation runs, identity-verification
// suites, and manufactured-solution convergence studies. All artifacts are
// CSV plus a plain-text summary; outputs are deterministic for a fixed
// config and seed and files are written atomically.
//
// Exit codes: 0 success, 1 failed checks / internal error, 2 configuration
// error, 3 hypothesis violation, 4 solver divergence.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "fracvisco/config.hpp"
#include "fracvisco/convergence.hpp"
#include "fracvisco/csv.hpp"
#include "fracvisco/diagnostics.hpp"
#include "fracvisco/verify.hpp"

namespace fs = std::filesystem;
using namespace fracvisco;

namespace {

std::string fmt(double v) { return csv::format_value(v); }

int cmd_run(const std::string& config_path, const std::string& out_dir, bool dump_matrices) {
    config::RunConfig cfg = config::RunConfig::parse_file(config_path);
    assembly::ProblemSpec spec = cfg.problem();

    assembly::HypothesisReport hyp = assembly::verify_hypotheses(spec);
    assembly::SpaceGrid sg(cfg.length, cfg.space_cells);
    assembly::GalerkinBasis basis = assembly::build_basis(cfg.basis, cfg.modes, sg);
    TimeGrid tg(0.0, cfg.horizon, cfg.n_steps);
    assembly::GalerkinSystem sys = assembly::assemble(spec, basis, tg);
    volterra::FieldHistory hist = volterra::solve(sys, tg, cfg.solver);
    diagnostics::EnergyReport energy = diagnostics::energy_report(hist, sys);

    fs::create_directories(out_dir);
    const auto m = sys.mass.rows();
    const auto wants = [&](const char* r) {
        return std::find(cfg.reports.begin(), cfg.reports.end(), r) != cfg.reports.end();
    };

    if (wants("solution")) {
        std::vector<std::string> header{"t"};
        for (Eigen::Index k = 0; k < m; ++k) header.push_back("d_" + std::to_string(k + 1));
        for (Eigen::Index k = 0; k < m; ++k) header.push_back("v_" + std::to_string(k + 1));
        csv::Table table(header);
        for (std::size_t j = 0; j < tg.n_nodes(); ++j) {
            std::vector<double> row{tg.node(j)};
            for (Eigen::Index k = 0; k < m; ++k)
                row.push_back(hist.coeffs(k, static_cast<Eigen::Index>(j)));
            for (Eigen::Index k = 0; k < m; ++k)
                row.push_back(hist.velocity(k, static_cast<Eigen::Index>(j)));
            table.add_numeric_row(row);
        }
        csv::write_file_atomic(fs::path(out_dir) / "solution.csv", table.str());
    }

    if (wants("energy")) {
        csv::Table table({"t", "kinetic", "elastic", "total", "work", "dissipation",
                          "balance_residual"});
        for (std::size_t j = 0; j < tg.n_nodes(); ++j)
            table.add_numeric_row({tg.node(j), energy.kinetic[j], energy.elastic[j],
                                   energy.total[j], energy.work[j], energy.dissipation[j],
                                   energy.balance_residual[j]});
        csv::write_file_atomic(fs::path(out_dir) / "energy.csv", table.str());
    }

    if (dump_matrices) {
        auto dump = [&](const char* name, const Eigen::MatrixXd& mat) {
            std::string body;
            for (Eigen::Index i = 0; i < mat.rows(); ++i)
                for (Eigen::Index j = 0; j < mat.cols(); ++j)
                    body += fmt(mat(i, j)) + (j + 1 == mat.cols() ? "\n" : ",");
            csv::write_file_atomic(fs::path(out_dir) / name, body);
        };
        dump("mass.csv", sys.mass);
        dump("elastic.csv", sys.elastic);
        dump("viscous.csv", sys.viscous);
    }

    const bool zero_data = sys.initial_displacement.cwiseAbs().maxCoeff() == 0.0 &&
                           sys.initial_velocity.cwiseAbs().maxCoeff() == 0.0 &&
                           sys.load.cwiseAbs().maxCoeff() == 0.0;

    if (wants("summary")) {
        std::string s;
        s += "fracvisco run summary\n";
        s += "config: " + config_path + "\n";
        s += "basis: " + std::string(cfg.basis == assembly::BasisKind::sine_spectral
                                         ? "sine_spectral" : "p1_fem") +
             ", modes: " + std::to_string(cfg.modes) +
             ", space_cells: " + std::to_string(cfg.space_cells) +
             ", n_steps: " + std::to_string(cfg.n_steps) + "\n";
        s += "alpha: " + fmt(cfg.alpha) + ", T: " + fmt(cfg.horizon) +
             ", L: " + fmt(cfg.length) + "\n";
        s += "hypotheses:\n";
        for (const auto& item : hyp.items)
            s += "  " + item.name + ": " + (item.pass ? "pass" : "FAIL") + " (" + item.detail +
                 ")\n";
        double max_d = hist.coeffs.cwiseAbs().maxCoeff();
        double max_v = hist.velocity.cwiseAbs().maxCoeff();
        s += "max |d|: " + fmt(max_d) + ", max |v|: " + fmt(max_v) + "\n";
        s += "E(0): " + fmt(energy.total.front()) + ", E(T): " + fmt(energy.total.back()) + "\n";
        s += "work(T): " + fmt(energy.work.back()) +
             ", dissipation(T): " + fmt(energy.dissipation.back()) + "\n";
        s += "balance_residual(T): " + fmt(energy.balance_residual.back()) + "\n";
        if (zero_data) {
            const double probe = diagnostics::uniqueness_probe(sys);
            s += std::string("uniqueness_probe: ") + (probe <= 1e-12 ? "pass" : "FAIL") +
                 " (max ||sqrt(rho) u|| = " + fmt(probe) + ", tolerance 1e-12)\n";
        }
        csv::write_file_atomic(fs::path(out_dir) / "summary.txt", s);
    }

    std::cout << "run complete; artifacts in " << out_dir << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& out_dir, std::uint64_t seed) {
    std::vector<verify::CheckRow> rows = verify::run_suite(suite, seed);
    fs::create_directories(out_dir);
    csv::Table table({"suite", "check", "case", "alpha", "n_steps", "lhs", "rhs", "residual",
                      "tolerance", "pass"});
    bool all_pass = true;
    for (const auto& r : rows) {
        table.add_row({r.suite, r.check, r.test_case, fmt(r.alpha), std::to_string(r.n_steps),
                       fmt(r.lhs), fmt(r.rhs), fmt(r.residual), fmt(r.tolerance),
                       r.pass ? "1" : "0"});
        std::printf("%-10s %-28s %-22s alpha=%-5.3g residual=%-12.3e tol=%-9.1e %s\n",
                    r.suite.c_str(), r.check.c_str(), r.test_case.c_str(), r.alpha, r.residual,
                    r.tolerance, r.pass ? "pass" : "FAIL");
        all_pass = all_pass && r.pass;
    }
    csv::write_file_atomic(fs::path(out_dir) / ("verify_" + suite + ".csv"), table.str());
    std::cout << (all_pass ? "all checks passed\n" : "some checks FAILED\n");
    return all_pass ? 0 : 1;
}

int cmd_converge(const std::string& config_path, std::size_t levels, const std::string& out_dir) {
    config::RunConfig cfg = config::RunConfig::parse_file(config_path);
    convergence::ConvergenceTable table = convergence::run_convergence(cfg, levels);
    fs::create_directories(out_dir);
    csv::Table out({"study", "level", "h", "dt", "err_l2", "order"});
    for (const auto& r : table.rows)
        out.add_row({r.study, std::to_string(r.level), fmt(r.h), fmt(r.dt), fmt(r.err_l2),
                     fmt(r.order)});
    csv::write_file_atomic(fs::path(out_dir) / "convergence.csv", out.str());
    for (const char* study : {"temporal_fractional", "temporal_classical", "spatial_p1"})
        std::printf("%-20s estimated order %.3f\n", study,
                    convergence::estimated_order(table, study));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional Kelvin-Voigt viscoelastic wave solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", suite = "all";
    std::uint64_t seed = 0;
    std::size_t levels = 3;
    bool dump_matrices = false;

    CLI::App* run = app.add_subcommand("run", "assemble, solve and emit reports");
    run->add_option("--config", config_path, "run configuration file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "random seed (unused by run; accepted for uniformity)");
    run->add_flag("--dump-matrices", dump_matrices, "also dump M, K, V as dense CSV");

    CLI::App* ver = app.add_subcommand("verify", "run identity-verification suites");
    ver->add_option("--suite", suite, "operators | spectral | energy | all");
    ver->add_option("--out", out_dir, "output directory");
    ver->add_option("--seed", seed, "seed for the randomized checks");

    CLI::App* conv = app.add_subcommand("converge", "manufactured-solution convergence study");
    conv->add_option("--config", config_path, "run configuration file")->required();
    conv->add_option("--levels", levels, "number of dyadic refinement levels (>= 3)");
    conv->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, dump_matrices);
        if (ver->parsed()) return cmd_verify(suite, out_dir, seed);
        if (conv->parsed()) return cmd_converge(config_path, levels, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
