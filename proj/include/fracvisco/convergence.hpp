#pragma once

// Manufactured-solution convergence studies.
//
// Fractional study:  u*(x,t) = sin(pi x / L) (1 + t^2); the forcing is
// closed-form through CapD_t^alpha t^2 = 2 t^{2-alpha} / Gamma(3-alpha).
// Classical study (viscous term disabled): u*(x,t) = sin(pi x / L) cos(2t);
// a polynomial-in-time reference would be reproduced exactly by the
// product-integration marching (the same discrete operator hits the forcing
// and the solution), leaving only roundoff to measure.
//
// The marching scheme is conditionally stable: with lambda the largest
// generalized stiffness eigenvalue, the measured bounds are
// lambda_a dt^2 <= 12 and lambda_b dt^{2-alpha} ~ 8. The spatial study picks
// its fixed fine dt from these with a 4x safety margin.

#include <cmath>
#include <string>
#include <vector>

#include "fracvisco/assembly.hpp"
#include "fracvisco/config.hpp"
#include "fracvisco/errors.hpp"
#include "fracvisco/parallel.hpp"
#include "fracvisco/special.hpp"
#include "fracvisco/volterra.hpp"

namespace fracvisco::convergence {

/// Manufactured problem for u* = sin(pi x/L)(1+t^2); rho, a, b constant.
/// With classical_limit the reference is sin(pi x/L) cos(2t) and the caller
/// zeroes the viscous matrix.
inline assembly::ProblemSpec manufactured_problem(double alpha, double rho, double a, double b,
                                                  double L, double T,
                                                  bool classical_limit = false) {
    const double w2 = std::pow(M_PI / L, 2);
    std::function<double(double, double)> forcing;
    if (classical_limit) {
        forcing = [=](double x, double t) {
            return std::sin(M_PI * x / L) * std::cos(2.0 * t) * (a * w2 - 4.0 * rho);
        };
    } else {
        forcing = [=](double x, double t) {
            const double capd_t2 =
                2.0 * std::pow(t, 2.0 - alpha) / special::gamma_fn(3.0 - alpha);
            return std::sin(M_PI * x / L) *
                   (2.0 * rho + b * w2 * capd_t2 + a * w2 * (1.0 + t * t));
        };
    }
    assembly::MaterialModel mat{[rho](double) { return rho; }, [a](double) { return a; },
                                [b](double) { return b; },
                                0.5 * std::min({a, b, 1.0}), 0.5 * std::min(rho, 1.0)};
    return assembly::ProblemSpec{L,
                                 T,
                                 FracOrder(alpha),
                                 mat,
                                 forcing,
                                 [L](double x) { return std::sin(M_PI * x / L); },
                                 [](double) { return 0.0; }};
}

inline double manufactured_exact(double x, double t, double L, bool classical_limit = false) {
    const double shape = std::sin(M_PI * x / L);
    return classical_limit ? shape * std::cos(2.0 * t) : shape * (1.0 + t * t);
}

/// L2(Omega) error of the discrete solution at time t against the reference,
/// by composite two-point Gauss quadrature.
inline double l2_space_error(const assembly::GalerkinBasis& basis, const Eigen::VectorXd& coeffs,
                             double t, double L, bool classical_limit = false) {
    const assembly::SpaceGrid& sg = basis.grid();
    const double h = sg.h();
    double err2 = 0.0;
    for (std::size_t c = 0; c < sg.n_cells; ++c) {
        for (double off : {-0.5 / std::sqrt(3.0), 0.5 / std::sqrt(3.0)}) {
            const double x = (static_cast<double>(c) + 0.5 + off) * h;
            double uh = 0.0;
            for (std::size_t k = 0; k < basis.size(); ++k)
                uh += coeffs(static_cast<Eigen::Index>(k)) * basis.value(k, x);
            err2 += 0.5 * h * std::pow(uh - manufactured_exact(x, t, L, classical_limit), 2);
        }
    }
    return std::sqrt(err2);
}

struct ConvergenceRow {
    std::string study;
    std::size_t level;
    double h;
    double dt;
    double err_l2;
    double order; // log2 of the error drop from the previous level; 0 at level 0
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

namespace detail {

inline double constant_value(const expr::Expression& e, const char* key, double L) {
    const double v0 = e.eval(0.0, 0.0);
    for (int i = 0; i <= 64; ++i) {
        const double x = L * static_cast<double>(i) / 64.0;
        const double v = e.eval(x, 0.0);
        if (std::abs(v - v0) > 1e-12 * std::max(1.0, std::abs(v0)))
            throw ConfigError(std::string("converge: ") + key +
                              " must be constant for the manufactured study");
    }
    return v0;
}

struct LevelResult {
    double h, dt, err;
};

inline LevelResult run_level(const assembly::ProblemSpec& spec, assembly::BasisKind kind,
                             std::size_t m, std::size_t cells, std::size_t n_steps,
                             bool classical_limit, const volterra::SolverConfig& solver) {
    assembly::SpaceGrid sg(spec.length, cells);
    assembly::GalerkinBasis basis = assembly::build_basis(kind, m, sg);
    TimeGrid tg(0.0, spec.horizon, n_steps);
    assembly::GalerkinSystem sys = assembly::assemble(spec, basis, tg);
    if (classical_limit) sys.viscous.setZero();
    volterra::FieldHistory hist = volterra::solve(sys, tg, solver);
    const double err =
        l2_space_error(basis, hist.coeffs.col(static_cast<Eigen::Index>(n_steps)), spec.horizon,
                       spec.length, classical_limit);
    return {sg.h(), tg.dt(), err};
}

inline void append_study(ConvergenceTable& table, const std::string& study,
                         const std::vector<LevelResult>& levels) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const double order =
            (l == 0 || levels[l].err == 0.0)
                ? 0.0
                : std::log2(levels[l - 1].err / levels[l].err);
        table.rows.push_back({study, l, levels[l].h, levels[l].dt, levels[l].err, order});
    }
}

/// Smallest step count keeping the marching scheme stable on the finest P1
/// mesh (4x margin against the measured bounds).
inline std::size_t stable_steps(double T, double alpha, double rho, double a, double b,
                                double h_min) {
    const double lam = 12.0 * std::max(a, b) / (rho * h_min * h_min);
    const double dt_classical = std::sqrt(3.0 / lam);
    const double dt_fractional = std::pow(2.0 / lam, 1.0 / (2.0 - alpha));
    const double dt = std::min(dt_classical, dt_fractional);
    return static_cast<std::size_t>(std::ceil(T / dt));
}

} // namespace detail

/// Three manufactured studies over dyadic refinements:
///   temporal_fractional  sine basis, dt halving (spatially exact reference)
///   temporal_classical   viscous term disabled, cos(2t) reference
///   spatial_p1           P1 mesh halving at a fixed, stability-safe fine dt
inline ConvergenceTable run_convergence(const config::RunConfig& cfg, std::size_t levels) {
    if (levels < 3) throw ConfigError("converge: need at least 3 levels");
    const double rho = detail::constant_value(cfg.rho, "problem.rho", cfg.length);
    const double a = detail::constant_value(cfg.a_coef, "problem.a_coef", cfg.length);
    const double b = detail::constant_value(cfg.b_coef, "problem.b_coef", cfg.length);

    const std::size_t m_sine = cfg.modes;
    const std::size_t cells_sine = std::max<std::size_t>(cfg.space_cells, 4 * m_sine);

    ConvergenceTable table;
    auto spec_frac = manufactured_problem(cfg.alpha, rho, a, b, cfg.length, cfg.horizon, false);
    auto spec_clas = manufactured_problem(cfg.alpha, rho, a, b, cfg.length, cfg.horizon, true);

    const std::size_t cells_finest = 8u << (levels - 1);
    const std::size_t n_spatial = std::max(
        cfg.n_steps << (levels - 1),
        detail::stable_steps(cfg.horizon, cfg.alpha, rho, a, b,
                             cfg.length / static_cast<double>(cells_finest)));

    std::vector<detail::LevelResult> frac(levels), clas(levels), spat(levels);
    parallel::parallel_for(levels, [&](std::size_t l) {
        const std::size_t n = cfg.n_steps << l;
        frac[l] = detail::run_level(spec_frac, assembly::BasisKind::sine_spectral, m_sine,
                                    cells_sine, n, false, cfg.solver);
        clas[l] = detail::run_level(spec_clas, assembly::BasisKind::sine_spectral, m_sine,
                                    cells_sine, n, true, cfg.solver);
        const std::size_t cells = 8u << l;
        spat[l] = detail::run_level(spec_frac, assembly::BasisKind::p1_fem, cells - 1, cells,
                                    n_spatial, false, cfg.solver);
    });
    detail::append_study(table, "temporal_fractional", frac);
    detail::append_study(table, "temporal_classical", clas);
    detail::append_study(table, "spatial_p1", spat);
    return table;
}

/// Mean estimated order over the refinements of one study.
inline double estimated_order(const ConvergenceTable& table, const std::string& study) {
    double acc = 0.0;
    int count = 0;
    for (const auto& r : table.rows)
        if (r.study == study && r.level > 0) {
            acc += r.order;
            ++count;
        }
    return count ? acc / count : 0.0;
}

} // namespace fracvisco::convergence
