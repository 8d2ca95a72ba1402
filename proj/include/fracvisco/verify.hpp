#pragma once

// Identity-verification suites behind `fracvisco verify`: each check runs at
// a fixed documented resolution and reports a measured residual against a
// pinned tolerance. Startup-layer note: residuals of derivative-composition
// identities are evaluated on t >= a + (b-a)/16, outside the first nodes
// where the piecewise-linear product-integration family is known to lose
// pointwise order after power-law startups.

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fracvisco/convergence.hpp"
#include "fracvisco/diagnostics.hpp"
#include "fracvisco/errors.hpp"
#include "fracvisco/fracops.hpp"
#include "fracvisco/fracspace.hpp"
#include "fracvisco/parallel.hpp"

namespace fracvisco::verify {

struct CheckRow {
    std::string suite;
    std::string check;
    std::string test_case;
    double alpha = 0.0;      // 0 when not applicable
    std::size_t n_steps = 0;
    double lhs = 0.0;        // filled by the equivalence checks
    double rhs = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

constexpr double kWindowSkip = 1.0 / 16.0; // startup-layer exclusion on (0,1)

inline double smooth_bump(double t) {
    const double y = (t - 0.5) / 0.3;
    return std::abs(y) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - y * y));
}
inline double smooth_bump_b(double t) {
    const double y = (t - 0.45) / 0.25;
    return std::abs(y) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - y * y));
}
inline double gentle_bump(double t) { return 0.1 * std::pow(std::sin(M_PI * t), 4); }
/// the documented cross-path bump of the spectral suite
inline double cross_path_bump(double t) { return 0.05 * std::pow(std::sin(M_PI * t), 4); }
inline double zero_mean_wave(double t) { return 4.0 * t * (1.0 - t) * std::sin(2.0 * M_PI * t); }

inline CheckRow finish(CheckRow row) {
    row.pass = row.residual <= row.tolerance;
    return row;
}

inline TimeSeries sample(const TimeGrid& g, double (*f)(double)) {
    return TimeSeries::sampled(g, [f](double t) { return f(t); });
}

using Case = std::function<CheckRow()>;

inline std::vector<CheckRow> run_cases(const std::vector<Case>& cases) {
    std::vector<CheckRow> rows(cases.size());
    parallel::parallel_for(cases.size(), [&](std::size_t i) { rows[i] = cases[i](); });
    return rows;
}

/// small sine-basis benchmark system shared by the energy checks
inline assembly::GalerkinSystem energy_system(double alpha, std::size_t m, std::size_t n_steps,
                                              double data_scale = 1.0, bool zero_data = false) {
    assembly::ProblemSpec spec =
        convergence::manufactured_problem(alpha, 1.0, 1.0, 1.0, 1.0, 1.0);
    if (zero_data) {
        spec.forcing = [](double, double) { return 0.0; };
        spec.initial_displacement = [](double) { return 0.0; };
    } else if (data_scale != 1.0) {
        auto f = spec.forcing;
        auto g = spec.initial_displacement;
        spec.forcing = [f, data_scale](double x, double t) { return data_scale * f(x, t); };
        spec.initial_displacement = [g, data_scale](double x) { return data_scale * g(x); };
    }
    assembly::SpaceGrid sg(1.0, std::max<std::size_t>(128, 4 * m));
    assembly::GalerkinBasis basis =
        assembly::build_basis(assembly::BasisKind::sine_spectral, m, sg);
    TimeGrid tg(0.0, 1.0, n_steps);
    return assembly::assemble(spec, basis, tg);
}

inline std::vector<double> bandlimited_trajectory(std::mt19937_64& rng, const TimeGrid& g,
                                                  int n_modes = 16) {
    std::normal_distribution<double> nd;
    std::vector<double> a(static_cast<std::size_t>(n_modes) + 1),
        b(static_cast<std::size_t>(n_modes) + 1);
    for (auto& v : a) v = nd(rng);
    for (auto& v : b) v = nd(rng);
    std::vector<double> out(g.n_nodes());
    const double T = g.t_end() - g.t_start();
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double t = (g.node(j) - g.t_start()) / T;
        double acc = a[0];
        for (int k = 1; k <= n_modes; ++k)
            acc += (a[static_cast<std::size_t>(k)] * std::sin(2.0 * M_PI * k * t) +
                    b[static_cast<std::size_t>(k)] * std::cos(2.0 * M_PI * k * t)) /
                   static_cast<double>(k);
        out[j] = acc;
    }
    return out;
}

} // namespace detail

/// Appendix operator identities at n_steps = 1024 on (0,1).
inline std::vector<CheckRow> operator_suite(std::size_t n_steps = 1024) {
    using namespace detail;
    const TimeGrid g(0.0, 1.0, n_steps);
    std::vector<Case> cases;

    for (double alpha : {0.25, 0.5, 0.75}) {
        cases.push_back([=] {
            TimeSeries u = TimeSeries::sampled(g, [](double) { return 3.0; });
            TimeSeries d = fracops::rl_derivative_left(u, FracOrder(alpha), 3.0);
            double r = 0.0;
            const double g1 = special::gamma_fn(1.0 - alpha);
            for (std::size_t j = 1; j <= n_steps; ++j) {
                const double expect = 3.0 / (g1 * std::pow(g.node(j) - g.t_start(), alpha));
                r = std::max(r, std::abs(d[j] - expect));
            }
            return finish({"operators", "constant_rule_rl", "u=3", alpha, n_steps, 0, 0, r, 1e-14});
        });
        cases.push_back([=] {
            TimeSeries u = TimeSeries::sampled(g, [](double) { return 3.0; });
            TimeSeries d = fracops::caputo_derivative_left(u, FracOrder(alpha), 3.0);
            return finish({"operators", "constant_rule_caputo", "u=3", alpha, n_steps, 0, 0,
                           max_abs(d), 1e-15});
        });
    }

    struct SemiCase { const char* name; double (*f)(double); double beta, gamma; };
    static constexpr double (*kOne)(double) = [](double) { return 1.0; };
    static constexpr double (*kPoly)(double) = [](double t) { return 1.0 + t * t; };
    const SemiCase semis[] = {{"u=1", kOne, 0.5, 0.5},
                              {"u=1+t^2", kPoly, 0.3, 0.4},
                              {"bump", &smooth_bump, 0.3, 0.4}};
    for (const auto& sc : semis) {
        cases.push_back([=] {
            TimeSeries u = sample(g, sc.f);
            TimeSeries comp = fracops::rl_integral_left(
                fracops::rl_integral_left(u, FracOrder(sc.gamma)), FracOrder(sc.beta));
            TimeSeries direct =
                fracops::rl_integral_left(u, FracOrder(sc.beta + sc.gamma));
            const double r = max_abs_diff(comp, direct, kWindowSkip);
            return finish({"operators", "semigroup", sc.name, sc.beta + sc.gamma, n_steps, 0, 0,
                           r, 1e-3});
        });
    }

    struct FnCase { const char* name; double (*f)(double); };
    const FnCase inv_fns[] = {{"u=t", [](double t) { return t; }},
                              {"u=t^2", [](double t) { return t * t; }},
                              {"bump", &smooth_bump}};
    for (const auto& fc : inv_fns) {
        for (double alpha : {0.25, 0.5, 0.75}) {
            cases.push_back([=] {
                TimeSeries u = sample(g, fc.f);
                TimeSeries d = fracops::rl_derivative_left(u, FracOrder(alpha / 2.0), 0.0);
                TimeSeries comp = fracops::rl_integral_left(d, FracOrder(alpha / 2.0));
                const double r = max_abs_diff(comp, u, kWindowSkip);
                return finish({"operators", "inverse", fc.name, alpha, n_steps, 0, 0, r, 1e-3});
            });
        }
    }

    const FnCase split_fns[] = {{"u=t", [](double t) { return t; }},
                                {"u=t^2", [](double t) { return t * t; }},
                                {"gentle_bump", &gentle_bump}};
    for (const auto& fc : split_fns) {
        for (double alpha : {0.25, 0.5, 0.75}) {
            cases.push_back([=] {
                TimeSeries u = sample(g, fc.f);
                TimeSeries dh = fracops::rl_derivative_left(u, FracOrder(alpha / 2.0), 0.0);
                TimeSeries dd = fracops::rl_derivative_left(dh, FracOrder(alpha / 2.0), 0.0);
                TimeSeries da = fracops::rl_derivative_left(u, FracOrder(alpha), 0.0);
                const double r = max_abs_diff(dd, da, kWindowSkip);
                return finish(
                    {"operators", "split_derivative", fc.name, alpha, n_steps, 0, 0, r, 1e-3});
            });
        }
    }

    for (double alpha : {0.25, 0.5, 0.75}) {
        cases.push_back([=] {
            TimeSeries u = sample(g, &smooth_bump);
            TimeSeries v = sample(g, &smooth_bump_b);
            TimeSeries du = fracops::rl_derivative_left(u, FracOrder(alpha / 2.0), 0.0);
            TimeSeries dv = fracops::rl_derivative_right(v, FracOrder(alpha / 2.0), 0.0);
            TimeSeries pl = TimeSeries::zeros(g), pr = TimeSeries::zeros(g);
            for (std::size_t j = 0; j < pl.size(); ++j) {
                pl.values[j] = du[j] * v[j];
                pr.values[j] = u[j] * dv[j];
            }
            const double r = std::abs(trapezoid(pl) - trapezoid(pr));
            return finish(
                {"operators", "parts_derivative", "bumps", alpha, n_steps, 0, 0, r, 1e-3});
        });
        cases.push_back([=] {
            TimeSeries u = sample(g, &smooth_bump);
            TimeSeries v = sample(g, &smooth_bump_b);
            TimeSeries iu = fracops::rl_integral_left(u, FracOrder(alpha / 2.0));
            TimeSeries iv = fracops::rl_integral_right(v, FracOrder(alpha / 2.0));
            TimeSeries pl = TimeSeries::zeros(g), pr = TimeSeries::zeros(g);
            for (std::size_t j = 0; j < pl.size(); ++j) {
                pl.values[j] = iu[j] * v[j];
                pr.values[j] = u[j] * iv[j];
            }
            const double r = std::abs(trapezoid(pl) - trapezoid(pr));
            return finish({"operators", "parts_integral", "bumps", alpha, n_steps, 0, 0, r, 1e-3});
        });
    }

    return run_cases(cases);
}

/// Fourier-side checks: Plancherel, path agreement, branch correctness, the
/// two energy-equivalence identities, the Poincare family, H^1 containment.
inline std::vector<CheckRow> spectral_suite() {
    using namespace detail;
    std::vector<Case> cases;

    cases.push_back([] {
        TimeGrid g(0.0, 1.0, 777);
        TimeSeries u = sample(g, &smooth_bump);
        const double r = fracspace::plancherel_residual(u, 8);
        return finish({"spectral", "plancherel", "bump/n=777", 0.0, 777, 0, 0, r, 1e-10});
    });

    for (double alpha : {0.25, 0.5, 0.75}) {
        cases.push_back([=] {
            TimeGrid g(0.0, 1.0, 2048);
            TimeSeries u = sample(g, &cross_path_bump);
            TimeSeries spec =
                fracspace::spectral_frac_derivative(u, FracOrder(alpha), fracops::Side::left, 8);
            TimeSeries quad = fracops::rl_derivative_left(u, FracOrder(alpha), 0.0);
            const double r = max_abs_diff(spec, quad);
            return finish({"spectral", "two_path_agreement", "0.05*sin^4(pi t)", alpha, 2048, 0,
                           0, r, 1e-3});
        });
    }

    cases.push_back([] {
        TimeGrid g(0.0, 1.0, 1024);
        TimeSeries u = sample(g, &smooth_bump);
        fracspace::SpectralSample s = fracspace::spectral_transform(u, 8);
        auto padded = fracspace::detail::spectral_derivative_padded(s, 0.5, fracops::Side::left);
        double imag_max = 0.0;
        for (const auto& z : padded) imag_max = std::max(imag_max, std::abs(z.imag()));
        return finish({"spectral", "hermitian_symmetry", "bump", 0.5, 1024, 0, 0,
                       imag_max / max_abs(u), 1e-10});
    });

    cases.push_back([] {
        double r = 0.0;
        for (double w : {-3.7, -0.2, 0.4, 12.0}) {
            for (double p : {0.125, 0.25, 0.375}) {
                const auto left = fracspace::detail::complex_power(w, p, +1.0);
                const auto right = fracspace::detail::complex_power(w, p, -1.0);
                const double sgn = w > 0.0 ? 1.0 : -1.0;
                const std::complex<double> rot(std::cos(p * M_PI * sgn),
                                               -std::sin(p * M_PI * sgn));
                r = std::max(r, std::abs(right - left * rot) / std::abs(left));
            }
        }
        return finish({"spectral", "branch_correctness", "complex_power", 0.0, 0, 0, 0, r, 1e-13});
    });

    struct EqCase { const char* name; double (*f)(double); };
    const EqCase eq_fns[] = {{"sin^4(pi t)", [](double t) { return std::pow(std::sin(M_PI * t), 4); }},
                             {"zero_mean_wave", &zero_mean_wave},
                             {"bump", &smooth_bump}};
    for (const auto& fc : eq_fns) {
        for (double alpha : {0.25, 0.5, 0.75}) {
            cases.push_back([=] {
                TimeGrid g(0.0, 1.0, 4096);
                TimeSeries u = sample(g, fc.f);
                auto rep = fracspace::energy_equivalence_check(u, FracOrder(alpha), 256);
                CheckRow row{"spectral", "energy_equiv_derivative", fc.name, alpha, 4096,
                             rep.lhs, rep.rhs, std::abs(rep.ratio - 1.0), 1e-3};
                return finish(row);
            });
            cases.push_back([=] {
                TimeGrid g(0.0, 1.0, 4096);
                TimeSeries u = sample(g, fc.f);
                auto rep = fracspace::energy_equivalence_integral_check(u, FracOrder(alpha), 8);
                CheckRow row{"spectral", "energy_equiv_integral", fc.name, alpha, 4096,
                             rep.lhs, rep.rhs, std::abs(rep.ratio - 1.0), 1e-3};
                return finish(row);
            });
        }
    }

    cases.push_back([] {
        TimeGrid g(0.0, 1.0, 1024);
        double worst = 0.0;
        for (double c : {0.3, 0.5, 0.7}) {
            for (double r : {0.1, 0.2, 0.28}) {
                TimeSeries u = TimeSeries::sampled(g, [&](double t) {
                    const double y = (t - c) / r;
                    return std::abs(y) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - y * y));
                });
                worst = std::max(worst, fracspace::poincare_ratio(u, FracOrder(0.5)));
            }
        }
        // empirical lower bound for the Poincare constant; the suite bound 10
        // is a reporting threshold, not a paper constant
        return finish({"spectral", "poincare_family", "9 bumps", 0.5, 1024, 0, 0, worst, 10.0});
    });

    cases.push_back([] {
        std::vector<double> half_norms, one_norms;
        for (std::size_t n : {256, 512, 1024, 2048}) {
            TimeGrid g(0.0, 1.0, n);
            TimeSeries u = TimeSeries::sampled(g, [](double) { return 1.0; });
            half_norms.push_back(fracspace::spectral_seminorm(u, 0.25, 8));
            one_norms.push_back(fracspace::spectral_seminorm(u, 1.0, 8));
        }
        double drift = 0.0, min_growth = 1e300;
        for (std::size_t i = 1; i < half_norms.size(); ++i) {
            drift = std::max(drift, std::abs(half_norms[i] / half_norms[0] - 1.0));
            min_growth = std::min(min_growth, one_norms[i] / one_norms[i - 1]);
        }
        const double r = std::max(drift, std::max(0.0, 1.2 - min_growth));
        return finish({"spectral", "h1_containment_trend", "u=1 zero-extension", 0.5, 2048, 0, 0,
                       r, 0.05});
    });

    return run_cases(cases);
}

/// Energy and solution-level checks (seeded random trajectories).
inline std::vector<CheckRow> energy_suite(std::uint64_t seed) {
    using namespace detail;
    std::vector<Case> cases;

    for (double alpha : {0.25, 0.5, 0.75}) {
        cases.push_back([=] {
            assembly::GalerkinSystem sys = energy_system(0.5, 2, 1024);
            std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(alpha * 1000.0));
            double worst = 0.0;
            for (int rep = 0; rep < 100; ++rep) {
                Eigen::MatrixXd traj(2, 1025);
                for (int r = 0; r < 2; ++r) {
                    auto row = bandlimited_trajectory(rng, sys.tgrid);
                    for (std::size_t j = 0; j <= 1024; ++j)
                        traj(r, static_cast<Eigen::Index>(j)) = row[j];
                }
                const double mn =
                    diagnostics::dissipation_nonneg_check(traj, sys, FracOrder(alpha));
                const double scale = diagnostics::dissipation_scale(traj, sys);
                worst = std::max(worst, std::max(0.0, -mn / scale));
            }
            return finish({"energy", "dissipation_nonneg", "100 bandlimited draws", alpha, 1024,
                           0, 0, worst, 1e-6});
        });
    }

    cases.push_back([] {
        assembly::GalerkinSystem sys = energy_system(0.5, 4, 512);
        volterra::FieldHistory h = volterra::solve(sys, sys.tgrid);
        diagnostics::EnergyReport rep = diagnostics::energy_report(h, sys);
        return finish({"energy", "balance_residual", "benchmark", 0.5, 512, 0, 0,
                       std::abs(rep.balance_residual.back()), 1e-4});
    });

    cases.push_back([] {
        double worst = 0.0;
        for (double alpha : {0.25, 0.5, 0.75}) {
            assembly::GalerkinSystem sys = energy_system(alpha, 4, 128, 1.0, true);
            worst = std::max(worst, diagnostics::uniqueness_probe(sys));
        }
        return finish({"energy", "uniqueness_zero_data", "3 alphas", 0.0, 128, 0, 0, worst, 1e-12});
    });

    cases.push_back([] {
        assembly::GalerkinSystem s1 = energy_system(0.5, 4, 256);
        assembly::GalerkinSystem s2 = energy_system(0.5, 4, 256, 100.0);
        const double r1 =
            diagnostics::apriori_check(volterra::solve(s1, s1.tgrid), s1).ratio;
        const double r2 =
            diagnostics::apriori_check(volterra::solve(s2, s2.tgrid), s2).ratio;
        return finish({"energy", "apriori_scale_invariance", "x100", 0.5, 256, r1, r2,
                       std::abs(r2 / r1 - 1.0), 1e-10});
    });

    cases.push_back([] {
        assembly::GalerkinSystem sys = energy_system(0.5, 4, 256);
        volterra::FieldHistory h = volterra::solve(sys, sys.tgrid);
        const double clean = diagnostics::weak_residual(h, sys, 4);
        return finish({"energy", "weak_residual", "benchmark", 0.5, 256, 0, 0, clean, 1e-3});
    });

    cases.push_back([] {
        assembly::GalerkinSystem sys = energy_system(0.5, 4, 256);
        volterra::FieldHistory h = volterra::solve(sys, sys.tgrid);
        const double clean = diagnostics::weak_residual(h, sys, 4);
        double worst_ratio = 0.0;
        for (int mode = 0; mode < 4; ++mode) {
            volterra::FieldHistory p = h;
            p.coeffs.row(mode).array() += 0.1;
            worst_ratio = std::max(worst_ratio, clean / diagnostics::weak_residual(p, sys, 4));
        }
        return finish({"energy", "weak_residual_discriminates", "+0.1 per mode", 0.5, 256, 0, 0,
                       worst_ratio, 0.1});
    });

    return run_cases(cases);
}

inline std::vector<CheckRow> run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "operators") return operator_suite();
    if (name == "spectral") return spectral_suite();
    if (name == "energy") return energy_suite(seed);
    if (name == "all") {
        std::vector<CheckRow> rows = operator_suite();
        std::vector<CheckRow> s = spectral_suite();
        rows.insert(rows.end(), s.begin(), s.end());
        std::vector<CheckRow> e = energy_suite(seed);
        rows.insert(rows.end(), e.begin(), e.end());
        return rows;
    }
    throw ConfigError("verify: unknown suite '" + name +
                      "' (expected operators, spectral, energy or all)");
}

} // namespace fracvisco::verify
