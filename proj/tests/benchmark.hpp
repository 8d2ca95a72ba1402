#pragma once

// Shared manufactured benchmark for solver-level tests:
//   u*(x,t) = sin(pi x / L) (1 + t^2)
// with constant coefficients rho, a, b, so that every term of the forcing is
// closed-form via CapD^alpha t^2 = 2 t^{2-alpha}/Gamma(3-alpha).

#include <cmath>
#include <random>

#include "fracvisco/assembly.hpp"
#include "fracvisco/special.hpp"

namespace benchmark {

using namespace fracvisco;

struct Manufactured {
    assembly::ProblemSpec spec;
    double rho, a, b, L;

    /// exact sine-basis coefficient of mode 1 (L2-orthonormal basis)
    double exact_coeff(double t) const { return (1.0 + t * t) * std::sqrt(L / 2.0); }
    double exact_velocity(double t) const { return 2.0 * t * std::sqrt(L / 2.0); }
};

inline Manufactured manufactured_problem(double alpha, double rho = 1.0, double a = 1.0,
                                         double b = 1.0, double L = 1.0, double T = 1.0) {
    const double w2 = std::pow(M_PI / L, 2);
    auto forcing = [=](double x, double t) {
        const double shape = std::sin(M_PI * x / L);
        const double capd_t2 =
            2.0 * std::pow(t, 2.0 - alpha) / special::gamma_fn(3.0 - alpha);
        return shape * (2.0 * rho + b * w2 * capd_t2 + a * w2 * (1.0 + t * t));
    };
    assembly::MaterialModel mat{[rho](double) { return rho; }, [a](double) { return a; },
                                [b](double) { return b; }, 0.5 * std::min({a, b, 1.0}),
                                0.5 * std::min(rho, 1.0)};
    assembly::ProblemSpec spec{L,
                               T,
                               FracOrder(alpha),
                               mat,
                               forcing,
                               [L](double x) { return std::sin(M_PI * x / L); },
                               [](double) { return 0.0; }};
    return Manufactured{spec, rho, a, b, L};
}

/// Band-limited random trajectory: smooth enough that the trapezoid outer
/// integral of the dissipation stays inside the suite tolerances.
inline std::vector<double> random_bandlimited(std::mt19937_64& rng, const TimeGrid& g,
                                              int n_modes = 16) {
    std::normal_distribution<double> nd;
    std::vector<double> a(n_modes + 1), b(n_modes + 1);
    for (auto& v : a) v = nd(rng);
    for (auto& v : b) v = nd(rng);
    std::vector<double> out(g.n_nodes());
    const double T = g.t_end() - g.t_start();
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double t = (g.node(j) - g.t_start()) / T;
        double acc = a[0];
        for (int k = 1; k <= n_modes; ++k)
            acc += (a[k] * std::sin(2.0 * M_PI * k * t) + b[k] * std::cos(2.0 * M_PI * k * t)) /
                   static_cast<double>(k);
        out[j] = acc;
    }
    return out;
}

} // namespace benchmark
