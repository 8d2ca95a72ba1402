#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace fracvisco::special {

namespace detail {

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficient set).
// Relative error below 1e-14 on the positive real axis.
inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,     -0.49191381609762019978,
    0.33994649984811888699e-4, 0.46523628927048575665e-4,
    -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,
    -0.16431810653676389022e-3, 0.84418223983852743293e-4,
    -0.26190838401581408670e-4, 0.36899182659531622704e-5,
};

// Multiplicative perturbation applied to every gamma evaluation.
// 1.0 in normal operation; the FRACVISCO_DEBUG_BREAK_GAMMA environment
// variable (or set_gamma_perturbation) injects a fault so that the verify
// suites can prove they would catch a broken special-function kernel.
inline std::atomic<double>& gamma_perturbation() {
    static std::atomic<double> p{[] {
        const char* env = std::getenv("FRACVISCO_DEBUG_BREAK_GAMMA");
        return (env && env[0] != '\0' && env[0] != '0') ? 1.001 : 1.0;
    }()};
    return p;
}

inline double lanczos_gamma(double x) {
    // Valid for x >= 0.5; callers shift smaller arguments via recurrence.
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 15; ++i) a += kLanczos[i] / (z + static_cast<double>(i));
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

} // namespace detail

inline void set_gamma_perturbation(double factor) { detail::gamma_perturbation() = factor; }

/// Gamma function on the positive real axis.
inline double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: argument must be positive");
    double value;
    if (x >= 0.5) {
        value = detail::lanczos_gamma(x);
    } else {
        // Gamma(x) = Gamma(x+1)/x keeps the Lanczos kernel away from the pole.
        value = detail::lanczos_gamma(x + 1.0) / x;
    }
    return value * detail::gamma_perturbation().load(std::memory_order_relaxed);
}

} // namespace fracvisco::special
