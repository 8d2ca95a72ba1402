#pragma once

// Fourier-side fractional Sobolev machinery: the spectral definition of the
// Riemann-Liouville derivatives via (+-i omega)^alpha, the |.|_alpha
// seminorms, the 1/cos(alpha pi/2) energy-equivalence identities, and an
// empirical Poincare constant probe.
//
// The continuous theory lives on the whole real line; numerically we work
// with the zero-extension of the sampled window on a zero-padded periodic
// grid and assert convergence rather than exactness.

#include <complex>
#include <vector>

#include "fracvisco/fft.hpp"
#include "fracvisco/fracops.hpp"
#include "fracvisco/grid.hpp"
#include "fracvisco/special.hpp"

namespace fracvisco::fracspace {

using fracops::Side;

/// Discrete transform of the zero-extended series. coefficients[k] holds
/// dt * DFT, i.e. an approximation of the continuous Fourier transform at
/// the signed angular frequency omega(k).
struct SpectralSample {
    std::size_t n_points;      // power-of-two block holding the original samples
    std::size_t padded_length; // pad_factor * n_points rounded up to a power of two
    int pad_factor;
    double dt;
    std::vector<std::complex<double>> coefficients;

    double omega(std::size_t k) const noexcept {
        const double N = static_cast<double>(padded_length);
        const double kk = (k <= padded_length / 2) ? static_cast<double>(k)
                                                   : static_cast<double>(k) - N;
        return 2.0 * M_PI * kk / (N * dt);
    }
    double d_omega() const noexcept {
        return 2.0 * M_PI / (static_cast<double>(padded_length) * dt);
    }
};

struct FracNormReport {
    double l2_norm;
    double seminorm_alpha;   // || |omega|^alpha u_hat || route
    double full_norm;        // (l2^2 + seminorm^2)^{1/2}
    double left_deriv_norm;  // time-domain route through the spectral derivative
};

struct EquivalenceReport {
    double lhs;
    double rhs;
    double ratio;
};

namespace detail {

/// Principal-branch power (sign * i * omega)^p = |omega|^p e^{sign * i p pi/2 sgn(omega)}.
inline std::complex<double> complex_power(double omega, double p, double sign) {
    if (omega == 0.0) return (p == 0.0) ? 1.0 : 0.0;
    const double mag = std::pow(std::abs(omega), p);
    const double phase = sign * 0.5 * p * M_PI * (omega > 0.0 ? 1.0 : -1.0);
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

inline double endpoint_mass(const TimeSeries& u) {
    const double m = max_abs(u);
    if (m == 0.0) return 0.0;
    return std::max(std::abs(u.values.front()), std::abs(u.values.back())) / m;
}

/// Padded spectral derivative, before restriction to the window.
inline std::vector<std::complex<double>> spectral_derivative_padded(const SpectralSample& s,
                                                                    double alpha, Side side) {
    const double sign = (side == Side::left) ? 1.0 : -1.0;
    std::vector<std::complex<double>> v(s.padded_length);
    for (std::size_t k = 0; k < s.padded_length; ++k)
        v[k] = s.coefficients[k] * complex_power(s.omega(k), alpha, sign) / s.dt;
    fft_radix2(v, true);
    return v;
}

} // namespace detail

/// Samples must be numerically compactly supported inside the window: the
/// zero-extension theorem behind the spectral route needs no endpoint mass.
inline void require_compact_support(const TimeSeries& u, const char* who) {
    if (detail::endpoint_mass(u) > 1e-12)
        throw std::domain_error(std::string(who) +
                                ": series must vanish at the window endpoints "
                                "(relative endpoint mass above 1e-12)");
}

inline SpectralSample spectral_transform(const TimeSeries& u, int pad_factor = 8) {
    if (pad_factor < 2)
        throw std::invalid_argument("spectral_transform: pad_factor must be >= 2");
    require_finite(u, "spectral_transform");
    SpectralSample s;
    s.n_points = detail::next_pow2(u.size());
    s.padded_length = detail::next_pow2(static_cast<std::size_t>(pad_factor) * s.n_points);
    s.pad_factor = pad_factor;
    s.dt = u.grid.dt();
    s.coefficients.assign(s.padded_length, {0.0, 0.0});
    for (std::size_t j = 0; j < u.size(); ++j) s.coefficients[j] = u.values[j];
    detail::fft_radix2(s.coefficients, false);
    for (auto& c : s.coefficients) c *= s.dt;
    return s;
}

/// Relative Plancherel defect of the discrete transform pair (diagnostic;
/// exact up to roundoff by the discrete Parseval identity).
inline double plancherel_residual(const TimeSeries& u, int pad_factor = 8) {
    SpectralSample s = spectral_transform(u, pad_factor);
    double time_side = 0.0;
    for (double v : u.values) time_side += v * v;
    time_side *= s.dt;
    double freq_side = 0.0;
    for (const auto& c : s.coefficients) freq_side += std::norm(c);
    freq_side *= s.d_omega() / (2.0 * M_PI);
    if (time_side == 0.0) return std::abs(freq_side);
    return std::abs(time_side - freq_side) / time_side;
}

/// |u-tilde|_order: L2 norm of |omega|^order u_hat for the zero-extension.
/// No endpoint check; callers probing non-vanishing windows (H^1 containment
/// trends) use this directly.
inline double spectral_seminorm(const TimeSeries& u, double order, int pad_factor = 8) {
    SpectralSample s = spectral_transform(u, pad_factor);
    double acc = 0.0;
    for (std::size_t k = 0; k < s.padded_length; ++k) {
        const double w = std::pow(std::abs(s.omega(k)), order);
        acc += w * w * std::norm(s.coefficients[k]);
    }
    return std::sqrt(acc * s.d_omega() / (2.0 * M_PI));
}

/// Inverse transform of (+-i omega)^alpha u_hat restricted to the window.
inline TimeSeries spectral_frac_derivative(const TimeSeries& u, FracOrder alpha, Side side,
                                           int pad_factor = 8) {
    if (!(alpha.value() >= 0.0) || alpha.value() >= 1.0)
        throw std::domain_error("spectral_frac_derivative: order must lie in [0,1)");
    require_compact_support(u, "spectral_frac_derivative");
    if (alpha.value() == 0.0) return u;
    SpectralSample s = spectral_transform(u, pad_factor);
    auto padded = detail::spectral_derivative_padded(s, alpha.value(), side);
    TimeSeries out = TimeSeries::zeros(u.grid);
    for (std::size_t j = 0; j < u.size(); ++j) out.values[j] = padded[j].real();
    return out;
}

inline FracNormReport frac_norm(const TimeSeries& u, FracOrder alpha, int pad_factor = 8) {
    if (!(alpha.value() >= 0.0) || alpha.value() >= 1.0)
        throw std::domain_error("frac_norm: order must lie in [0,1)");
    require_compact_support(u, "frac_norm");
    SpectralSample s = spectral_transform(u, pad_factor);

    double l2sq = 0.0;
    for (double v : u.values) l2sq += v * v;
    l2sq *= s.dt;

    double semisq = 0.0;
    for (std::size_t k = 0; k < s.padded_length; ++k) {
        const double w = std::pow(std::abs(s.omega(k)), alpha.value());
        semisq += w * w * std::norm(s.coefficients[k]);
    }
    semisq *= s.d_omega() / (2.0 * M_PI);

    auto padded = detail::spectral_derivative_padded(s, alpha.value(), Side::left);
    double dsq = 0.0;
    for (const auto& z : padded) dsq += std::norm(z);
    dsq *= s.dt;

    return FracNormReport{std::sqrt(l2sq), std::sqrt(semisq), std::sqrt(l2sq + semisq),
                          std::sqrt(dsq)};
}

/// Derivative form of the energy equivalence:
///   ||aD^{alpha/2} u||^2_{L2(R)} = (1/cos(alpha pi/2)) int_a^b aD^{alpha/2}u tD_b^{alpha/2}u dt.
/// lhs comes from the spectral seminorm of the zero-extension, rhs from the
/// quadrature half-derivatives on the window: two independent code paths.
inline EquivalenceReport energy_equivalence_check(const TimeSeries& u, FracOrder alpha,
                                                  int pad_factor = 256) {
    if (!(alpha.value() > 0.0))
        throw std::domain_error("energy_equivalence_check: order must be positive");
    if (alpha.value() > 0.99)
        throw std::domain_error(
            "energy_equivalence_check: 1/cos(alpha pi/2) blows up; alpha capped at 0.99");
    require_compact_support(u, "energy_equivalence_check");

    const double half = 0.5 * alpha.value();
    const double semi = spectral_seminorm(u, half, pad_factor);
    const double lhs = semi * semi;

    TimeSeries dl = fracops::rl_derivative_left(u, FracOrder(half), 0.0);
    TimeSeries dr = fracops::rl_derivative_right(u, FracOrder(half), 0.0);
    TimeSeries prod = TimeSeries::zeros(u.grid);
    for (std::size_t j = 0; j < prod.size(); ++j) prod.values[j] = dl[j] * dr[j];
    const double rhs = trapezoid(prod) / std::cos(0.5 * alpha.value() * M_PI);

    const double tiny = 1e-300;
    const double ratio = (std::abs(lhs) < tiny && std::abs(rhs) < tiny) ? 1.0 : lhs / rhs;
    return EquivalenceReport{lhs, rhs, ratio};
}

/// Integral form:
///   ||aI^{alpha/2} u||^2_{L2(R)} = (1/cos(alpha pi/2)) int_a^b aI^{alpha/2}u tI_b^{alpha/2}u dt,
/// both sides by product-integration quadrature. The left norm extends over
/// the real line; the zero-extension is integrated on an `extension`-times
/// longer grid and the remaining t^{2(alpha/2)-2} tail is completed
/// analytically from the first four moments of u.
inline EquivalenceReport energy_equivalence_integral_check(const TimeSeries& u, FracOrder alpha,
                                                           int extension = 8) {
    if (!(alpha.value() > 0.0))
        throw std::domain_error("energy_equivalence_integral_check: order must be positive");
    if (alpha.value() > 0.99)
        throw std::domain_error(
            "energy_equivalence_integral_check: 1/cos(alpha pi/2) blows up; alpha capped at 0.99");
    if (extension < 2)
        throw std::invalid_argument("energy_equivalence_integral_check: extension must be >= 2");
    require_finite(u, "energy_equivalence_integral_check");

    const double mu = 0.5 * alpha.value();
    const TimeGrid& g = u.grid;
    const double len = g.t_end() - g.t_start();

    // rhs on the window; the cross product of left/right integrals is
    // supported exactly there.
    TimeSeries il = fracops::rl_integral_left(u, FracOrder(mu));
    TimeSeries ir = fracops::rl_integral_right(u, FracOrder(mu));
    TimeSeries prod = TimeSeries::zeros(g);
    for (std::size_t j = 0; j < prod.size(); ++j) prod.values[j] = il[j] * ir[j];
    const double rhs = trapezoid(prod) / std::cos(0.5 * alpha.value() * M_PI);

    // lhs on the zero-extended grid
    TimeGrid gext(g.t_start(), g.t_start() + static_cast<double>(extension) * len,
                  static_cast<std::size_t>(extension) * g.n_steps());
    TimeSeries uext = TimeSeries::zeros(gext);
    for (std::size_t j = 0; j < u.size(); ++j) uext.values[j] = u.values[j];
    TimeSeries iext = fracops::rl_integral_left(uext, FracOrder(mu));
    TimeSeries sq = TimeSeries::zeros(gext);
    for (std::size_t j = 0; j < sq.size(); ++j) sq.values[j] = iext[j] * iext[j];
    double lhs = trapezoid(sq);

    // analytic tail: I^mu u(t) ~ (1/Gamma(mu)) sum_i c_i m_i (t-a)^{mu-1-i}
    constexpr int kMoments = 4;
    double moments[kMoments];
    for (int i = 0; i < kMoments; ++i) {
        TimeSeries w = TimeSeries::zeros(g);
        for (std::size_t j = 0; j < w.size(); ++j)
            w.values[j] = u.values[j] * std::pow(g.node(j) - g.t_start(), i);
        moments[i] = trapezoid(w);
    }
    double binom[kMoments];
    binom[0] = 1.0;
    for (int i = 1; i < kMoments; ++i)
        binom[i] = binom[i - 1] * (static_cast<double>(i) - mu) / static_cast<double>(i);
    const double P = static_cast<double>(extension) * len;
    const double gm = special::gamma_fn(mu);
    double tail = 0.0;
    for (int i = 0; i < kMoments; ++i)
        for (int j = 0; j < kMoments; ++j)
            tail += binom[i] * binom[j] * moments[i] * moments[j] *
                    std::pow(P, 2.0 * mu - 1.0 - i - j) /
                    (static_cast<double>(i + j + 1) - 2.0 * mu);
    lhs += tail / (gm * gm);

    const double tiny = 1e-300;
    const double ratio = (std::abs(lhs) < tiny && std::abs(rhs) < tiny) ? 1.0 : lhs / rhs;
    return EquivalenceReport{lhs, rhs, ratio};
}

/// ||u||_{L2(a,b)} / ||aD^{alpha/2} u||_{L2(a,b)}; the supremum over a test
/// family lower-bounds the fractional Poincare constant.
inline double poincare_ratio(const TimeSeries& u, FracOrder alpha) {
    if (!(alpha.value() > 0.0) || alpha.value() >= 1.0)
        throw std::domain_error("poincare_ratio: order must lie in (0,1)");
    if (max_abs(u) == 0.0) throw std::domain_error("poincare_ratio: u must be nonzero");
    require_compact_support(u, "poincare_ratio");
    TimeSeries d = fracops::rl_derivative_left(u, FracOrder(0.5 * alpha.value()), 0.0);
    return l2_norm(u) / l2_norm(d);
}

} // namespace fracvisco::fracspace
