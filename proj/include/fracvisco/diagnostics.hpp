#pragma once

// Physics and analysis checks on computed histories: the energy balance
//   E(t) - E(0) = int_0^t <f, u'> ds - int_0^t (b I^{1-alpha} u'_x, u'_x) ds,
// nonnegativity of the accumulated viscous dissipation, the a-priori energy
// estimate as a scale-invariant boundedness probe, the weak-form residual
// against a separated test family, and the zero-data uniqueness probe.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "fracvisco/assembly.hpp"
#include "fracvisco/fracops.hpp"
#include "fracvisco/grid.hpp"
#include "fracvisco/volterra.hpp"

namespace fracvisco::diagnostics {

using assembly::GalerkinSystem;
using volterra::FieldHistory;

struct EnergyReport {
    TimeGrid tgrid;
    std::vector<double> kinetic;          // 1/2 ||sqrt(rho) u'||^2
    std::vector<double> elastic;          // 1/2 (a u_x, u_x)
    std::vector<double> total;            // E(t)
    std::vector<double> work;             // int_0^t <f, u'>
    std::vector<double> dissipation;      // int_0^t (b I^{1-alpha} u'_x, u'_x)
    std::vector<double> balance_residual; // E(t) - E(0) - work + dissipation
};

namespace detail {

inline void require_same_grid(const FieldHistory& h, const GalerkinSystem& s, const char* who) {
    if (!(h.tgrid == s.tgrid))
        throw std::invalid_argument(std::string(who) + ": history and system grids differ");
    if (h.coeffs.rows() != s.mass.rows())
        throw std::invalid_argument(std::string(who) + ": mode count mismatch");
}

/// Applies a per-mode left operator (kernel) to the rows of x.
inline Eigen::MatrixXd kernel_rows(const fracops::ConvolutionKernel& ker,
                                   const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        TimeSeries u = TimeSeries::zeros(ker.grid());
        for (Eigen::Index j = 0; j < x.cols(); ++j) u.values[static_cast<std::size_t>(j)] = x(r, j);
        TimeSeries v = ker.apply(u, 0.0);
        for (Eigen::Index j = 0; j < x.cols(); ++j) out(r, j) = v.values[static_cast<std::size_t>(j)];
    }
    return out;
}

inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t j = 1; j < f.size(); ++j)
        out[j] = out[j - 1] + 0.5 * dt * (f[j - 1] + f[j]);
    return out;
}

} // namespace detail

inline EnergyReport energy_report(const FieldHistory& history, const GalerkinSystem& sys) {
    detail::require_same_grid(history, sys, "energy_report");
    const std::size_t nn = history.tgrid.n_nodes();
    const double dt = history.tgrid.dt();
    EnergyReport rep{history.tgrid,
                     std::vector<double>(nn), std::vector<double>(nn), std::vector<double>(nn),
                     {}, {}, std::vector<double>(nn)};

    std::vector<double> power(nn), qdiss(nn);
    fracops::ConvolutionKernel k1ma = fracops::ConvolutionKernel::integral(
        FracOrder(1.0 - sys.alpha.value()), history.tgrid, fracops::Side::left);
    Eigen::MatrixXd iv = detail::kernel_rows(k1ma, history.velocity);

    for (std::size_t j = 0; j < nn; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const Eigen::VectorXd d = history.coeffs.col(jj);
        const Eigen::VectorXd v = history.velocity.col(jj);
        rep.kinetic[j] = 0.5 * v.dot(sys.mass * v);
        rep.elastic[j] = 0.5 * d.dot(sys.elastic * d);
        rep.total[j] = rep.kinetic[j] + rep.elastic[j];
        power[j] = sys.load.col(jj).dot(v);
        qdiss[j] = iv.col(jj).dot(sys.viscous * v);
    }
    // same trapezoid rule for both time integrals so the discrete balance
    // has no spurious O(dt) floor
    rep.work = detail::cumulative_trapezoid(power, dt);
    rep.dissipation = detail::cumulative_trapezoid(qdiss, dt);
    for (std::size_t j = 0; j < nn; ++j)
        rep.balance_residual[j] = rep.total[j] - rep.total[0] - rep.work[j] + rep.dissipation[j];
    return rep;
}

/// Minimum over t of the accumulated dissipation
///   D(t) = int_0^t (b I^{1-alpha} u_x, u_x) ds
/// for an arbitrary coefficient trajectory (rows = modes), not only solver
/// output. Nonnegative in the continuum for every L^2 trajectory.
inline double dissipation_nonneg_check(const Eigen::MatrixXd& trajectory,
                                       const GalerkinSystem& sys, FracOrder alpha) {
    if (trajectory.rows() != sys.viscous.rows())
        throw std::invalid_argument("dissipation_nonneg_check: mode count mismatch");
    if (trajectory.cols() != static_cast<Eigen::Index>(sys.tgrid.n_nodes()))
        throw std::invalid_argument("dissipation_nonneg_check: node count mismatch");
    fracops::ConvolutionKernel k = fracops::ConvolutionKernel::integral(
        FracOrder(1.0 - alpha.value()), sys.tgrid, fracops::Side::left);
    Eigen::MatrixXd iu = detail::kernel_rows(k, trajectory);
    std::vector<double> q(sys.tgrid.n_nodes());
    for (std::size_t j = 0; j < q.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        q[j] = iu.col(jj).dot(sys.viscous * trajectory.col(jj));
    }
    std::vector<double> acc = detail::cumulative_trapezoid(q, sys.tgrid.dt());
    double mn = 0.0;
    for (double v : acc) mn = std::min(mn, v);
    return mn;
}

/// Reference scale for dissipation tolerances: int_0^T (b u_x, u_x) dt.
inline double dissipation_scale(const Eigen::MatrixXd& trajectory, const GalerkinSystem& sys) {
    std::vector<double> q(sys.tgrid.n_nodes());
    for (std::size_t j = 0; j < q.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        q[j] = trajectory.col(jj).dot(sys.viscous * trajectory.col(jj));
    }
    return detail::cumulative_trapezoid(q, sys.tgrid.dt()).back();
}

struct AprioriReport {
    double sup_h1;          // max_t ||u(t)||_{H0^1}
    double sup_l2_velocity; // max_t ||u'(t)||_{L2}
    double frac_time_norm;  // ||u - g_m||_{H_0^{alpha/2}(0,T; H0^1)}
    double data_norm;       // ||f||_{L2(0,T;H^-1)} + ||g||_{H0^1} + ||h||_{L2}
    double ratio;           // lhs sum / data_norm
};

/// The discrete realization of the a-priori energy estimate. The
/// H_0^{alpha/2}-in-time norm is computed on u - g_m (homogenized at t=0),
/// with the half-order derivative applied per coefficient trajectory and
/// weighted by the H^1 spatial Gram matrix.
inline AprioriReport apriori_check(const FieldHistory& history, const GalerkinSystem& sys) {
    detail::require_same_grid(history, sys, "apriori_check");
    const std::size_t nn = history.tgrid.n_nodes();
    const double dt = history.tgrid.dt();

    double sup_h1 = 0.0, sup_v = 0.0;
    for (std::size_t j = 0; j < nn; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        sup_h1 = std::max(sup_h1, std::sqrt(history.coeffs.col(jj).dot(
                                      sys.gram_h1 * history.coeffs.col(jj))));
        sup_v = std::max(sup_v, std::sqrt(history.velocity.col(jj).dot(
                                    sys.gram_l2 * history.velocity.col(jj))));
    }

    Eigen::MatrixXd homog = history.coeffs.colwise() - sys.initial_displacement;
    fracops::ConvolutionKernel half = fracops::ConvolutionKernel::derivative(
        FracOrder(0.5 * sys.alpha.value()), history.tgrid, fracops::Side::left);
    Eigen::MatrixXd dhalf = detail::kernel_rows(half, homog);
    std::vector<double> q(nn);
    for (std::size_t j = 0; j < nn; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        q[j] = homog.col(jj).dot(sys.gram_h1 * homog.col(jj)) +
               dhalf.col(jj).dot(sys.gram_h1 * dhalf.col(jj));
    }
    const double frac_norm = std::sqrt(detail::cumulative_trapezoid(q, dt).back());

    Eigen::LDLT<Eigen::MatrixXd> stiff(sys.gram_h1);
    std::vector<double> fdual(nn);
    for (std::size_t j = 0; j < nn; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        fdual[j] = sys.load.col(jj).dot(stiff.solve(sys.load.col(jj)));
    }
    const double f_norm = std::sqrt(detail::cumulative_trapezoid(fdual, dt).back());
    const double g_norm =
        std::sqrt(sys.initial_displacement.dot(sys.gram_h1 * sys.initial_displacement));
    const double h_norm =
        std::sqrt(sys.initial_velocity.dot(sys.gram_l2 * sys.initial_velocity));
    const double data = f_norm + g_norm + h_norm;
    if (data == 0.0)
        throw std::domain_error("apriori_check: ratio undefined for zero data");
    const double lhs = sup_h1 + sup_v + frac_norm;
    return AprioriReport{sup_h1, sup_v, frac_norm, data, lhs / data};
}

/// Max mismatch of the weak form over the separated test family
/// phi = (1 - t/T)^p w_k, p = 1..3, k = 1..test_modes. Supplying custom time
/// factors (values and analytic derivatives) is allowed; factors must vanish
/// at t = T.
inline double weak_residual(const FieldHistory& history, const GalerkinSystem& sys,
                            std::size_t test_modes,
                            const std::vector<TimeSeries>& factors,
                            const std::vector<TimeSeries>& factor_derivs) {
    detail::require_same_grid(history, sys, "weak_residual");
    if (test_modes < 1 || static_cast<Eigen::Index>(test_modes) > sys.mass.rows())
        throw std::invalid_argument("weak_residual: test_modes out of range");
    if (factors.size() != factor_derivs.size() || factors.empty())
        throw std::invalid_argument("weak_residual: need matching factor/derivative lists");
    for (const auto& e : factors) {
        const double scale = std::max(1.0, max_abs(e));
        if (std::abs(e.values.back()) > 1e-12 * scale)
            throw std::invalid_argument(
                "weak_residual: test time factor must vanish at t = T");
    }

    const std::size_t nn = history.tgrid.n_nodes();
    const double dt = history.tgrid.dt();
    const double half_order = 0.5 * sys.alpha.value();

    // Caputo half-derivative of the homogenized trajectories
    Eigen::MatrixXd homog = history.coeffs.colwise() - sys.initial_displacement;
    fracops::ConvolutionKernel dleft = fracops::ConvolutionKernel::derivative(
        FracOrder(half_order), history.tgrid, fracops::Side::left);
    Eigen::MatrixXd s = detail::kernel_rows(dleft, homog);
    Eigen::MatrixXd vs = sys.viscous * s;           // (V s)(t)
    Eigen::MatrixXd mv = sys.mass * history.velocity;
    Eigen::MatrixXd kd = sys.elastic * history.coeffs;
    const Eigen::VectorXd mh = sys.mass * sys.initial_velocity;

    double worst = 0.0;
    for (std::size_t p = 0; p < factors.size(); ++p) {
        const TimeSeries& e = factors[p];
        const TimeSeries& ep = factor_derivs[p];
        // right-sided half derivative of the time factor; e(T) = 0 so the
        // singular term is absent
        TimeSeries r = fracops::rl_derivative_right(e, FracOrder(half_order), 0.0);
        for (std::size_t k = 0; k < test_modes; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            double time_term = 0.0, viscous_term = 0.0, elastic_term = 0.0, forcing_term = 0.0;
            for (std::size_t j = 0; j < nn; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                const double wj = (j == 0 || j == nn - 1) ? 0.5 * dt : dt;
                time_term += wj * mv(kk, jj) * ep.values[j];
                viscous_term += wj * vs(kk, jj) * r.values[j];
                elastic_term += wj * kd(kk, jj) * e.values[j];
                forcing_term += wj * sys.load(kk, jj) * e.values[j];
            }
            const double lhs = time_term - viscous_term - elastic_term;
            const double rhs = -forcing_term - e.values[0] * mh(kk);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

inline double weak_residual(const FieldHistory& history, const GalerkinSystem& sys,
                            std::size_t test_modes) {
    const TimeGrid& g = history.tgrid;
    const double T = g.t_end() - g.t_start();
    std::vector<TimeSeries> factors, derivs;
    for (int p = 1; p <= 3; ++p) {
        factors.push_back(TimeSeries::sampled(g, [&](double t) {
            return std::pow(1.0 - (t - g.t_start()) / T, p);
        }));
        derivs.push_back(TimeSeries::sampled(g, [&](double t) {
            return -static_cast<double>(p) *
                   std::pow(1.0 - (t - g.t_start()) / T, p - 1) / T;
        }));
    }
    return weak_residual(history, sys, test_modes, factors, derivs);
}

/// Runs the solver on the system as-is and returns max_t ||sqrt(rho) u(t)||.
/// With f = g = h = 0 this must vanish to machine precision; with data
/// injected it discriminates.
inline double uniqueness_probe(const GalerkinSystem& sys) {
    FieldHistory h = volterra::solve(sys, sys.tgrid);
    double worst = 0.0;
    for (std::size_t j = 0; j < sys.tgrid.n_nodes(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        worst = std::max(worst, std::sqrt(h.coeffs.col(jj).dot(sys.mass * h.coeffs.col(jj))));
    }
    return worst;
}

} // namespace fracvisco::diagnostics
