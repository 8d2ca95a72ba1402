#pragma once

// Galerkin spatial discretization on Omega = (0,L) with homogeneous
// Dirichlet conditions: sine-spectral or P1 finite element basis,
// rho/a/b-weighted mass and stiffness matrices, load vector history, and
// L2 projections of the initial data. Composite two-point Gauss quadrature
// per cell (exact for P1 products with piecewise-constant coefficients).

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fracvisco/errors.hpp"
#include "fracvisco/grid.hpp"

namespace fracvisco::assembly {

using CoefficientField = std::function<double(double)>;
using SpaceTimeField = std::function<double(double, double)>;

/// Coefficient fields with their ellipticity/density bounds:
/// nu <= a,b <= 1/nu and rho0 <= rho <= 1/rho0.
struct MaterialModel {
    CoefficientField rho;
    CoefficientField a_coef; // elastic coefficient (1D reduction of A_ij)
    CoefficientField b_coef; // fractional-viscosity coefficient (1D reduction of B_ij)
    double nu;
    double rho0;
};

struct ProblemSpec {
    double length;  // L
    double horizon; // T
    FracOrder alpha;
    MaterialModel material;
    SpaceTimeField forcing;                 // f(x,t)
    CoefficientField initial_displacement;  // g
    CoefficientField initial_velocity;      // h
};

/// Uniform cell partition of (0, length) used for quadrature and, for the
/// P1 basis, as the finite element mesh.
struct SpaceGrid {
    double length;
    std::size_t n_cells;

    SpaceGrid(double len, std::size_t cells) : length(len), n_cells(cells) {
        if (!(len > 0.0)) throw std::invalid_argument("SpaceGrid: length must be positive");
        if (cells < 2) throw std::invalid_argument("SpaceGrid: need at least two cells");
    }
    double h() const noexcept { return length / static_cast<double>(n_cells); }
};

enum class BasisKind { sine_spectral, p1_fem };

class GalerkinBasis {
public:
    GalerkinBasis(BasisKind kind, std::size_t m, SpaceGrid grid)
        : kind_(kind), m_(m), grid_(grid) {}

    BasisKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return m_; }
    const SpaceGrid& grid() const noexcept { return grid_; }

    /// w_k evaluated at x; k = 0..m-1 (sine mode k+1 / hat at node k+1).
    double value(std::size_t k, double x) const {
        const double L = grid_.length;
        if (kind_ == BasisKind::sine_spectral) {
            const double mode = static_cast<double>(k + 1);
            return std::sqrt(2.0 / L) * std::sin(mode * M_PI * x / L);
        }
        const double h = grid_.h();
        const double xk = static_cast<double>(k + 1) * h;
        const double d = std::abs(x - xk);
        return d >= h ? 0.0 : 1.0 - d / h;
    }

    double derivative(std::size_t k, double x) const {
        const double L = grid_.length;
        if (kind_ == BasisKind::sine_spectral) {
            const double mode = static_cast<double>(k + 1);
            return std::sqrt(2.0 / L) * (mode * M_PI / L) * std::cos(mode * M_PI * x / L);
        }
        const double h = grid_.h();
        const double xk = static_cast<double>(k + 1) * h;
        if (x <= xk - h || x >= xk + h) return 0.0;
        return x < xk ? 1.0 / h : -1.0 / h;
    }

private:
    BasisKind kind_;
    std::size_t m_;
    SpaceGrid grid_;
};

inline GalerkinBasis build_basis(BasisKind kind, std::size_t m, const SpaceGrid& grid) {
    if (m < 1) throw ConfigError("build_basis: need at least one basis function");
    if (kind == BasisKind::sine_spectral) {
        // >= 8 quadrature points per wavelength of the highest mode
        if (grid.n_cells < 4 * m)
            throw ConfigError("build_basis: space grid under-resolves the highest sine mode "
                              "(need n_cells >= 4*m)");
    } else {
        if (m != grid.n_cells - 1)
            throw ConfigError("build_basis: p1_fem requires m == n_cells - 1");
    }
    return GalerkinBasis(kind, m, grid);
}

struct HypothesisReport {
    struct Item {
        std::string name;
        bool pass;
        double witness_x; // location of the first violation (pass: unused)
        std::string detail;
    };
    std::vector<Item> items;

    bool all_pass() const {
        for (const auto& i : items)
            if (!i.pass) return false;
        return true;
    }
    const Item* first_failure() const {
        for (const auto& i : items)
            if (!i.pass) return &i;
        return nullptr;
    }
};

/// Checks H1 (ellipticity of a and b), H2 (density bounds) and the H3-side
/// requirements that are visible at the discrete level (Dirichlet-compatible
/// g, finite samples of f, g, h).
inline HypothesisReport verify_hypotheses(const ProblemSpec& spec,
                                          std::size_t n_samples = 2048) {
    HypothesisReport rep;
    const double L = spec.length;
    auto scan = [&](const char* name, const CoefficientField& c, double lo, double hi,
                    const char* what) {
        for (std::size_t i = 0; i <= n_samples; ++i) {
            const double x = L * static_cast<double>(i) / static_cast<double>(n_samples);
            const double v = c(x);
            if (!std::isfinite(v) || v < lo || v > hi) {
                rep.items.push_back({name, false, x,
                                     std::string(what) + " = " + std::to_string(v) +
                                         " outside [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "] at x = " + std::to_string(x)});
                return;
            }
        }
        rep.items.push_back({name, true, 0.0, "bounds hold on the sample grid"});
    };

    if (!(spec.material.nu > 0.0)) {
        rep.items.push_back({"H1:ellipticity-constant", false, 0.0, "nu must be positive"});
    } else {
        scan("H1:elastic", spec.material.a_coef, spec.material.nu, 1.0 / spec.material.nu, "a");
        scan("H1:viscous", spec.material.b_coef, spec.material.nu, 1.0 / spec.material.nu, "b");
    }
    if (!(spec.material.rho0 > 0.0)) {
        rep.items.push_back({"H2:density-constant", false, 0.0, "rho0 must be positive"});
    } else {
        scan("H2:density", spec.material.rho, spec.material.rho0, 1.0 / spec.material.rho0,
             "rho");
    }

    // Dirichlet compatibility of g
    double gmax = 0.0;
    bool data_finite = true;
    double bad_x = 0.0;
    for (std::size_t i = 0; i <= n_samples; ++i) {
        const double x = L * static_cast<double>(i) / static_cast<double>(n_samples);
        const double gv = spec.initial_displacement(x);
        const double hv = spec.initial_velocity(x);
        if (!std::isfinite(gv) || !std::isfinite(hv)) {
            data_finite = false;
            bad_x = x;
            break;
        }
        gmax = std::max(gmax, std::abs(gv));
    }
    if (data_finite) {
        for (double t : {0.0, 0.5 * spec.horizon, spec.horizon}) {
            for (std::size_t i = 0; i <= 64; ++i) {
                const double x = L * static_cast<double>(i) / 64.0;
                if (!std::isfinite(spec.forcing(x, t))) {
                    data_finite = false;
                    bad_x = x;
                    break;
                }
            }
            if (!data_finite) break;
        }
    }
    rep.items.push_back({"H3:finiteness", data_finite, bad_x,
                         data_finite ? "f, g, h finite on the sample grid"
                                     : "non-finite data sample"});
    const double gtol = 1e-9 * std::max(1.0, gmax);
    const double g0 = std::abs(spec.initial_displacement(0.0));
    const double gL = std::abs(spec.initial_displacement(L));
    const bool gok = g0 <= gtol && gL <= gtol;
    rep.items.push_back({"H3:initial-boundary", gok, g0 > gtol ? 0.0 : L,
                         gok ? "g vanishes at both endpoints"
                             : "g does not vanish at the boundary"});

    if (!(spec.alpha.value() > 0.0) || !(spec.alpha.value() < 1.0))
        rep.items.push_back({"alpha-range", false, 0.0, "alpha must lie in (0,1)"});
    return rep;
}

/// Assembled semidiscrete system M d'' + V CapD^alpha d + K d = F(t),
/// d(0) = c, d'(0) = d0, plus the coefficient-free Gram matrices used by
/// the diagnostics norms.
struct GalerkinSystem {
    Eigen::MatrixXd mass;     // (rho w_k, w_l)
    Eigen::MatrixXd elastic;  // (a w_k', w_l')
    Eigen::MatrixXd viscous;  // (b w_k', w_l')
    Eigen::MatrixXd gram_l2;  // (w_k, w_l)
    Eigen::MatrixXd gram_h1;  // (w_k', w_l')
    Eigen::MatrixXd load;     // m x (n_steps+1): (f(.,t_j), w_k)
    Eigen::VectorXd initial_displacement; // c: coefficients of the L2 projection of g
    Eigen::VectorXd initial_velocity;     // d0: coefficients of the L2 projection of h
    TimeGrid tgrid;
    FracOrder alpha;
    BasisKind basis_kind;

    std::size_t n_modes() const { return static_cast<std::size_t>(mass.rows()); }
};

inline GalerkinSystem assemble(const ProblemSpec& spec, const GalerkinBasis& basis,
                               const TimeGrid& tgrid) {
    HypothesisReport rep = verify_hypotheses(spec);
    if (const auto* fail = rep.first_failure()) {
        if (fail->name == "H3:finiteness")
            throw std::invalid_argument("assemble: " + fail->detail);
        throw HypothesisError(fail->name, fail->witness_x,
                              "assemble: hypothesis " + fail->name + " violated: " +
                                  fail->detail);
    }

    const std::size_t m = basis.size();
    const SpaceGrid& sg = basis.grid();
    const double h = sg.h();
    const double gauss_off = 0.5 * h / std::sqrt(3.0);

    // quadrature points and cached basis tables
    const std::size_t nq = 2 * sg.n_cells;
    std::vector<double> xq(nq), wq(nq, 0.5 * h);
    for (std::size_t c = 0; c < sg.n_cells; ++c) {
        const double mid = (static_cast<double>(c) + 0.5) * h;
        xq[2 * c] = mid - gauss_off;
        xq[2 * c + 1] = mid + gauss_off;
    }
    Eigen::MatrixXd W(m, nq), Wx(m, nq);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t q = 0; q < nq; ++q) {
            W(k, q) = basis.value(k, xq[q]);
            Wx(k, q) = basis.derivative(k, xq[q]);
        }

    std::vector<double> rho_q(nq), a_q(nq), b_q(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        rho_q[q] = spec.material.rho(xq[q]);
        a_q[q] = spec.material.a_coef(xq[q]);
        b_q[q] = spec.material.b_coef(xq[q]);
        if (!std::isfinite(rho_q[q]) || !std::isfinite(a_q[q]) || !std::isfinite(b_q[q]))
            throw std::invalid_argument("assemble: non-finite coefficient sample");
    }

    GalerkinSystem sys{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m),
                       Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m),
                       Eigen::MatrixXd::Zero(m, m),
                       Eigen::MatrixXd::Zero(m, tgrid.n_nodes()),
                       Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m),
                       tgrid, spec.alpha, basis.kind()};

    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = k; l < m; ++l) {
            double mm = 0.0, kk = 0.0, vv = 0.0, gg = 0.0, ss = 0.0;
            for (std::size_t q = 0; q < nq; ++q) {
                const double ww = wq[q] * W(k, q) * W(l, q);
                const double dd = wq[q] * Wx(k, q) * Wx(l, q);
                mm += rho_q[q] * ww;
                kk += a_q[q] * dd;
                vv += b_q[q] * dd;
                gg += ww;
                ss += dd;
            }
            sys.mass(k, l) = sys.mass(l, k) = mm;
            sys.elastic(k, l) = sys.elastic(l, k) = kk;
            sys.viscous(k, l) = sys.viscous(l, k) = vv;
            sys.gram_l2(k, l) = sys.gram_l2(l, k) = gg;
            sys.gram_h1(k, l) = sys.gram_h1(l, k) = ss;
        }
    }

    // load history: pointwise evaluation of f at the time nodes
    for (std::size_t j = 0; j < tgrid.n_nodes(); ++j) {
        const double t = tgrid.node(j);
        for (std::size_t q = 0; q < nq; ++q) {
            const double fv = spec.forcing(xq[q], t);
            if (!std::isfinite(fv))
                throw std::invalid_argument("assemble: non-finite forcing sample");
            const double fw = wq[q] * fv;
            for (std::size_t k = 0; k < m; ++k)
                sys.load(k, j) += fw * W(k, q);
        }
    }

    // initial data: coefficients of the L2 projection (for the orthonormal
    // sine basis this reduces to c_k = (g, w_k))
    Eigen::VectorXd bg = Eigen::VectorXd::Zero(m), bh = Eigen::VectorXd::Zero(m);
    for (std::size_t q = 0; q < nq; ++q) {
        const double gv = spec.initial_displacement(xq[q]);
        const double hv = spec.initial_velocity(xq[q]);
        for (std::size_t k = 0; k < m; ++k) {
            bg(k) += wq[q] * gv * W(k, q);
            bh(k) += wq[q] * hv * W(k, q);
        }
    }
    Eigen::LDLT<Eigen::MatrixXd> gram(sys.gram_l2);
    sys.initial_displacement = gram.solve(bg);
    sys.initial_velocity = gram.solve(bh);
    return sys;
}

} // namespace fracvisco::assembly
