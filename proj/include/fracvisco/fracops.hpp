#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "fracvisco/grid.hpp"
#include "fracvisco/special.hpp"

namespace fracvisco::fracops {

enum class Side { left, right };
enum class KernelKind { integral, derivative };

/// Lower-triangular quadrature weights for the discrete Riemann-Liouville
/// operators on a uniform grid, built from piecewise-linear product
/// integration: the kernel (t-s)^{order-1} is integrated exactly against the
/// piecewise-linear interpolant of the sample series.
///
/// The weight matrix is convolutional away from the first column, so only
/// O(n) coefficients are stored; apply() runs the O(n^2) triangular sum.
/// Right-sided kernels act by reflection about the grid midpoint.
///
/// For kind=derivative the weights realize only the regular part
/// I^{1-alpha} u'; the singular boundary term u(a)/(Gamma(1-alpha)(t-a)^alpha)
/// is analytic and added by apply() from the explicitly supplied boundary
/// value, never quadratured.
class ConvolutionKernel {
public:
    static ConvolutionKernel integral(FracOrder order, const TimeGrid& grid, Side side = Side::left) {
        if (!(order.value() >= 0.0))
            throw std::domain_error("ConvolutionKernel::integral: order must be >= 0");
        return ConvolutionKernel(order, grid, side, KernelKind::integral);
    }

    static ConvolutionKernel derivative(FracOrder order, const TimeGrid& grid, Side side = Side::left) {
        if (!(order.value() >= 0.0) || order.value() >= 1.0)
            throw std::domain_error(
                "ConvolutionKernel::derivative: order must lie in [0,1)");
        return ConvolutionKernel(order, grid, side, KernelKind::derivative);
    }

    FracOrder order() const noexcept { return order_; }
    Side side() const noexcept { return side_; }
    KernelKind kind() const noexcept { return kind_; }
    const TimeGrid& grid() const noexcept { return grid_; }

    /// Applies the kernel. boundary_value is u at the anchored endpoint
    /// (u(a) for left, u(b) for right); it only matters for derivatives.
    TimeSeries apply(const TimeSeries& u, double boundary_value = 0.0) const {
        if (!(u.grid == grid_))
            throw std::invalid_argument("ConvolutionKernel::apply: grid mismatch");
        require_finite(u, "ConvolutionKernel::apply");
        if (order_.value() == 0.0) return u; // I^0 = D^0 = identity
        if (side_ == Side::right) {
            TimeSeries r = apply_left(reversed(u), boundary_value);
            return reversed(r);
        }
        return apply_left(u, boundary_value);
    }

    /// w_{row,col} of the dense lower-triangular (left) / upper-triangular
    /// (right) weight matrix. Derivative kernels report the quadrature part.
    double weight(std::size_t row, std::size_t col) const {
        const std::size_t n = grid_.n_steps();
        if (row > n || col > n) throw std::out_of_range("ConvolutionKernel::weight");
        if (side_ == Side::right) return left_weight(n - row, n - col);
        return left_weight(row, col);
    }

    /// Dense dump, rows = j, columns = k, missing entries written as 0.
    void write_weights_csv(std::ostream& os) const {
        const std::size_t n = grid_.n_steps();
        char buf[32];
        for (std::size_t j = 0; j <= n; ++j) {
            for (std::size_t k = 0; k <= n; ++k) {
                std::snprintf(buf, sizeof buf, "%.16e", weight(j, k));
                os << buf << (k == n ? '\n' : ',');
            }
        }
    }

private:
    ConvolutionKernel(FracOrder order, const TimeGrid& grid, Side side, KernelKind kind)
        : order_(order), grid_(grid), side_(side), kind_(kind) {
        const double p = order.value();
        if (p == 0.0) return;
        const std::size_t n = grid.n_steps();
        const double dt = grid.dt();
        if (kind_ == KernelKind::integral) {
            scale_ = std::pow(dt, p) / special::gamma_fn(p + 2.0);
            conv_.resize(n + 1, 0.0);
            first_.resize(n + 1, 0.0);
            std::vector<double> pw(n + 2);
            for (std::size_t m = 0; m < pw.size(); ++m)
                pw[m] = std::pow(static_cast<double>(m), p + 1.0);
            for (std::size_t m = 1; m <= n; ++m)
                conv_[m] = pw[m + 1] - 2.0 * pw[m] + pw[m - 1];
            for (std::size_t j = 1; j <= n; ++j) {
                const double jj = static_cast<double>(j);
                first_[j] = std::pow(jj - 1.0, p + 1.0) - std::pow(jj, p) * (jj - p - 1.0);
            }
        } else {
            scale_ = std::pow(dt, -p) / special::gamma_fn(2.0 - p);
            inv_gamma1m_ = special::gamma_fn(1.0 - p);
            conv_.resize(n + 1, 0.0);
            for (std::size_t m = 1; m <= n; ++m)
                conv_[m] = std::pow(static_cast<double>(m), 1.0 - p) -
                           std::pow(static_cast<double>(m) - 1.0, 1.0 - p);
        }
    }

    TimeSeries apply_left(const TimeSeries& u, double boundary_value) const {
        const std::size_t n = grid_.n_steps();
        TimeSeries out = TimeSeries::zeros(grid_);
        const double* uv = u.values.data();
        if (kind_ == KernelKind::integral) {
            for (std::size_t j = 1; j <= n; ++j) {
                double acc = uv[j] + first_[j] * uv[0];
                const double* w = conv_.data() + 1;
                const double* x = uv + j - 1;
                for (std::size_t k = 1; k < j; ++k) acc += (*w++) * (*x--);
                out.values[j] = scale_ * acc;
            }
        } else {
            const double alpha = order_.value();
            std::vector<double> du(n);
            for (std::size_t k = 0; k < n; ++k) du[k] = uv[k + 1] - uv[k];
            for (std::size_t j = 1; j <= n; ++j) {
                double acc = 0.0;
                const double* w = conv_.data() + 1;
                const double* d = du.data() + j - 1;
                for (std::size_t k = 0; k < j; ++k) acc += (*w++) * (*d--);
                double v = scale_ * acc;
                if (boundary_value != 0.0) {
                    const double tja = grid_.node(j) - grid_.t_start();
                    v += boundary_value / (inv_gamma1m_ * std::pow(tja, alpha));
                }
                out.values[j] = v;
            }
            // Value at the anchored endpoint: zero when u vanishes there,
            // otherwise the singular term has no finite limit.
            out.values[0] = (boundary_value == 0.0)
                                ? 0.0
                                : std::copysign(std::numeric_limits<double>::infinity(),
                                                boundary_value);
        }
        return out;
    }

    double left_weight(std::size_t j, std::size_t k) const {
        if (order_.value() == 0.0) return j == k ? 1.0 : 0.0;
        if (j == 0 || k > j) return 0.0;
        if (kind_ == KernelKind::integral) {
            if (k == j) return scale_;
            if (k == 0) return scale_ * first_[j];
            return scale_ * conv_[j - k];
        }
        if (k == j) return scale_ * conv_[1];
        if (k == 0) return -scale_ * conv_[j];
        return scale_ * (conv_[j - k + 1] - conv_[j - k]);
    }

    FracOrder order_;
    TimeGrid grid_;
    Side side_;
    KernelKind kind_;
    double scale_ = 0.0;
    double inv_gamma1m_ = 0.0;
    std::vector<double> conv_;  // convolution coefficients, index = node lag
    std::vector<double> first_; // integral kind: weight of the first node
};

/// (aI_t^beta u) at the grid nodes; exact whenever u is piecewise linear.
inline TimeSeries rl_integral_left(const TimeSeries& u, FracOrder beta) {
    if (!(beta.value() >= 0.0))
        throw std::domain_error("rl_integral_left: order must be >= 0");
    return ConvolutionKernel::integral(beta, u.grid, Side::left).apply(u);
}

/// (tI_b^beta u); realized as the reflection of the left-sided integral.
inline TimeSeries rl_integral_right(const TimeSeries& u, FracOrder beta) {
    if (!(beta.value() >= 0.0))
        throw std::domain_error("rl_integral_right: order must be >= 0");
    return ConvolutionKernel::integral(beta, u.grid, Side::right).apply(u);
}

/// (aD_t^alpha u) with the singular endpoint term taken analytically from
/// the supplied u(a); see ConvolutionKernel. alpha in [0,1).
inline TimeSeries rl_derivative_left(const TimeSeries& u, FracOrder alpha, double u_at_a) {
    return ConvolutionKernel::derivative(alpha, u.grid, Side::left).apply(u, u_at_a);
}

inline TimeSeries rl_derivative_right(const TimeSeries& u, FracOrder alpha, double u_at_b) {
    return ConvolutionKernel::derivative(alpha, u.grid, Side::right).apply(u, u_at_b);
}

/// Caputo derivative via aD_t^alpha [u - u(a)]: the constant shift drops out
/// of the node differences, so this is the quadrature part alone. Exactly
/// zero on constants. At order zero this is the identity on u.
inline TimeSeries caputo_derivative_left(const TimeSeries& u, FracOrder alpha, double /*u_at_a*/) {
    return ConvolutionKernel::derivative(alpha, u.grid, Side::left).apply(u, 0.0);
}

/// Max-norm residual of the semigroup identity I^beta I^gamma u = I^{beta+gamma} u
/// over the full grid.
inline double semigroup_check(const TimeSeries& u, FracOrder beta, FracOrder gamma) {
    TimeSeries composed = rl_integral_left(rl_integral_left(u, gamma), beta);
    TimeSeries direct = rl_integral_left(u, FracOrder(beta.value() + gamma.value()));
    return max_abs_diff(composed, direct);
}

} // namespace fracvisco::fracops
