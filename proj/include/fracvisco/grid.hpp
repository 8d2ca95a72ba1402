#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fracvisco {

/// Uniform discretization of a bounded time interval (t_start, t_end)
/// with nodes t_j = t_start + j*dt, j = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_steps)
        : t_start_(t_start), t_end_(t_end), n_steps_(n_steps) {
        if (!(t_end > t_start))
            throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
        if (n_steps < 1)
            throw std::invalid_argument("TimeGrid: need at least one step");
        if (!std::isfinite(t_start) || !std::isfinite(t_end))
            throw std::invalid_argument("TimeGrid: endpoints must be finite");
    }

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
    double dt() const noexcept { return (t_end_ - t_start_) / static_cast<double>(n_steps_); }
    double node(std::size_t j) const noexcept { return t_start_ + static_cast<double>(j) * dt(); }

    bool operator==(const TimeGrid& o) const noexcept {
        return t_start_ == o.t_start_ && t_end_ == o.t_end_ && n_steps_ == o.n_steps_;
    }

private:
    double t_start_;
    double t_end_;
    std::size_t n_steps_;
};

/// Order of a fractional integral or derivative. Range constraints
/// (>= 0 for integrals, [0,1) for derivatives) are enforced by the
/// operators themselves so that error messages name the operation.
class FracOrder {
public:
    explicit FracOrder(double value) : value_(value) {
        if (!std::isfinite(value))
            throw std::invalid_argument("FracOrder: order must be finite");
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// One scalar sample per grid node. Vector-valued series are handled as
/// matrices of per-coefficient rows sharing a grid (see volterra.hpp).
struct TimeSeries {
    TimeGrid grid;
    std::vector<double> values;

    TimeSeries(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.n_nodes())
            throw std::invalid_argument("TimeSeries: values length must be n_steps+1");
    }

    static TimeSeries zeros(const TimeGrid& g) {
        return TimeSeries(g, std::vector<double>(g.n_nodes(), 0.0));
    }

    static TimeSeries sampled(const TimeGrid& g, const std::function<double(double)>& f) {
        std::vector<double> v(g.n_nodes());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(g.node(j));
        return TimeSeries(g, std::move(v));
    }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t j) const noexcept { return values[j]; }
    double& operator[](std::size_t j) noexcept { return values[j]; }
};

inline void require_finite(const TimeSeries& u, const char* who) {
    for (double v : u.values)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(who) + ": input series has non-finite values");
}

inline double max_abs(const TimeSeries& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

/// max |u_j - v_j| over nodes with t_j - t_start >= skip (same grid assumed).
inline double max_abs_diff(const TimeSeries& u, const TimeSeries& v, double skip = 0.0) {
    double m = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u.grid.node(j) - u.grid.t_start() < skip) continue;
        m = std::max(m, std::abs(u.values[j] - v.values[j]));
    }
    return m;
}

/// Trapezoid rule over the full grid.
inline double trapezoid(const TimeSeries& u) {
    const double dt = u.grid.dt();
    double s = 0.0;
    for (std::size_t j = 1; j < u.size(); ++j) s += 0.5 * (u.values[j - 1] + u.values[j]);
    return s * dt;
}

/// Discrete L2(a,b) norm via the trapezoid rule on |u|^2.
inline double l2_norm(const TimeSeries& u) {
    const double dt = u.grid.dt();
    double s = 0.0;
    for (std::size_t j = 1; j < u.size(); ++j)
        s += 0.5 * (u.values[j - 1] * u.values[j - 1] + u.values[j] * u.values[j]);
    return std::sqrt(s * dt);
}

/// Reverses the sample order; the grid is unchanged (reflection about the
/// midpoint maps node j to node n-j).
inline TimeSeries reversed(const TimeSeries& u) {
    std::vector<double> v(u.values.rbegin(), u.values.rend());
    return TimeSeries(u.grid, std::move(v));
}

} // namespace fracvisco
