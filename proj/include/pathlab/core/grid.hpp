#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "pathlab/core/error.hpp"

namespace pathlab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Mass and reduced Planck constant. Natural units by default.
struct PhysicalParams {
    double mass = 1.0;
    double hbar = 1.0;

    void validate() const {
        require(mass > 0.0 && std::isfinite(mass), "mass must be positive");
        require(hbar > 0.0 && std::isfinite(hbar), "hbar must be positive");
    }
};

/// Uniform lattice including both end points: x_i = x_min + i*dx.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n_points)
        : x_min_(x_min), x_max_(x_max), n_(n_points) {
        require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
                "grid requires x_max > x_min");
        require(n_points >= 8, "grid requires at least 8 points");
        dx_ = (x_max - x_min) / static_cast<double>(n_points - 1);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
    double extent() const { return x_max_ - x_min_; }

    /// Index of the node closest to `pos` (clamped to the grid).
    std::size_t nearest(double pos) const {
        const double r = std::round((pos - x_min_) / dx_);
        if (r <= 0.0) return 0;
        if (r >= static_cast<double>(n_ - 1)) return n_ - 1;
        return static_cast<std::size_t>(r);
    }

    /// True when `pos` sits on a node to within `tol * dx`.
    bool on_node(double pos, double tol = 1e-9) const {
        const double r = (pos - x_min_) / dx_;
        return r >= -tol && r <= static_cast<double>(n_ - 1) + tol &&
               std::abs(r - std::round(r)) <= tol;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
        return out;
    }

    bool same_as(const Grid1D& o) const {
        return n_ == o.n_ && std::abs(x_min_ - o.x_min_) <= 1e-12 * (1.0 + std::abs(x_min_)) &&
               std::abs(x_max_ - o.x_max_) <= 1e-12 * (1.0 + std::abs(x_max_));
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

/// Complex samples on a grid.
struct ComplexField {
    Grid1D grid;
    std::vector<cplx> values;

    explicit ComplexField(const Grid1D& g) : grid(g), values(g.size(), cplx{}) {}
    ComplexField(const Grid1D& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        require(values.size() == grid.size(), "field length does not match grid");
    }

    template <class F>
    static ComplexField sample(const Grid1D& g, F&& f) {
        ComplexField out(g);
        for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = cplx(f(g.x(i)));
        return out;
    }

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }

    bool finite() const {
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }
};

/// Unit-mass lattice delta: 1/dx at the node nearest `pos`.
inline ComplexField discrete_delta(const Grid1D& g, double pos) {
    ComplexField f(g);
    f.values[g.nearest(pos)] = 1.0 / g.dx();
    return f;
}

namespace detail {

// Composite Simpson weights; an odd interval count closes with the 3/8 rule
// over the final three intervals.
inline std::vector<double> quadrature_weights(std::size_t n, double h) {
    require(n >= 2, "quadrature needs at least two samples");
    std::vector<double> w(n, 0.0);
    const std::size_t intervals = n - 1;
    if (intervals == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    std::size_t simpson_end = intervals;
    if (intervals % 2 == 1) {
        if (intervals < 3) {
            for (std::size_t i = 0; i + 1 < n; ++i) {
                w[i] += 0.5 * h;
                w[i + 1] += 0.5 * h;
            }
            return w;
        }
        simpson_end = intervals - 3;
    }
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (simpson_end != intervals) {
        const std::size_t s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

} // namespace detail

/// Composite Simpson estimate of the integral of f over the grid extent.
inline cplx integrate(const ComplexField& f) {
    require(f.finite(), "non-finite field");
    const auto w = detail::quadrature_weights(f.size(), f.grid.dx());
    cplx acc{};
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f.values[i];
    return acc;
}

/// Same rule for real samples with spacing h.
inline double integrate_samples(std::span<const double> y, double h) {
    const auto w = detail::quadrature_weights(y.size(), h);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += w[i] * y[i];
    return acc;
}

/// Lattice norm sum |f_i|^2 dx; exactly conserved by unitary lattice maps.
inline double discrete_norm(const ComplexField& f) {
    double acc = 0.0;
    for (const auto& v : f.values) acc += std::norm(v);
    return acc * f.grid.dx();
}

inline double l2_norm(std::span<const cplx> v) {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

/// ||a - b|| / ||b|| over the index range [lo, hi).
inline double relative_l2_error(std::span<const cplx> a, std::span<const cplx> b, std::size_t lo,
                                std::size_t hi) {
    require(a.size() == b.size() && lo < hi && hi <= a.size(), "bad comparison range");
    double num = 0.0, den = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    require(den > 0.0, "reference vanishes on comparison range");
    return std::sqrt(num / den);
}

} // namespace pathlab
