#pragma once

#include <cmath>
#include <vector>

#include "pathlab/core/fft.hpp"
#include "pathlab/core/grid.hpp"

namespace pathlab {

/// (a*b)(x) ~= integral a(y) b(x - y) dy on a shared grid.
///
/// b(x - y) is read at the lattice displacement x_i - y_j = (i - j) dx, so the
/// grid must place a node at the origin lattice: x_min / dx integral. Symmetric
/// grids with an odd point count satisfy this.
inline ComplexField convolve(const ComplexField& a, const ComplexField& b) {
    require(a.grid.same_as(b.grid), "convolve: mismatched grids");
    require(a.finite() && b.finite(), "non-finite field");
    const Grid1D& g = a.grid;
    const double shift = -g.x_min() / g.dx();
    require(std::abs(shift - std::round(shift)) < 1e-6,
            "convolve: grid is not origin-aligned (x_min/dx must be an integer)");
    const long s = std::lround(shift);
    const auto full = linear_convolution(a.values, b.values);
    ComplexField out(g);
    const long last = static_cast<long>(full.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const long m = static_cast<long>(i) + s;
        if (m >= 0 && m < last) out.values[i] = g.dx() * full[static_cast<std::size_t>(m)];
    }
    return out;
}

/// Translation-invariant kernel sampled at lattice displacements k*dx,
/// k = -(n-1) .. (n-1); stored with offset n-1.
struct DisplacementKernel {
    std::vector<cplx> samples;

    std::size_t half_width() const { return (samples.size() - 1) / 2; }

    template <class F>
    static DisplacementKernel sample(const Grid1D& g, F&& f) {
        const std::size_t n = g.size();
        DisplacementKernel k;
        k.samples.resize(2 * n - 1);
        for (std::size_t i = 0; i < k.samples.size(); ++i) {
            const double u = (static_cast<double>(i) - static_cast<double>(n - 1)) * g.dx();
            k.samples[i] = cplx(f(u));
        }
        return k;
    }
};

/// out(x_i) = dx * sum_j kernel(x_i - x_j) f(x_j): the lattice quadrature of
/// integral K(x - y) f(y) dy over the grid, evaluated by zero-padded FFT.
inline ComplexField apply_kernel(const DisplacementKernel& kernel, const ComplexField& f) {
    const std::size_t n = f.size();
    require(kernel.samples.size() == 2 * n - 1, "kernel does not match grid");
    const auto full = linear_convolution(f.values, kernel.samples);
    ComplexField out(f.grid);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = f.grid.dx() * full[i + n - 1];
    return out;
}

} // namespace pathlab
