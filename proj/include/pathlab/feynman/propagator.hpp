#pragma once

// Time-sliced Feynman propagator on a uniform lattice.
//
// Each slice integral  integral K_eps(x - y) f(y) dy  with the literal
// short-time kernel is evaluated exactly for the band-limited (sinc)
// interpolant of f between nodes. The resulting lattice weights are the
// kernel seen through the grid's passband; sampling K_eps directly would
// alias its chirp once hbar eps / (m dx^2) is of order one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pathlab/core/convolve.hpp"
#include "pathlab/core/fft.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/core/window.hpp"
#include "pathlab/potentials.hpp"

namespace pathlab {

struct TimeSlicing {
    double total_time = 1.0;
    std::size_t n_slices = 1;

    double eps() const { return total_time / static_cast<double>(n_slices); }
    void validate() const {
        require(n_slices >= 1, "time slicing needs at least one slice");
        require(total_time > 0.0 && std::isfinite(total_time), "total time must be positive");
    }
};

/// How the potential enters one slice.
enum class PotentialRule {
    endpoint_average, ///< (V(x_{j-1}) + V(x_j)) / 2
    midpoint,         ///< V((x_{j-1} + x_j) / 2)
};

struct SliceOptions {
    PotentialRule rule = PotentialRule::endpoint_average;
    /// Omit V at the source and detector points, so V enters n-1 times.
    bool drop_endpoint_potential = false;
    /// Interpolant spectrum, as fractions of the Nyquist wavenumber pi/dx:
    /// unit weight below `passband`, smoothly switched off at `cutoff`.
    double passband = 0.7;
    double cutoff = 0.95;
};

/// sqrt(m / (2 pi i hbar eps)) with sqrt(1/i) = exp(-i pi/4).
inline cplx short_time_prefactor(double eps, const PhysicalParams& params) {
    return std::polar(std::sqrt(params.mass / (2.0 * pi * params.hbar * eps)), -pi / 4.0);
}

/// One-slice amplitude with the endpoint-average potential:
/// sqrt(m/(2 pi i hbar eps)) exp{(i eps/hbar)[m u^2/(2 eps^2) - (V(x_prev)+V(x_next))/2]}.
inline cplx short_time_kernel(double x_prev, double x_next, double eps, const PotentialSpec& spec,
                              const PhysicalParams& params = {}) {
    require(eps > 0.0, "slice duration must be positive");
    params.validate();
    const double u = x_next - x_prev;
    const double lagrangian = 0.5 * params.mass * (u / eps) * (u / eps) -
                              0.5 * (potential_value(spec, x_prev, params) + potential_value(spec, x_next, params));
    return short_time_prefactor(eps, params) * std::polar(1.0, eps * lagrangian / params.hbar);
}

/// Wavenumber below which slices act with unit weight.
inline double slice_passband(const Grid1D& g, const SliceOptions& opt) { return opt.passband * pi / g.dx(); }

/// Free slice weights: sample m (offset n-1) is
///   (1/2pi) integral W(k) exp(-i hbar eps k^2 / 2m + i k m dx) dk,
/// the free kernel K_eps convolved with the interpolation basis. apply_kernel
/// multiplies by dx, which turns these samples into quadrature weights.
inline DisplacementKernel slice_kernel(const Grid1D& g, double eps, const PhysicalParams& params = {},
                                       const SliceOptions& opt = {}) {
    require(eps > 0.0, "slice duration must be positive");
    require(opt.passband > 0.0 && opt.passband < opt.cutoff && opt.cutoff <= 1.0,
            "slice spectrum needs 0 < passband < cutoff <= 1");
    const std::size_t n = g.size();
    // Periodic images of the weights sit 8 grid lengths apart.
    std::size_t len = 1;
    while (len < 8 * n) len <<= 1;
    const double dk = 2.0 * pi / (static_cast<double>(len) * g.dx());
    const double nyq = pi / g.dx();
    std::vector<cplx> spec(len);
    for (std::size_t q = 0; q < len; ++q) {
        const double k = (q <= len / 2 ? static_cast<double>(q) : static_cast<double>(q) - static_cast<double>(len)) * dk;
        const double w = flat_top_window(k, opt.passband * nyq, opt.cutoff * nyq);
        if (w > 0.0) spec[q] = w * std::polar(1.0, -params.hbar * eps * k * k / (2.0 * params.mass));
    }
    FftPlan plan(len);
    plan.backward(spec);
    DisplacementKernel kern;
    kern.samples.resize(2 * n - 1);
    const double scale = 1.0 / (static_cast<double>(len) * g.dx());
    for (std::size_t i = 0; i < kern.samples.size(); ++i) {
        const long m = static_cast<long>(i) - static_cast<long>(n - 1);
        kern.samples[i] = scale * spec[static_cast<std::size_t>((m + static_cast<long>(len)) % static_cast<long>(len))];
    }
    return kern;
}

namespace detail {

inline std::vector<cplx> half_potential_phase(const Grid1D& g, const PotentialSpec& spec, double eps,
                                              const PhysicalParams& params) {
    std::vector<cplx> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = std::polar(1.0, -0.5 * eps * potential_value(spec, g.x(i), params) / params.hbar);
    return out;
}

// Midpoint rule: the potential couples both ends, so the slice is a banded
// direct sum. Weights below 1e-13 of the peak are dropped.
inline ComplexField midpoint_slice(const ComplexField& f, const DisplacementKernel& kern,
                                   const std::vector<cplx>& mid_phase) {
    const Grid1D& g = f.grid;
    const long n = static_cast<long>(g.size());
    double peak = 0.0;
    for (const auto& w : kern.samples) peak = std::max(peak, std::abs(w));
    long band = 0;
    for (long m = 0; m < n; ++m)
        if (std::abs(kern.samples[static_cast<std::size_t>(m + n - 1)]) > 1e-13 * peak) band = m;
    ComplexField out(g);
    for (long i = 0; i < n; ++i) {
        cplx acc{};
        for (long j = std::max(0L, i - band); j <= std::min(n - 1, i + band); ++j)
            acc += kern.samples[static_cast<std::size_t>(i - j + n - 1)] * mid_phase[static_cast<std::size_t>(i + j)] *
                   f.values[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(i)] = g.dx() * acc;
    }
    return out;
}

} // namespace detail

/// Applies the n time slices to a field: psi_t(x) = integral dx0 psi_0(x0) A(x0,0|x,t)
/// with A the time-sliced product. Linear; no normalization checks.
inline ComplexField apply_slices(const ComplexField& psi0, const PotentialSpec& spec, const TimeSlicing& slicing,
                                 const PhysicalParams& params = {}, const SliceOptions& opt = {}) {
    slicing.validate();
    params.validate();
    validate(spec);
    require(psi0.finite(), "non-finite field");
    const double eps = slicing.eps();
    const Grid1D& g = psi0.grid;
    const auto kernel = slice_kernel(g, eps, params, opt);
    ComplexField f = psi0;
    if (opt.rule == PotentialRule::midpoint) {
        // Pair midpoints (x_i + x_j)/2 fall on the half-step lattice, indexed by i + j.
        std::vector<cplx> mid(2 * g.size() - 1);
        for (std::size_t s = 0; s < mid.size(); ++s)
            mid[s] = std::polar(1.0, -eps * potential_value(spec, g.x_min() + 0.5 * s * g.dx(), params) / params.hbar);
        for (std::size_t s = 0; s < slicing.n_slices; ++s) f = detail::midpoint_slice(f, kernel, mid);
        return f;
    }
    const auto phase = detail::half_potential_phase(g, spec, eps, params);
    for (std::size_t s = 0; s < slicing.n_slices; ++s) {
        if (s > 0 || !opt.drop_endpoint_potential)
            for (std::size_t i = 0; i < g.size(); ++i) f.values[i] *= phase[i];
        f = apply_kernel(kernel, f);
        if (s + 1 < slicing.n_slices || !opt.drop_endpoint_potential)
            for (std::size_t i = 0; i < g.size(); ++i) f.values[i] *= phase[i];
    }
    return f;
}

/// How the point source at x0 is represented on the lattice.
enum class SourceModel {
    /// Unit-mass lattice delta at x0 (x0 must be a node). Carries the whole
    /// slice passband, so its kernel reaches the grid edge unless t is short.
    lattice_delta,
    /// sin(k_c r)/(pi r) exp(-sigma^2 r^2/2): spectrum flat to ~k_c - 3 sigma,
    /// Gaussian roll-off around k_c. Keeps the kernel's support inside the grid.
    band_limited,
};

struct SourceOptions {
    SourceModel model = SourceModel::band_limited;
    /// Spectral edge k_c; chosen from the grid and time when unset.
    std::optional<double> edge_wavenumber;
    /// Roll-off width sigma as a fraction of k_c.
    double rolloff_fraction = 0.1;
};

/// A(x0, 0 | x, t) sampled over destination x.
struct Kernel {
    double source = 0.0;
    ComplexField field;
    TimeSlicing slicing;
    PhysicalParams params;
    SourceModel source_model = SourceModel::lattice_delta;
    /// The source spectrum is flat (to 1e-3 relative) below this wavenumber.
    double flat_wavenumber = 0.0;
    /// Resolved band-limited source settings (unused for lattice_delta).
    SourceOptions source_options{};
};

/// sin(k_c r)/(pi r) exp(-sigma^2 r^2 / 2), r = x - x0.
inline ComplexField band_limited_source(const Grid1D& g, double x0, double edge, double sigma) {
    require(edge > 0.0 && sigma > 0.0, "band-limited source needs positive edge and roll-off");
    return ComplexField::sample(g, [&](double x) {
        const double r = x - x0;
        const double core = std::abs(edge * r) < 1e-8 ? edge / pi : std::sin(edge * r) / (pi * r);
        return core * std::exp(-0.5 * sigma * sigma * r * r);
    });
}

/// Source edge used when none is given: paths launched at k_c + 4 sigma stay
/// within 90% of the distance to the nearer grid edge, and the source stays
/// inside the slices' passband.
inline double default_source_edge(const Grid1D& g, double x0, double total_time, const PhysicalParams& params,
                                  const SliceOptions& opt, double rolloff_fraction) {
    const double reach = std::min(x0 - g.x_min(), g.x_max() - x0);
    require(reach > 0.0, "source lies outside the grid");
    const double k_reach = 0.9 * params.mass * reach / (params.hbar * total_time);
    return std::min(k_reach, slice_passband(g, opt)) / (1.0 + 4.0 * rolloff_fraction);
}

/// Time-sliced propagator from x0 over the grid.
inline Kernel compose_propagator(const PotentialSpec& spec, double x0, const TimeSlicing& slicing, const Grid1D& grid,
                                 const PhysicalParams& params = {}, const SliceOptions& opt = {},
                                 const SourceOptions& src = {}) {
    slicing.validate();
    params.validate();
    validate(spec);
    Kernel k{x0, ComplexField(grid), slicing, params, src.model, 0.0, src};
    if (src.model == SourceModel::lattice_delta) {
        require(grid.on_node(x0), "lattice delta source must sit on a node");
        k.flat_wavenumber = slice_passband(grid, opt);
        k.field = apply_slices(discrete_delta(grid, x0), spec, slicing, params, opt);
    } else {
        const double edge = src.edge_wavenumber.value_or(
            default_source_edge(grid, x0, slicing.total_time, params, opt, src.rolloff_fraction));
        const double sigma = src.rolloff_fraction * edge;
        // erfc(3/sqrt2)/2 ~ 1.3e-3 below k_c - 3 sigma.
        k.flat_wavenumber = edge - 3.0 * sigma;
        k.source_options.edge_wavenumber = edge;
        k.field = apply_slices(band_limited_source(grid, x0, edge, sigma), spec, slicing, params, opt);
    }
    require(k.field.finite(), "non-finite propagator");
    double peak = 0.0, rim_peak = 0.0;
    const std::size_t rim = std::max<std::size_t>(4, grid.size() / 100);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = std::abs(k.field.values[i]);
        peak = std::max(peak, m);
        if (i < rim || i + rim >= grid.size()) rim_peak = std::max(rim_peak, m);
    }
    require(rim_peak <= 1e-3 * peak, "grid too small");
    return k;
}

/// Closed-form propagators for the quadratic potentials.
inline cplx analytic_kernel(const PotentialSpec& spec, double x0, double x, double t, const PhysicalParams& params = {}) {
    params.validate();
    require(t > 0.0, "propagation time must be positive");
    const double m = params.mass, hb = params.hbar;
    auto free_kernel = [&]() {
        return std::polar(std::sqrt(m / (2.0 * pi * hb * t)), -pi / 4.0) *
               std::polar(1.0, m * (x - x0) * (x - x0) / (2.0 * hb * t));
    };
    if (std::holds_alternative<potential::Free>(spec)) return free_kernel();
    if (const auto* lin = std::get_if<potential::Linear>(&spec)) {
        const double f = lin->force;
        const double extra = f * t * (x + x0) / 2.0 - f * f * t * t * t / (24.0 * m);
        return free_kernel() * std::polar(1.0, extra / hb);
    }
    if (const auto* h = std::get_if<potential::Harmonic>(&spec)) {
        const double w = h->omega;
        if (w == 0.0) return free_kernel();
        const double s = std::sin(w * t);
        require(std::abs(s) > 1e-12, "kernel singular at caustic");
        // Each caustic passed adds a quarter-turn (Maslov) phase.
        const double maslov = std::floor(w * t / pi);
        const double modulus = std::sqrt(m * w / (2.0 * pi * hb * std::abs(s)));
        const double phase = m * w * ((x * x + x0 * x0) * std::cos(w * t) - 2.0 * x * x0) / (2.0 * hb * s);
        return std::polar(modulus, -pi / 4.0 - pi / 2.0 * maslov + phase);
    }
    throw Error("no closed-form kernel for " + potential_name(spec));
}

/// Initial speed of the classical path x0 -> x in time t (quadratic potentials).
inline double classical_launch_speed(const PotentialSpec& spec, double x0, double x, double t,
                                     const PhysicalParams& params = {}) {
    if (std::holds_alternative<potential::Free>(spec)) return (x - x0) / t;
    if (const auto* lin = std::get_if<potential::Linear>(&spec))
        return (x - x0) / t - 0.5 * lin->force / params.mass * t;
    if (const auto* h = std::get_if<potential::Harmonic>(&spec)) {
        const double w = h->omega;
        if (w == 0.0) return (x - x0) / t;
        return w * (x - x0 * std::cos(w * t)) / std::sin(w * t);
    }
    throw Error("classical launch speed needs a quadratic potential");
}

/// Node range [lo, hi) where the kernel represents the true propagator: the
/// classical launch wavenumber lies inside the source's flat band with a margin
/// of `margin` stationary-phase widths sqrt(m/(hbar t)).
inline std::pair<std::size_t, std::size_t> resolved_range(const Kernel& k, const PotentialSpec& spec,
                                                          double margin = 2.0) {
    const Grid1D& g = k.field.grid;
    const double t = k.slicing.total_time;
    const double kmax = k.flat_wavenumber - margin * std::sqrt(k.params.mass / (k.params.hbar * t));
    require(kmax > 0.0, "kernel has no resolved region");
    const bool quadratic = is_at_most_quadratic(spec);
    std::size_t lo = g.size(), hi = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = quadratic ? classical_launch_speed(spec, k.source, g.x(i), t, k.params)
                                   : (g.x(i) - k.source) / t;
        if (std::abs(k.params.mass * v / k.params.hbar) <= kmax) {
            lo = std::min(lo, i);
            hi = std::max(hi, i + 1);
        }
    }
    require(lo < hi, "kernel has no resolved region");
    return {lo, hi};
}

/// analytic_kernel sampled on the kernel's grid.
inline ComplexField analytic_kernel_field(const PotentialSpec& spec, double x0, double t, const Grid1D& g,
                                          const PhysicalParams& params = {}) {
    return ComplexField::sample(g, [&](double x) { return analytic_kernel(spec, x0, x, t, params); });
}

/// Relative L2 distance between a composed kernel and the closed form over
/// the kernel's resolved range.
inline double kernel_error_vs_analytic(const Kernel& k, const PotentialSpec& spec, double margin = 2.0) {
    const auto ref = analytic_kernel_field(spec, k.source, k.slicing.total_time, k.field.grid, k.params);
    const auto [lo, hi] = resolved_range(k, spec, margin);
    return relative_l2_error(k.field.values, ref.values, lo, hi);
}

/// Propagates a normalized wavefunction through the time-sliced propagator.
inline ComplexField evolve_wavefunction(const ComplexField& psi0, const PotentialSpec& spec,
                                        const TimeSlicing& slicing, const PhysicalParams& params = {},
                                        const SliceOptions& opt = {}) {
    require(std::abs(discrete_norm(psi0) - 1.0) <= 1e-8, "initial wavefunction is not normalized");
    auto out = apply_slices(psi0, spec, slicing, params, opt);
    const double n1 = discrete_norm(out);
    require(std::abs(n1 - 1.0) <= 1e-2, "unitarity lost (grid/slicing too coarse)");
    return out;
}

/// || i hbar dA/dt - (-hbar^2/2m A'' + V A) || / ||A|| over nodes [lo, hi),
/// central differences in t (samples at t - dt, t, t + dt) and x.
inline double schrodinger_residual(const ComplexField& before, const ComplexField& now, const ComplexField& after,
                                   double dt, const PotentialSpec& spec, const PhysicalParams& params,
                                   std::size_t lo, std::size_t hi) {
    const Grid1D& g = now.grid;
    require(lo >= 1 && hi + 1 <= g.size() && lo < hi, "residual range must exclude the grid ends");
    const double dx2 = g.dx() * g.dx();
    const cplx ih(0.0, params.hbar);
    double num = 0.0, den = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const cplx dt_a = (after.values[i] - before.values[i]) / (2.0 * dt);
        const cplx lap = (now.values[i + 1] - 2.0 * now.values[i] + now.values[i - 1]) / dx2;
        const cplx h_a = -params.hbar * params.hbar / (2.0 * params.mass) * lap +
                         potential_value(spec, g.x(i), params) * now.values[i];
        num += std::norm(ih * dt_a - h_a);
        den += std::norm(now.values[i]);
    }
    return std::sqrt(num / den);
}


/// Nodes where the classical launch wavenumber k satisfies |k| dx <= kdx_max,
/// so second differences in x are accurate to ~(k dx)^2/12.
inline std::pair<std::size_t, std::size_t> difference_range(const Kernel& k, const PotentialSpec& spec,
                                                            double kdx_max) {
    auto [lo, hi] = resolved_range(k, spec);
    const Grid1D& g = k.field.grid;
    const double t = k.slicing.total_time;
    std::size_t a = hi, b = lo;
    for (std::size_t i = std::max<std::size_t>(lo, 1); i < std::min(hi, g.size() - 1); ++i) {
        const double v = is_at_most_quadratic(spec) ? classical_launch_speed(spec, k.source, g.x(i), t, k.params)
                                                    : (g.x(i) - k.source) / t;
        if (std::abs(k.params.mass * v / k.params.hbar) * g.dx() <= kdx_max) {
            a = std::min(a, i);
            b = std::max(b, i + 1);
        }
    }
    require(a < b, "no nodes resolve the kernel's second derivative");
    return {a, b};
}

/// Schrodinger residual of a composed kernel: recomposes it at t -/+ dt with
/// the same slice count and applies schrodinger_residual where |k| dx <= 0.08
/// (second differences then cost at most ~k^4 dx^2 / 24 ~ 1e-3 of the energy).
inline double check_schrodinger_residual(const Kernel& k, const PotentialSpec& spec, const SliceOptions& opt = {},
                                         double dt_fraction = 1e-3) {
    const double t = k.slicing.total_time;
    const double dt = dt_fraction * t;
    const Grid1D& g = k.field.grid;
    require(k.source_model == SourceModel::band_limited, "residual check needs a band-limited kernel");
    const SourceOptions& src = k.source_options;
    auto neighbour = [&](double tt) {
        return compose_propagator(spec, k.source, TimeSlicing{tt, k.slicing.n_slices}, g, k.params, opt, src).field;
    };
    const auto before = neighbour(t - dt), after = neighbour(t + dt);
    const auto [lo, hi] = difference_range(k, spec, 0.08);
    return schrodinger_residual(before, k.field, after, dt, spec, k.params, lo, hi);
}

} // namespace pathlab
