#pragma once

// Strang split-step Fourier solver on a periodic lattice: the reference the
// propagator and scattering results are checked against.
//
// The Grid1D nodes are read as one period of a ring of n sites (period n*dx).

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pathlab/core/fft.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/potentials.hpp"

namespace pathlab {

struct SolverConfig {
    Grid1D grid;
    double dt = 1e-3;
    std::size_t n_steps = 1000;
    PotentialSpec spec = potential::Free{};
    PhysicalParams params{};

    void validate() const {
        require(dt > 0.0 && std::isfinite(dt), "solver dt must be positive");
        params.validate();
        pathlab::validate(spec);
    }
};

/// Angular wavenumber of FFT bin q on the grid's ring.
inline double fft_wavenumber(std::size_t q, std::size_t n, double dx) {
    const double s = q <= n / 2 ? static_cast<double>(q) : static_cast<double>(q) - static_cast<double>(n);
    return 2.0 * pi * s / (static_cast<double>(n) * dx);
}

/// |k| of the strongest Fourier component of psi.
inline double dominant_wavenumber(const ComplexField& psi) {
    const std::size_t n = psi.size();
    std::vector<cplx> spec = psi.values;
    FftPlan plan(n);
    plan.forward(spec);
    std::size_t best = 0;
    for (std::size_t q = 1; q < n; ++q)
        if (std::norm(spec[q]) > std::norm(spec[best])) best = q;
    return std::abs(fft_wavenumber(best, n, psi.grid.dx()));
}

/// Lattice probability sum |psi_i|^2 dx, the quantity the solver conserves.
inline double probability(const ComplexField& psi) { return discrete_norm(psi); }

/// Applies n_steps of exp(-iV dt/2hbar) F^-1 exp(-i hbar k^2 dt/2m) F exp(-iV dt/2hbar).
inline ComplexField split_step_evolve(const ComplexField& psi0, const SolverConfig& cfg) {
    cfg.validate();
    require(psi0.grid.same_as(cfg.grid), "wavefunction grid differs from solver grid");
    require(psi0.finite(), "non-finite field");
    require(std::abs(probability(psi0) - 1.0) <= 1e-8, "initial wavefunction is not normalized");
    require(dominant_wavenumber(psi0) * cfg.grid.dx() <= 1.0, "grid under-resolved");

    const Grid1D& g = cfg.grid;
    const std::size_t n = g.size();
    const double hb = cfg.params.hbar, m = cfg.params.mass;
    std::vector<cplx> half_v(n), kinetic(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = potential_value(cfg.spec, g.x(i), cfg.params);
        require(std::isfinite(v), "potential singular on grid");
        half_v[i] = std::polar(1.0, -0.5 * v * cfg.dt / hb);
        const double k = fft_wavenumber(i, n, g.dx());
        // 1/n folds the inverse-transform normalization into the kinetic factor.
        kinetic[i] = std::polar(1.0 / static_cast<double>(n), -hb * k * k * cfg.dt / (2.0 * m));
    }
    FftPlan plan(n);
    std::vector<cplx> psi = psi0.values;
    for (std::size_t s = 0; s < cfg.n_steps; ++s) {
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];
        plan.forward(psi);
        for (std::size_t i = 0; i < n; ++i) psi[i] *= kinetic[i];
        plan.backward(psi);
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];
    }
    return ComplexField(g, std::move(psi));
}

/// <psi|H|psi> / <psi|psi> with the spectral kinetic energy.
inline double energy(const ComplexField& psi, const PotentialSpec& spec, const PhysicalParams& params = {}) {
    const Grid1D& g = psi.grid;
    const std::size_t n = g.size();
    std::vector<cplx> f = psi.values;
    FftPlan plan(n);
    plan.forward(f);
    double kin = 0.0, pot = 0.0, norm = 0.0, spec_norm = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        const double k = fft_wavenumber(q, n, g.dx());
        kin += params.hbar * params.hbar * k * k / (2.0 * params.mass) * std::norm(f[q]);
        spec_norm += std::norm(f[q]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        pot += potential_value(spec, g.x(i), params) * std::norm(psi.values[i]);
        norm += std::norm(psi.values[i]);
    }
    return kin / spec_norm + pot / norm;
}

struct ScatteringSplit {
    double reflected = 0.0;
    double transmitted = 0.0;
};

/// Lattice probabilities left of `lo` and right of `hi` after scattering
/// (normalized by the total).
inline ScatteringSplit reflection_transmission(const ComplexField& psi, double lo, double hi) {
    require(lo <= hi, "barrier extent must satisfy lo <= hi");
    double left = 0.0, right = 0.0, inside = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = psi.grid.x(i);
        const double p = std::norm(psi.values[i]);
        if (x < lo) left += p;
        else if (x > hi) right += p;
        else inside += p;
    }
    const double total = left + right + inside;
    require(total > 0.0, "empty wavefunction");
    require(inside / total < 1e-6, "evolve longer");
    return {left / total, right / total};
}

/// Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i k0 x).
inline ComplexField gaussian_packet(const Grid1D& g, double x0, double sigma, double k0) {
    require(sigma > 0.0, "packet width must be positive");
    auto psi = ComplexField::sample(g, [&](double x) {
        const double d = x - x0;
        return std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), k0 * x);
    });
    const double scale = 1.0 / std::sqrt(probability(psi));
    for (auto& v : psi.values) v *= scale;
    return psi;
}

/// Squared overlap |<a|b>|^2 for normalized fields.
inline double fidelity(const ComplexField& a, const ComplexField& b) {
    require(a.grid.same_as(b.grid), "fidelity: mismatched grids");
    ComplexField prod(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) prod.values[i] = std::conj(a.values[i]) * b.values[i];
    return std::norm(integrate(prod));
}

} // namespace pathlab
