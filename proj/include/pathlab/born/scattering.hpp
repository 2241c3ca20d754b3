#pragma once

// One-interaction scattering: straight-line kinematics into and out of a
// point-like target, the |V~(dk)|^2 deflection law, an audit of the
// second-order expansion of the pair phase, and a 1D dynamical check
// against the split-step solver.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pathlab/core/error.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/core/window.hpp"
#include "pathlab/potentials.hpp"
#include "pathlab/schrodinger/split_step.hpp"

namespace pathlab {

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

struct ScatteringKinematics {
    Vec3 r0{}, rk{}, r{};
    double tk = 0.0;
    double t = 0.0;
    Vec3 v_in{}, v_out{}, dv{}, dk{};

    double dk_magnitude() const { return norm3(dk); }
    /// |v_out| / |v_in|; reported, not enforced.
    double speed_ratio() const { return norm3(v_out) / norm3(v_in); }
};

inline ScatteringKinematics kinematics_from_geometry(const Vec3& r0, const Vec3& rk, const Vec3& r, double tk, double t,
                                                     const PhysicalParams& params = {}) {
    params.validate();
    require(tk > 0.0 && tk < t, "degenerate geometry: need 0 < t_k < t");
    require(norm3(rk - r0) > 0.0 && norm3(r - rk) > 0.0, "degenerate geometry: target coincides with an endpoint");
    ScatteringKinematics k{r0, rk, r, tk, t, {}, {}, {}, {}};
    k.v_in = (1.0 / tk) * (rk - r0);
    k.v_out = (1.0 / (t - tk)) * (r - rk);
    k.dv = k.v_out - k.v_in;
    k.dk = (params.mass / params.hbar) * k.dv;
    return k;
}

struct BornResult {
    double dk = 0.0;
    double analytic = 0.0;
    double quadrature = 0.0;
    /// |analytic - quadrature| / analytic.
    double disagreement = 0.0;
    bool forward_excluded = false;
    std::string note;
};

/// |V~(dk)|^2 from the closed-form transform and from quadrature.
inline BornResult born_probability(const PotentialSpec& spec, double dk, Dimension dim = Dimension::three) {
    require(is_fourier_transformable(spec), "non-integrable potential");
    BornResult b;
    b.dk = std::abs(dk);
    b.analytic = std::norm(potential_fourier(spec, dk, dim));
    b.quadrature = std::norm(potential_fourier_quadrature(spec, dk, dim));
    require(b.analytic >= 0.0 && b.quadrature >= 0.0, "negative Born probability");
    b.disagreement = b.analytic > 0.0 ? std::abs(b.analytic - b.quadrature) / b.analytic : std::abs(b.quadrature);
    if (b.dk == 0.0) {
        b.forward_excluded = true;
        b.note = "excluded by collimation";
    }
    return b;
}

struct AuditGrid {
    /// Half-width of the v window (length units). The window is a smooth
    /// bump, flat on |v| < flat_fraction * v_window and zero at the edge.
    double v_window = 16.0;
    double flat_fraction = 0.5;
    double spacing = 0.02;
};

/// Second-order terms of exp[i V(r - v) - i V(r + v)] - 1 integrated against
/// exp(2 i dk v) over (r, v) in one dimension, in units where the slice
/// coupling eps / hbar is absorbed into V.
struct BornAudit {
    double dk = 0.0;
    cplx linear_minus{};  ///< integral of  i V(r - v)
    cplx linear_plus{};   ///< integral of  i V(r + v)
    double linear_diff = 0.0;
    double squared_at_nonzero = 0.0; ///< |integral of -(V(r-v)^2 + V(r+v)^2)/2|
    cplx cross{};                    ///< integral of V(r - v) V(r + v)
    double cross_term = 0.0;         ///< Re cross
    double expected_cross = 0.0;     ///< |V~(dk)|^2 / 2
    /// eps / hbar: the physical terms carry this to the first or second power.
    double coupling = 0.0;
};

namespace detail {

inline double audit_support(const PotentialSpec& spec) {
    return std::visit(overloaded{[](const potential::GaussianWell& p) { return 10.0 * p.sigma; },
                                 [](const potential::SquareBarrier& p) { return p.half_width; },
                                 [](const auto&) -> double { throw Error("non-integrable potential"); }},
                      spec);
}

} // namespace detail

/// The displacement v here is the half-separation of the path pair, so the
/// kinetic phase is 2 dk v.
inline BornAudit born_term_audit(const PotentialSpec& spec, double dk, double eps, const PhysicalParams& params = {},
                                 const AuditGrid& grid = {}) {
    validate(spec);
    params.validate();
    require(dk != 0.0, "audit needs a nonzero momentum transfer");
    require(eps > 0.0 && grid.spacing > 0.0 && grid.v_window > 0.0, "bad audit grid");
    require(grid.flat_fraction >= 0.0 && grid.flat_fraction < 1.0, "bad audit grid");
    const double support = detail::audit_support(spec);
    const double h = grid.spacing;
    const auto nv = static_cast<long>(std::ceil(grid.v_window / h));
    const auto nr = static_cast<long>(std::ceil((grid.v_window + support) / h)) + 2;

    // r and v share one lattice, so r -+ v is again a lattice node and the
    // shifted sums see exactly the same samples.
    std::vector<double> pot(static_cast<std::size_t>(2 * (nr + nv) + 1));
    for (std::size_t i = 0; i < pot.size(); ++i)
        pot[i] = potential_value(spec, static_cast<double>(static_cast<long>(i) - nr - nv) * h, params);
    auto at = [&](long i) { return pot[static_cast<std::size_t>(i + nr + nv)]; };

    BornAudit a;
    a.dk = dk;
    a.coupling = eps / params.hbar;
    cplx sq_sum{};
    for (long j = -nv; j <= nv; ++j) {
        const double v = static_cast<double>(j) * h;
        const double win = flat_top_window(v, grid.flat_fraction * grid.v_window, grid.v_window);
        if (win == 0.0) continue;
        const cplx phase = std::polar(win * h * h, 2.0 * dk * v);
        double lm = 0.0, lp = 0.0, s2 = 0.0, c = 0.0;
        for (long i = -nr; i <= nr; ++i) {
            const double vm = at(i - j), vp = at(i + j);
            lm += vm;
            lp += vp;
            s2 += vm * vm + vp * vp;
            c += vm * vp;
        }
        a.linear_minus += cplx(0.0, 1.0) * lm * phase;
        a.linear_plus += cplx(0.0, 1.0) * lp * phase;
        sq_sum += -0.5 * s2 * phase;
        a.cross += c * phase;
    }
    a.linear_diff = std::abs(a.linear_minus - a.linear_plus);
    a.squared_at_nonzero = std::abs(sq_sum);
    a.cross_term = a.cross.real();
    a.expected_cross = 0.5 * std::norm(potential_fourier(spec, dk, Dimension::one));
    return a;
}

struct ReflectionSetup {
    Grid1D grid{-300.0, 300.0, 8192};
    double x_start = -120.0;
    double sigma_x = 16.0;
    double dt = 5e-3;
    /// Probability left of -barrier_extent counts as reflected.
    double barrier_extent = 5.0;
    PhysicalParams params{};
};

struct ReflectionResult {
    double r_simulated = 0.0;
    double r_born = 0.0;
    /// First-order reflection averaged over the packet's momentum distribution.
    double r_born_packet = 0.0;
    double transmitted = 0.0;
    std::size_t steps = 0;
};

/// First-order 1D reflection (m / (hbar^2 k0))^2 |V~(2 k0)|^2.
inline double born_reflection_1d(const PotentialSpec& spec, double k0, const PhysicalParams& params = {}) {
    const double pref = params.mass / (params.hbar * params.hbar * k0);
    return pref * pref * std::norm(potential_fourier(spec, 2.0 * k0, Dimension::one));
}

/// Born reflection averaged over |phi(k)|^2 ~ exp(-2 sigma_x^2 (k - k0)^2).
inline double born_reflection_packet(const PotentialSpec& spec, double k0, double sigma_x,
                                     const PhysicalParams& params = {}) {
    const double sk = 1.0 / (2.0 * sigma_x);
    const int n = 400;
    const double h = 16.0 * sk / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double k = k0 - 8.0 * sk + i * h;
        if (k <= 0.0) continue;
        const double d = (k - k0) / sk;
        const double w = std::exp(-0.5 * d * d) * ((i == 0 || i == n) ? 0.5 : 1.0);
        num += w * born_reflection_1d(spec, k, params);
        den += w;
    }
    return num / den;
}

/// Sends a Gaussian packet at wavenumber k0 through the potential with the
/// split-step solver until it has cleared the barrier, and compares the
/// reflected probability with the first-order formula.
inline ReflectionResult weak_potential_reflection_1d(const PotentialSpec& spec, double k0,
                                                     const ReflectionSetup& setup = {}) {
    require(k0 > 0.0, "incident wavenumber must be positive");
    require(setup.sigma_x * k0 > 10.0, "packet momentum width must be small compared with k0");
    ReflectionResult res;
    res.r_born = born_reflection_1d(spec, k0, setup.params);
    require(res.r_born < 0.05, "outside Born regime");
    const auto& p = setup.params;
    const double speed = p.hbar * k0 / p.mass;
    // Travel until the incident packet sits as far past the barrier as it started before it.
    const double t_final = 2.0 * std::abs(setup.x_start) / speed;
    res.steps = static_cast<std::size_t>(std::ceil(t_final / setup.dt));
    const auto psi0 = gaussian_packet(setup.grid, setup.x_start, setup.sigma_x, k0);
    const auto psi = split_step_evolve(psi0, {setup.grid, setup.dt, res.steps, spec, p});
    const auto rt = reflection_transmission(psi, -setup.barrier_extent, setup.barrier_extent);
    res.r_born_packet = born_reflection_packet(spec, k0, setup.sigma_x, p);
    res.r_simulated = rt.reflected;
    res.transmitted = rt.transmitted;
    return res;
}

} // namespace pathlab
