#pragma once

// Closed catalog of analytic potentials: values, forces, Fourier transforms.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pathlab/core/error.hpp"
#include "pathlab/core/grid.hpp"

namespace pathlab {

using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

namespace potential {

struct Free {};
/// Uniform force `force` along +x: V = -force * x.
struct Linear {
    double force = 0.0;
};
/// V = m omega^2 r^2 / 2.
struct Harmonic {
    double omega = 1.0;
};
/// V = lambda4 r^4.
struct Quartic {
    double lambda4 = 1.0;
};
/// V = depth * exp(-r^2 / (2 sigma^2)); negative depth is a well.
struct GaussianWell {
    double depth = -1.0;
    double sigma = 1.0;
};
/// V = g exp(-mu r) / r.
struct Yukawa {
    double g = 1.0;
    double mu = 1.0;
};
/// V = height for r < half_width.
struct SquareBarrier {
    double height = 1.0;
    double half_width = 1.0;
};

} // namespace potential

using PotentialSpec = std::variant<potential::Free, potential::Linear, potential::Harmonic, potential::Quartic,
                                   potential::GaussianWell, potential::Yukawa, potential::SquareBarrier>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string potential_name(const PotentialSpec& spec) {
    return std::visit(overloaded{[](const potential::Free&) { return std::string("free"); },
                                 [](const potential::Linear&) { return std::string("linear"); },
                                 [](const potential::Harmonic&) { return std::string("harmonic"); },
                                 [](const potential::Quartic&) { return std::string("quartic"); },
                                 [](const potential::GaussianWell&) { return std::string("gaussian_well"); },
                                 [](const potential::Yukawa&) { return std::string("yukawa"); },
                                 [](const potential::SquareBarrier&) { return std::string("square_barrier"); }},
                      spec);
}

inline void validate(const PotentialSpec& spec) {
    std::visit(overloaded{[](const potential::Free&) {},
                          [](const potential::Linear& p) { require(std::isfinite(p.force), "linear: bad force"); },
                          [](const potential::Harmonic& p) {
                              require(std::isfinite(p.omega) && p.omega >= 0.0, "harmonic: omega must be >= 0");
                          },
                          [](const potential::Quartic& p) { require(std::isfinite(p.lambda4), "quartic: bad lambda4"); },
                          [](const potential::GaussianWell& p) {
                              require(std::isfinite(p.depth), "gaussian_well: bad depth");
                              require(p.sigma > 0.0, "gaussian_well: sigma must be > 0");
                          },
                          [](const potential::Yukawa& p) {
                              require(std::isfinite(p.g), "yukawa: bad coupling");
                              require(p.mu > 0.0, "yukawa: mu must be > 0");
                          },
                          [](const potential::SquareBarrier& p) {
                              require(std::isfinite(p.height), "square_barrier: bad height");
                              require(p.half_width > 0.0, "square_barrier: half width must be > 0");
                          }},
               spec);
}

/// True exactly for the potentials whose pair-path phase is linear in the
/// path difference: free, uniform force, harmonic.
inline bool is_at_most_quadratic(const PotentialSpec& spec) {
    return std::holds_alternative<potential::Free>(spec) || std::holds_alternative<potential::Linear>(spec) ||
           std::holds_alternative<potential::Harmonic>(spec);
}

/// True for the potentials with an absolutely integrable profile.
inline bool is_fourier_transformable(const PotentialSpec& spec) {
    return std::holds_alternative<potential::GaussianWell>(spec) || std::holds_alternative<potential::Yukawa>(spec) ||
           std::holds_alternative<potential::SquareBarrier>(spec);
}

// Radial profile V(r) for the rotation-invariant variants, r = |x| in 1D.
namespace detail {

inline double radial_value(const PotentialSpec& spec, double r, const PhysicalParams& params) {
    return std::visit(
        overloaded{[](const potential::Free&) { return 0.0; },
                   [](const potential::Linear&) -> double { throw Error("linear potential is not radial"); },
                   [&](const potential::Harmonic& p) { return 0.5 * params.mass * p.omega * p.omega * r * r; },
                   [&](const potential::Quartic& p) { return p.lambda4 * r * r * r * r; },
                   [&](const potential::GaussianWell& p) { return p.depth * std::exp(-r * r / (2.0 * p.sigma * p.sigma)); },
                   [&](const potential::Yukawa& p) {
                       if (r == 0.0) throw Error("singular point");
                       return p.g * std::exp(-p.mu * r) / r;
                   },
                   [&](const potential::SquareBarrier& p) {
                       if (r < p.half_width) return p.height;
                       if (r == p.half_width) return 0.5 * p.height;
                       return 0.0;
                   }},
        spec);
}

// dV/dr
inline double radial_derivative(const PotentialSpec& spec, double r, const PhysicalParams& params) {
    return std::visit(
        overloaded{[](const potential::Free&) { return 0.0; },
                   [](const potential::Linear&) -> double { throw Error("linear potential is not radial"); },
                   [&](const potential::Harmonic& p) { return params.mass * p.omega * p.omega * r; },
                   [&](const potential::Quartic& p) { return 4.0 * p.lambda4 * r * r * r; },
                   [&](const potential::GaussianWell& p) {
                       const double s2 = p.sigma * p.sigma;
                       return -p.depth * r / s2 * std::exp(-r * r / (2.0 * s2));
                   },
                   [&](const potential::Yukawa& p) {
                       if (r == 0.0) throw Error("singular point");
                       return -p.g * std::exp(-p.mu * r) * (1.0 + p.mu * r) / (r * r);
                   },
                   // Distributional edges are ignored: the force vanishes almost everywhere.
                   [&](const potential::SquareBarrier&) { return 0.0; }},
        spec);
}

} // namespace detail

/// V(x) in one dimension.
inline double potential_value(const PotentialSpec& spec, double x, const PhysicalParams& params = {}) {
    if (const auto* lin = std::get_if<potential::Linear>(&spec)) return -lin->force * x;
    return detail::radial_value(spec, std::abs(x), params);
}

/// V(r) in three dimensions; the uniform force points along +x.
inline double potential_value(const PotentialSpec& spec, const Vec3& r, const PhysicalParams& params = {}) {
    if (const auto* lin = std::get_if<potential::Linear>(&spec)) return -lin->force * r[0];
    return detail::radial_value(spec, norm3(r), params);
}

/// dV/dx in one dimension (the negative of the force).
inline double potential_gradient(const PotentialSpec& spec, double x, const PhysicalParams& params = {}) {
    if (const auto* lin = std::get_if<potential::Linear>(&spec)) return -lin->force;
    if (std::holds_alternative<potential::Yukawa>(spec) && x == 0.0) throw Error("singular point");
    const double d = detail::radial_derivative(spec, std::abs(x), params);
    return x < 0.0 ? -d : d;
}

inline Vec3 potential_gradient(const PotentialSpec& spec, const Vec3& r, const PhysicalParams& params = {}) {
    if (const auto* lin = std::get_if<potential::Linear>(&spec)) return {-lin->force, 0.0, 0.0};
    const double rr = norm3(r);
    if (rr == 0.0) {
        if (std::holds_alternative<potential::Yukawa>(spec)) throw Error("singular point");
        return {0.0, 0.0, 0.0};
    }
    const double d = detail::radial_derivative(spec, rr, params) / rr;
    return {d * r[0], d * r[1], d * r[2]};
}

enum class Dimension { one = 1, three = 3 };

/// Closed-form V~(k) = integral V(x) exp(i k.x) dx. All catalog transforms are
/// real and even, so the result depends on |k| only.
inline cplx potential_fourier(const PotentialSpec& spec, double k, Dimension dim) {
    validate(spec);
    const double ak = std::abs(k);
    return std::visit(
        overloaded{
            [&](const potential::GaussianWell& p) -> cplx {
                const double s = p.sigma;
                const double damp = std::exp(-0.5 * s * s * ak * ak);
                if (dim == Dimension::one) return p.depth * s * std::sqrt(2.0 * pi) * damp;
                return p.depth * std::pow(2.0 * pi * s * s, 1.5) * damp;
            },
            [&](const potential::Yukawa& p) -> cplx {
                if (dim == Dimension::one) throw Error("non-integrable potential");
                return 4.0 * pi * p.g / (p.mu * p.mu + ak * ak);
            },
            [&](const potential::SquareBarrier& p) -> cplx {
                const double a = p.half_width;
                const double ka = ak * a;
                if (dim == Dimension::one) {
                    if (ka < 1e-8) return 2.0 * p.height * a;
                    return 2.0 * p.height * std::sin(ka) / ak;
                }
                // Uniform ball of radius a.
                if (ka < 1e-3) return 4.0 * pi * p.height * a * a * a / 3.0 * (1.0 - ka * ka / 10.0);
                return 4.0 * pi * p.height * (std::sin(ka) - ka * std::cos(ka)) / (ak * ak * ak);
            },
            [](const auto&) -> cplx { throw Error("non-integrable potential"); }},
        spec);
}

/// The same transform by adaptive Gauss-Kronrod quadrature (no closed forms used).
inline cplx potential_fourier_quadrature(const PotentialSpec& spec, double k, Dimension dim,
                                         const PhysicalParams& params = {}) {
    validate(spec);
    require(is_fourier_transformable(spec), "non-integrable potential");
    using boost::math::quadrature::gauss_kronrod;
    constexpr unsigned depth = 20;
    constexpr double tol = 1e-13;

    // Integration cutoff beyond which the profile is negligible (or zero).
    double r_max = 0.0;
    std::visit(overloaded{[&](const potential::GaussianWell& p) { r_max = 14.0 * p.sigma; },
                          [&](const potential::Yukawa& p) { r_max = 60.0 / p.mu; },
                          [&](const potential::SquareBarrier& p) { r_max = p.half_width; },
                          [](const auto&) {}},
               spec);
    const double ak = std::abs(k);
    // Panels of at most a quarter period keep every panel smooth and cheap.
    const double period = ak > 0.0 ? 2.0 * pi / ak : r_max;
    const int panels = std::max(8, static_cast<int>(std::ceil(4.0 * r_max / period)));
    const double h = r_max / panels;

    double acc = 0.0;
    if (dim == Dimension::one) {
        require(!std::holds_alternative<potential::Yukawa>(spec), "non-integrable potential");
        // V even: integral over R of V cos(kx) = 2 * integral over [0, r_max].
        auto f = [&](double x) { return potential_value(spec, x, params) * std::cos(ak * x); };
        for (int i = 0; i < panels; ++i)
            acc += gauss_kronrod<double, 31>::integrate(f, i * h, (i + 1) * h, depth, tol);
        return 2.0 * acc;
    }
    auto f = [&](double r) {
        if (r == 0.0) r = 1e-300;
        const double sinc = ak * r < 1e-8 ? 1.0 : std::sin(ak * r) / (ak * r);
        return r * r * detail::radial_value(spec, r, params) * sinc;
    };
    for (int i = 0; i < panels; ++i)
        acc += gauss_kronrod<double, 31>::integrate(f, i * h, (i + 1) * h, depth, tol);
    return 4.0 * pi * acc;
}

} // namespace pathlab
