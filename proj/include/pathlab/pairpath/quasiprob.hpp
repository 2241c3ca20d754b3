#pragma once

// Transition probabilities as integrals over pairs of paths.
//
// With x_j = z_j + w_j/2 (amplitude path) and y_j = z_j - w_j/2 (conjugate
// path), w_0 = w_n = 0, the product of slice kernels K(x) K*(y) becomes
//
//   (m / 2 pi hbar eps)^(n dim) exp{ i sum_j phi_j(w_j) },
//   phi_j(w) = -(m / hbar eps) w.s_j - (eps / hbar)[V(z_j + w/2) - V(z_j - w/2)],
//
// with s_j = z_{j-1} - 2 z_j + z_{j+1}. The endpoint potentials cancel, so
// any endpoint rule gives the same integrand. Each phi_j depends on w_j alone
// and is odd in it, so the w-integral over a symmetric window is a real
// product of one-slice factors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/roots.hpp>

#include "pathlab/core/error.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/core/rng.hpp"
#include "pathlab/feynman/propagator.hpp"
#include "pathlab/potentials.hpp"

namespace pathlab {

/// Path nodes z_0 .. z_n (each `dim` coordinates, stored contiguously) at
/// time step eps.
struct PathLattice {
    std::vector<double> z;
    double eps = 1.0;
    PhysicalParams params{};
    int dim = 1;

    std::size_t n() const { return z.size() / static_cast<std::size_t>(dim) - 1; }
    double total_time() const { return eps * static_cast<double>(n()); }
    double coord(std::size_t j, int c = 0) const { return z[j * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]; }
    double& coord(std::size_t j, int c = 0) { return z[j * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]; }
    /// s_j = z_{j-1} - 2 z_j + z_{j+1}, component c.
    double second_difference(std::size_t j, int c = 0) const {
        return coord(j - 1, c) - 2.0 * coord(j, c) + coord(j + 1, c);
    }

    void validate() const {
        require(dim == 1 || dim == 3, "path dimension must be 1 or 3");
        require(z.size() % static_cast<std::size_t>(dim) == 0, "path coordinates do not match dimension");
        require(z.size() / static_cast<std::size_t>(dim) >= 3, "pair paths need n >= 2");
        require(eps > 0.0 && std::isfinite(eps), "time step must be positive");
        params.validate();
        for (double v : z) require(std::isfinite(v), "non-finite path node");
    }

    /// Uniform-velocity 1D path from x0 to x in time t.
    static PathLattice straight(double x0, double x, double t, std::size_t n, const PhysicalParams& params = {}) {
        require(n >= 2, "pair paths need n >= 2");
        PathLattice p{std::vector<double>(n + 1), t / static_cast<double>(n), params, 1};
        for (std::size_t j = 0; j <= n; ++j) p.z[j] = x0 + (x - x0) * static_cast<double>(j) / static_cast<double>(n);
        return p;
    }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t points) {
        require(points >= 2, "need at least two quadrature points");
        const auto order = static_cast<int>(points);
        for (double x : boost::math::legendre_p_zeros<double>(order)) {
            const double dp = boost::math::legendre_p_prime(order, x);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes.push_back(x);
            weights.push_back(w);
            if (x != 0.0) {
                nodes.push_back(-x);
                weights.push_back(w);
            }
        }
    }
    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline double path_potential(const PotentialSpec& spec, const double* r, int dim, const PhysicalParams& params) {
    if (dim == 1) return potential_value(spec, r[0], params);
    return potential_value(spec, Vec3{r[0], r[1], r[2]}, params);
}

/// phi_j(w) for interior node j; w has `dim` components.
inline double slice_phase(const PathLattice& path, std::size_t j, const double* w, const PotentialSpec& spec) {
    const auto& p = path.params;
    double kinetic = 0.0;
    std::array<double, 3> plus{}, minus{};
    for (int c = 0; c < path.dim; ++c) {
        kinetic += w[c] * path.second_difference(j, c);
        plus[static_cast<std::size_t>(c)] = path.coord(j, c) + 0.5 * w[c];
        minus[static_cast<std::size_t>(c)] = path.coord(j, c) - 0.5 * w[c];
    }
    const double dv = path_potential(spec, plus.data(), path.dim, p) - path_potential(spec, minus.data(), path.dim, p);
    return -p.mass / (p.hbar * path.eps) * kinetic - path.eps / p.hbar * dv;
}

/// (m / 2 pi hbar eps)^dim, the squared modulus of one slice prefactor.
inline double slice_density(const PathLattice& path) {
    const auto& p = path.params;
    return std::pow(p.mass / (2.0 * pi * p.hbar * path.eps), path.dim);
}

} // namespace detail

/// exp(i sum_j phi_j(w_j)); w holds the n-1 interior offsets (dim each).
inline cplx pair_path_integrand(const PathLattice& path, const std::vector<double>& w, const PotentialSpec& spec) {
    path.validate();
    require(w.size() == (path.n() - 1) * static_cast<std::size_t>(path.dim), "offset count must match interior nodes");
    double phase = 0.0;
    for (std::size_t j = 1; j < path.n(); ++j) phase += detail::slice_phase(path, j, &w[(j - 1) * static_cast<std::size_t>(path.dim)], spec);
    return std::polar(1.0, phase);
}

/// Integral of exp(i phi_j(w)) over the cube |w_c| <= w_cutoff with the
/// tensor Gauss-Legendre rule.
inline cplx slice_window_integral(const PathLattice& path, std::size_t j, const PotentialSpec& spec, double w_cutoff,
                                  const GaussLegendre& rule) {
    const std::size_t q = rule.size();
    const double scale = std::pow(w_cutoff, path.dim);
    cplx sum{};
    std::array<double, 3> w{};
    std::array<std::size_t, 3> idx{};
    const std::size_t total = path.dim == 1 ? q : q * q * q;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double weight = scale;
        for (int c = 0; c < path.dim; ++c) {
            idx[static_cast<std::size_t>(c)] = rem % q;
            rem /= q;
            w[static_cast<std::size_t>(c)] = w_cutoff * rule.nodes[idx[static_cast<std::size_t>(c)]];
            weight *= rule.weights[idx[static_cast<std::size_t>(c)]];
        }
        sum += weight * std::polar(1.0, detail::slice_phase(path, j, w.data(), spec));
    }
    return sum;
}

struct QuasiValue {
    double value = 0.0;
    double imaginary = 0.0;
    /// (m / 2 pi hbar eps)^(dim (n-1)) (2 w_cutoff)^(dim (n-1)): the value at
    /// exact stationarity, and the magnitude scale for the residue check.
    double scale = 0.0;
};

/// Windowed w-integral of the pair integrand with prefactor
/// (m / 2 pi hbar eps)^(dim (n-1)); the remaining slice density belongs to
/// the path measure.
inline QuasiValue quasiprobability_value(const PathLattice& path, const PotentialSpec& spec, double w_cutoff,
                                         const GaussLegendre& rule) {
    path.validate();
    validate(spec);
    require(w_cutoff > 0.0, "w cutoff must be positive");
    const double density = detail::slice_density(path);
    cplx prod{1.0, 0.0};
    double scale = 1.0;
    for (std::size_t j = 1; j < path.n(); ++j) {
        prod *= density * slice_window_integral(path, j, spec, w_cutoff, rule);
        scale *= density * std::pow(2.0 * w_cutoff, path.dim);
    }
    QuasiValue out{prod.real(), prod.imag(), scale};
    require(std::abs(out.imaginary) <= 1e-8 * scale, "asymmetric quadrature window");
    return out;
}

inline double path_quasiprobability(const PathLattice& path, const PotentialSpec& spec, double w_cutoff,
                                    std::size_t w_points = 64) {
    return quasiprobability_value(path, spec, w_cutoff, GaussLegendre(w_points)).value;
}

/// Displacement of z_1 from the midpoint (free, n = 2) at which the windowed
/// quasiprobability first vanishes: s_1 = pi hbar eps / (m w_cutoff).
inline double dirichlet_first_zero(double eps, double w_cutoff, const PhysicalParams& params = {}) {
    return 0.5 * pi * params.hbar * eps / (params.mass * w_cutoff);
}

/// Most negative value of the normalized window integral
/// (1/2) integral_{-1}^{1} cos(u w) dw over u in [0, u_max], evaluated with
/// the same rule the quasiprobabilities use.
inline double dirichlet_sidelobe_floor(const GaussLegendre& rule, double u_max = 40.0 * pi) {
    double floor = 0.0;
    const std::size_t samples = 20000;
    for (std::size_t i = 0; i <= samples; ++i) {
        const double u = u_max * static_cast<double>(i) / static_cast<double>(samples);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::cos(u * rule.nodes[q]);
        floor = std::min(floor, 0.5 * s);
    }
    return -floor;
}

namespace detail {

inline double curvature(const PotentialSpec& spec, double x, const PhysicalParams& params) {
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    return (potential_gradient(spec, x + h, params) - potential_gradient(spec, x - h, params)) / (2.0 * h);
}

/// Marches z_{j+1} = 2 z_j - z_{j-1} - eps^2 V'(z_j) / m from z_0, z_1.
inline std::vector<double> march(const PotentialSpec& spec, double x0, double z1, double eps, std::size_t n,
                                 const PhysicalParams& params) {
    std::vector<double> z(n + 1);
    z[0] = x0;
    z[1] = z1;
    for (std::size_t j = 1; j < n; ++j) {
        z[j + 1] = 2.0 * z[j] - z[j - 1] - eps * eps * potential_gradient(spec, z[j], params) / params.mass;
        if (!std::isfinite(z[j + 1])) break;
    }
    return z;
}

} // namespace detail

/// Largest |m s_j / eps^2 + V'(z_j)| over interior nodes.
inline double classical_residual(const PathLattice& path, const PotentialSpec& spec) {
    require(path.dim == 1, "classical residual is one-dimensional");
    double worst = 0.0;
    for (std::size_t j = 1; j < path.n(); ++j) {
        const double r = path.params.mass * path.second_difference(j) / (path.eps * path.eps) +
                         potential_gradient(spec, path.coord(j), path.params);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

/// Discrete classical path from x0 to x: shooting over the first step with a
/// bracketed root search, then Newton on the full boundary-value system.
inline PathLattice classical_path_discrete(const PotentialSpec& spec, double x0, double x, double t, std::size_t n,
                                           const PhysicalParams& params = {}) {
    validate(spec);
    params.validate();
    require(n >= 2 && t > 0.0, "need n >= 2 and t > 0");
    const double eps = t / static_cast<double>(n);
    auto miss = [&](double v) {
        const double zn = detail::march(spec, x0, x0 + v * eps, eps, n, params)[n];
        return std::isfinite(zn) ? zn - x : std::numeric_limits<double>::quiet_NaN();
    };
    const double v0 = (x - x0) / t;
    const double f0 = miss(v0);
    require(std::isfinite(f0), "no classical path found (caustic or insufficient bracket)");
    double lo = v0, hi = v0, flo = f0, fhi = f0;
    bool bracketed = f0 == 0.0;
    for (double step = std::max(1.0, std::abs(v0)) * 1e-3; !bracketed && step < 1e6 * std::max(1.0, std::abs(v0)); step *= 2.0) {
        const double a = v0 - step, b = v0 + step, fa = miss(a), fb = miss(b);
        if (std::isfinite(fa) && fa * f0 <= 0.0) {
            lo = a, flo = fa, hi = v0, fhi = f0, bracketed = true;
        } else if (std::isfinite(fb) && fb * f0 <= 0.0) {
            lo = v0, flo = f0, hi = b, fhi = fb, bracketed = true;
        }
    }
    require(bracketed, "no classical path found (caustic or insufficient bracket)");
    double v = lo;
    if (flo != 0.0 && fhi != 0.0) {
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(miss, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
        v = 0.5 * (r.first + r.second);
    } else if (fhi == 0.0) {
        v = hi;
    }
    PathLattice path{detail::march(spec, x0, x0 + v * eps, eps, n, params), eps, params, 1};
    path.z[n] = x;

    // Newton on F_j = m s_j / eps^2 + V'(z_j), j = 1..n-1 (tridiagonal).
    const double c = params.mass / (eps * eps);
    const std::size_t m = n - 1;
    for (int it = 0; it < 4; ++it) {
        std::vector<double> diag(m), rhs(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + 1;
            rhs[i] = -(c * path.second_difference(j) + potential_gradient(spec, path.z[j], params));
            diag[i] = -2.0 * c + detail::curvature(spec, path.z[j], params);
        }
        // Thomas algorithm with constant off-diagonals c.
        std::vector<double> cp(m), dp(m);
        cp[0] = c / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (std::size_t i = 1; i < m; ++i) {
            const double den = diag[i] - c * cp[i - 1];
            require(std::abs(den) > 0.0, "no classical path found (caustic or insufficient bracket)");
            cp[i] = c / den;
            dp[i] = (rhs[i] - c * dp[i - 1]) / den;
        }
        for (std::size_t i = m - 1; i-- > 0;) dp[i] -= cp[i] * dp[i + 1];
        for (std::size_t i = 0; i < m; ++i) path.z[i + 1] += dp[i];
    }
    require(classical_residual(path, spec) < 1e-10 * std::max(1.0, c * std::abs(x - x0)),
            "no classical path found (caustic or insufficient bracket)");
    return path;
}

/// |A(x0 -> x)|^2 from the composed propagator; x must be a grid node.
inline double transition_probability_via_pairs(const PotentialSpec& spec, double x0, double x, double t, std::size_t n,
                                               const Grid1D& grid, const PhysicalParams& params = {},
                                               const SliceOptions& opt = {}, const SourceOptions& src = {}) {
    require(grid.on_node(x), "detector point must be a grid node");
    const auto k = compose_propagator(spec, x0, TimeSlicing{t, n}, grid, params, opt, src);
    return std::norm(k.field[grid.nearest(x)]);
}

/// Window half-width matched to a lattice: the kinetic phase of adjacent
/// z nodes differs by fraction * pi / 2 at the window edge.
inline double lattice_matched_cutoff(double eps, double dz, const PhysicalParams& params, double fraction = 0.5) {
    return fraction * pi * params.hbar * eps / (2.0 * params.mass * dz);
}

/// Direct evaluation of the pair-path integral: quasiprobabilities summed
/// over every grid node for each interior z_j, times the path measure
/// (m / 2 pi hbar eps) dz^(n-1).
inline double direct_pair_quadrature(const PotentialSpec& spec, double x0, double x, double t, std::size_t n,
                                     const Grid1D& grid, const PhysicalParams& params = {}, double fraction = 0.5,
                                     std::size_t w_points = 64) {
    require(n >= 2 && n <= 4, "direct pair quadrature supports 2 <= n <= 4");
    PathLattice path = PathLattice::straight(x0, x, t, n, params);
    const double w_cutoff = lattice_matched_cutoff(path.eps, grid.dx(), params, fraction);
    const GaussLegendre rule(w_points);
    const std::size_t interior = n - 1, g = grid.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < interior; ++i) total *= g;
    double sum = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t j = 1; j < n; ++j) {
            path.z[j] = grid.x(rem % g);
            rem /= g;
        }
        sum += quasiprobability_value(path, spec, w_cutoff, rule).value;
    }
    return sum * detail::slice_density(path) * std::pow(grid.dx(), static_cast<double>(interior));
}

struct QuasiProbReport {
    std::vector<double> values;
    double min_value = 0.0;
    double fraction_negative = 0.0;
    /// Quasiprobability at exact stationarity; values are compared to it.
    double normalization = 0.0;
    /// Measured Dirichlet sidelobe depth, as a fraction of `normalization`.
    double artifact_floor = 0.0;
    double fraction_below_floor = 0.0;
    double max_imaginary = 0.0;
    std::string potential;
};

struct ScanOptions {
    double w_cutoff = 2.0;
    std::size_t w_points = 64;
    unsigned threads = 1;
};

/// Sample paths: Gaussian perturbations of `center`'s interior nodes, path i
/// drawn from sub-stream i at amplitude {0.1, 0.3, 1.0}[i mod 3] * base.
/// A positive `snap` rounds perturbed nodes to multiples of it.
inline std::vector<PathLattice> perturbed_paths(const PathLattice& center, std::size_t count, const RngStream& rng,
                                                double base, double snap = 0.0) {
    static constexpr std::array<double, 3> amplitudes{0.1, 0.3, 1.0};
    std::vector<PathLattice> out(count, center);
    for (std::size_t i = 0; i < count; ++i) {
        auto s = rng.substream(i);
        const double a = amplitudes[i % 3] * base;
        for (std::size_t j = 1; j < center.n(); ++j)
            for (int c = 0; c < center.dim; ++c) {
                double& v = out[i].coord(j, c);
                v += a * s.normal();
                if (snap > 0.0) v = snap * std::round(v / snap);
            }
    }
    return out;
}

struct ArgmaxResult {
    PathLattice best;
    PathLattice classical;
    double best_value = 0.0;
    /// Largest |z_best,j - z_classical,j| over interior nodes.
    double max_node_offset = 0.0;
};

/// Sampled path with the largest quasiprobability, with the samples snapped
/// to a lattice of spacing `step`.
inline ArgmaxResult argmax_over_samples(const PotentialSpec& spec, const PathLattice& tmpl, std::size_t n_paths,
                                        const RngStream& rng, double step, const ScanOptions& opt = {}) {
    tmpl.validate();
    require(step > 0.0, "lattice step must be positive");
    const auto& p = tmpl.params;
    const double t = tmpl.total_time();
    const auto center = classical_path_discrete(spec, tmpl.z.front(), tmpl.z.back(), t, tmpl.n(), p);
    const auto paths = perturbed_paths(center, n_paths, rng, std::sqrt(p.hbar * t / p.mass), step);
    const GaussLegendre rule(opt.w_points);
    std::vector<double> values(n_paths);
    parallel_chunks(n_paths, 64, opt.threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) values[i] = quasiprobability_value(paths[i], spec, opt.w_cutoff, rule).value;
    });
    const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    ArgmaxResult r{paths[best], center, values[best], 0.0};
    for (std::size_t j = 1; j < center.n(); ++j) r.max_node_offset = std::max(r.max_node_offset, std::abs(r.best.z[j] - center.z[j]));
    return r;
}

/// Quasiprobabilities of perturbations of the classical path between the
/// template's endpoints, with the negativity measured against the window
/// artifact floor.
inline QuasiProbReport positivity_scan(const PotentialSpec& spec, const PathLattice& tmpl, std::size_t n_paths,
                                       const RngStream& rng, const ScanOptions& opt = {}) {
    tmpl.validate();
    require(tmpl.dim == 1, "positivity scan is one-dimensional");
    require(n_paths >= 1, "need at least one sample path");
    const auto& p = tmpl.params;
    const double t = tmpl.total_time();
    const auto center = classical_path_discrete(spec, tmpl.z.front(), tmpl.z.back(), t, tmpl.n(), p);
    const auto paths = perturbed_paths(center, n_paths, rng, std::sqrt(p.hbar * t / p.mass));
    const GaussLegendre rule(opt.w_points);

    QuasiProbReport rep;
    rep.potential = potential_name(spec);
    rep.values.resize(n_paths);
    std::vector<double> imag(n_paths);
    parallel_chunks(n_paths, 64, opt.threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            const auto q = quasiprobability_value(paths[i], spec, opt.w_cutoff, rule);
            rep.values[i] = q.value;
            imag[i] = std::abs(q.imaginary);
        }
    });
    rep.normalization = quasiprobability_value(center, spec, opt.w_cutoff, rule).scale;
    rep.artifact_floor = dirichlet_sidelobe_floor(rule);
    rep.min_value = *std::min_element(rep.values.begin(), rep.values.end());
    rep.max_imaginary = *std::max_element(imag.begin(), imag.end());
    std::size_t neg = 0, below = 0;
    // A small tolerance keeps rounding at exactly the floor from counting.
    const double threshold = -(rep.artifact_floor + 1e-9) * rep.normalization;
    for (double v : rep.values) {
        neg += v < 0.0;
        below += v < threshold;
    }
    rep.fraction_negative = static_cast<double>(neg) / static_cast<double>(n_paths);
    rep.fraction_below_floor = static_cast<double>(below) / static_cast<double>(n_paths);
    return rep;
}

struct SpreadRow {
    double hbar = 0.0;
    double spread = 0.0;
    /// Standard error from 10 batch means.
    double std_error = 0.0;
    std::size_t core_paths = 0;
};

struct ConcentrationOptions {
    double w_cutoff = 0.5;
    std::size_t w_points = 64;
    /// Fixed sampling width of the interior nodes, the same for every hbar.
    double sample_scale = 0.5;
    std::size_t n_paths = 20000;
    unsigned threads = 1;
};

/// For each hbar: RMS node deviation from the classical path over the
/// quasiprobability mass in the central lobe (values above half the
/// stationary value), importance-weighted for the Gaussian sampling.
inline std::vector<SpreadRow> hbar_concentration(const PotentialSpec& spec, const std::vector<double>& hbars,
                                                 const PathLattice& tmpl, const RngStream& rng,
                                                 const ConcentrationOptions& opt = {}) {
    require(!hbars.empty(), "need at least one hbar");
    for (std::size_t i = 0; i < hbars.size(); ++i) {
        require(hbars[i] > 0.0, "hbar values must be positive");
        if (i > 0) require(hbars[i] < hbars[i - 1], "hbar values must be descending");
    }
    tmpl.validate();
    require(tmpl.dim == 1, "concentration scan is one-dimensional");
    const GaussLegendre rule(opt.w_points);
    const std::size_t interior = tmpl.n() - 1;
    std::vector<SpreadRow> rows;
    for (double hb : hbars) {
        PhysicalParams p = tmpl.params;
        p.hbar = hb;
        const auto center = classical_path_discrete(spec, tmpl.z.front(), tmpl.z.back(), tmpl.total_time(), tmpl.n(), p);
        std::vector<double> num(opt.n_paths, 0.0), den(opt.n_paths, 0.0);
        parallel_chunks(opt.n_paths, 64, opt.threads, [&](std::size_t b, std::size_t e, std::size_t) {
            for (std::size_t i = b; i < e; ++i) {
                auto s = rng.substream(i);
                PathLattice path = center;
                double d2 = 0.0, log_g = 0.0;
                for (std::size_t j = 1; j <= interior; ++j) {
                    const double u = s.normal();
                    path.z[j] += opt.sample_scale * u;
                    d2 += opt.sample_scale * opt.sample_scale * u * u;
                    log_g -= 0.5 * u * u;
                }
                const auto q = quasiprobability_value(path, spec, opt.w_cutoff, rule);
                if (q.value < 0.5 * q.scale) continue;
                const double weight = q.value * std::exp(-log_g);
                num[i] = weight * d2 / static_cast<double>(interior);
                den[i] = weight;
            }
        });
        SpreadRow row{hb, 0.0, 0.0, 0};
        double tn = 0.0, td = 0.0;
        const std::size_t batches = 10;
        std::vector<double> batch(batches, 0.0);
        for (std::size_t bi = 0; bi < batches; ++bi) {
            double bn = 0.0, bd = 0.0;
            for (std::size_t i = opt.n_paths * bi / batches; i < opt.n_paths * (bi + 1) / batches; ++i) {
                bn += num[i];
                bd += den[i];
                row.core_paths += den[i] > 0.0;
            }
            tn += bn;
            td += bd;
            batch[bi] = bd > 0.0 ? std::sqrt(bn / bd) : 0.0;
        }
        require(td > 0.0, "no sampled path reached the central lobe");
        row.spread = std::sqrt(tn / td);
        double var = 0.0;
        for (double v : batch) var += (v - row.spread) * (v - row.spread);
        row.std_error = std::sqrt(var / static_cast<double>(batches * (batches - 1)));
        rows.push_back(row);
    }
    return rows;
}

} // namespace pathlab
