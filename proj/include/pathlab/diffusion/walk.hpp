#pragma once

// Unbiased lattice random walk and its continuum limit.
//
// Convention: D = lambda^2 / (2 eps), so the walk's variance n lambda^2 equals
// 2 D t and the Green's function is (4 pi D t)^(-1/2) exp(-x^2 / (4 D t)).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "pathlab/core/error.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/core/rng.hpp"

namespace pathlab {

struct WalkSpec {
    double lambda = 1.0;
    double eps = 1.0;
    std::size_t n_steps = 1;

    double diffusion_constant() const { return lambda * lambda / (2.0 * eps); }
    double duration() const { return eps * static_cast<double>(n_steps); }
    void validate() const {
        require(lambda > 0.0 && eps > 0.0, "walk needs positive step length and time");
        require(n_steps >= 1, "walk needs at least one step");
    }
};

/// Endpoint counts of a lattice walk, indexed by right-step count r = (n + l)/2.
struct WalkHistogram {
    std::size_t n_steps = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    static int offset_of(std::size_t n, std::size_t r) { return 2 * static_cast<int>(r) - static_cast<int>(n); }
    int offset(std::size_t r) const { return offset_of(n_steps, r); }
    double fraction(std::size_t r) const { return static_cast<double>(counts[r]) / static_cast<double>(total); }
};

inline bool walk_reachable(std::size_t n, long l) {
    const long nn = static_cast<long>(n);
    return std::labs(l) <= nn && ((nn + l) % 2 == 0);
}

/// Number of +-1 step sequences of length n ending at l (exact below 2^53).
inline double binomial_count(std::size_t n, long l) {
    if (!walk_reachable(n, l)) return 0.0;
    const auto r = static_cast<unsigned>((static_cast<long>(n) + l) / 2);
    return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), r);
}

/// C(n, (n+l)/2) 2^-n, or 0 for unreachable offsets.
inline double walk_probability_exact(std::size_t n, long l) {
    if (!walk_reachable(n, l)) return 0.0;
    if (n <= 1000) return std::ldexp(binomial_count(n, l), -static_cast<int>(n));
    const boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
    return boost::math::pdf(dist, static_cast<double>((static_cast<long>(n) + l) / 2));
}

/// Brute-force count over all 2^n step sequences.
inline std::uint64_t enumerate_paths(std::size_t n, long l) {
    require(n <= 20, "enumeration too large");
    std::uint64_t hits = 0;
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t path = 0; path < limit; ++path) {
        long pos = 0;
        for (std::size_t s = 0; s < n; ++s) pos += ((path >> s) & 1u) ? 1 : -1;
        hits += pos == l;
    }
    return hits;
}

/// Lattice Gaussian 2 exp(-l^2/2n)/sqrt(2 pi n) on reachable offsets.
inline double stirling_density(std::size_t n, long l) {
    require(n >= 10, "Stirling form needs n >= 10");
    if (!walk_reachable(n, l)) return 0.0;
    const double nn = static_cast<double>(n), ll = static_cast<double>(l);
    return 2.0 * std::exp(-ll * ll / (2.0 * nn)) / std::sqrt(2.0 * pi * nn);
}

/// Diffusion Green's function (4 pi D t)^(-1/2) exp(-x^2/(4 D t)).
inline double gaussian_green(double x, double t, double D) {
    require(t > 0.0, "diffusion time must be positive");
    require(D > 0.0, "diffusion constant must be positive");
    return std::exp(-x * x / (4.0 * D * t)) / std::sqrt(4.0 * pi * D * t);
}

/// Cumulative distribution of gaussian_green in x.
inline double gaussian_green_cdf(double x, double t, double D) {
    require(t > 0.0 && D > 0.0, "diffusion time and constant must be positive");
    return 0.5 * std::erfc(-x / std::sqrt(4.0 * D * t));
}

namespace detail {
inline constexpr std::size_t mc_chunks = 256;
}

/// Samples `walkers` independent walks; walker w draws from substream w.
/// Each random bit is one fair step.
inline WalkHistogram mc_walk_sample(const WalkSpec& spec, std::uint64_t walkers, const RngStream& rng,
                                    unsigned threads = 1) {
    spec.validate();
    require(walkers >= 1, "need at least one walker");
    const std::size_t n = spec.n_steps;
    std::vector<std::vector<std::uint64_t>> partial(detail::mc_chunks, std::vector<std::uint64_t>(n + 1, 0));
    parallel_chunks(walkers, detail::mc_chunks, threads, [&](std::size_t b, std::size_t e, std::size_t c) {
        auto& hist = partial[c];
        for (std::size_t w = b; w < e; ++w) {
            auto s = rng.substream(w);
            std::size_t right = 0, left_to_draw = n;
            while (left_to_draw > 0) {
                std::uint32_t bits = s.next_u32();
                if (left_to_draw < 32) bits &= (1u << left_to_draw) - 1u;
                right += static_cast<std::size_t>(std::popcount(bits));
                left_to_draw -= std::min<std::size_t>(left_to_draw, 32);
            }
            ++hist[right];
        }
    });
    WalkHistogram h{n, std::vector<std::uint64_t>(n + 1, 0), walkers};
    for (const auto& p : partial)
        for (std::size_t r = 0; r <= n; ++r) h.counts[r] += p[r];
    return h;
}

/// max_l |F_empirical(l) - F_exact(l)| over the lattice.
inline double ks_distance_to_exact(const WalkHistogram& h) {
    double emp = 0.0, exact = 0.0, worst = 0.0;
    for (std::size_t r = 0; r <= h.n_steps; ++r) {
        emp += h.fraction(r);
        exact += walk_probability_exact(h.n_steps, h.offset(r));
        worst = std::max(worst, std::abs(emp - exact));
    }
    return worst;
}

/// Endpoints of walks with independent N(0, 2 D eps) increments, in walker order.
struct ContinuousWalkSample {
    std::size_t n_steps = 0;
    double eps = 0.0;
    double D = 0.0;
    std::vector<double> endpoints;

    double duration() const { return eps * static_cast<double>(n_steps); }
};

inline ContinuousWalkSample gaussian_step_path_mc(std::size_t n, double eps, double D, std::uint64_t walkers,
                                                  const RngStream& rng, unsigned threads = 1) {
    require(n >= 1 && eps > 0.0 && D > 0.0, "need n >= 1, eps > 0, D > 0");
    require(walkers >= 1, "need at least one walker");
    ContinuousWalkSample out{n, eps, D, std::vector<double>(walkers)};
    const double step_sd = std::sqrt(2.0 * D * eps);
    parallel_chunks(walkers, detail::mc_chunks, threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t w = b; w < e; ++w) {
            auto s = rng.substream(w);
            double x = 0.0;
            for (std::size_t k = 0; k < n; ++k) x += step_sd * s.normal();
            out.endpoints[w] = x;
        }
    });
    return out;
}

/// Kolmogorov-Smirnov distance between the sample and gaussian_green at t = n eps.
inline double ks_distance_to_green(const ContinuousWalkSample& sample) {
    std::vector<double> xs = sample.endpoints;
    std::sort(xs.begin(), xs.end());
    const double m = static_cast<double>(xs.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = gaussian_green_cdf(xs[i], sample.duration(), sample.D);
        worst = std::max({worst, std::abs(f - static_cast<double>(i) / m), std::abs(static_cast<double>(i + 1) / m - f)});
    }
    return worst;
}

/// Histogram of continuous endpoints over [lo, hi) with `bins` equal bins.
struct BinnedSample {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * width(); }
};

inline BinnedSample bin_samples(const std::vector<double>& xs, double lo, double hi, std::size_t bins) {
    require(hi > lo && bins >= 1, "bad binning");
    BinnedSample out{lo, hi, std::vector<std::uint64_t>(bins, 0), xs.size()};
    for (double x : xs) {
        if (x < lo || x >= hi) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / out.width()));
        ++out.counts[b];
    }
    return out;
}

/// Largest |P(n,l)/(2 lambda) - G(l lambda, n eps, D)| / G over reachable |l| <= 3 sqrt(n).
inline double lattice_continuum_error(const WalkSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_steps;
    const long lmax = static_cast<long>(std::floor(3.0 * std::sqrt(static_cast<double>(n))));
    double worst = 0.0;
    for (long l = -lmax; l <= lmax; ++l) {
        if (!walk_reachable(n, l)) continue;
        const double lattice = walk_probability_exact(n, l) / (2.0 * spec.lambda);
        const double green = gaussian_green(static_cast<double>(l) * spec.lambda, spec.duration(), spec.diffusion_constant());
        worst = std::max(worst, std::abs(lattice - green) / green);
    }
    return worst;
}

} // namespace pathlab
