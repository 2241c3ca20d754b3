#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "pathlab/core/grid.hpp"
#include "pathlab/diffusion/walk.hpp"

using namespace pathlab;

namespace {

// Pascal's triangle in integers, independent of the library's binomials.
std::uint64_t pascal(std::size_t n, std::size_t k) {
    std::vector<std::uint64_t> row{1};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next(row.size() + 1, 0);
        for (std::size_t j = 0; j < row.size(); ++j) {
            next[j] += row[j];
            next[j + 1] += row[j];
        }
        row = std::move(next);
    }
    return k < row.size() ? row[k] : 0;
}

} // namespace

TEST(WalkExact, SpecExamples) {
    EXPECT_DOUBLE_EQ(walk_probability_exact(1, 1), 0.5);
    EXPECT_DOUBLE_EQ(walk_probability_exact(2, 0), 0.5);
    EXPECT_DOUBLE_EQ(walk_probability_exact(4, 2), 0.25);
    EXPECT_EQ(walk_probability_exact(4, 1), 0.0);
    EXPECT_EQ(walk_probability_exact(4, 6), 0.0);
}

TEST(WalkExact, SumsToOne) {
    for (std::size_t n : {1, 7, 100, 400, 1500}) {
        double s = 0.0;
        for (long l = -static_cast<long>(n); l <= static_cast<long>(n); ++l) s += walk_probability_exact(n, l);
        EXPECT_NEAR(s, 1.0, 1e-12) << n;
    }
}

TEST(Enumerate, SpecExamples) {
    EXPECT_EQ(enumerate_paths(2, 0), 2u);
    EXPECT_EQ(enumerate_paths(3, 3), 1u);
    EXPECT_EQ(enumerate_paths(12, 0), 924u);
    EXPECT_THROW(enumerate_paths(21, 1), Error);
}

TEST(Enumerate, MatchesBinomialExactlyUpTo20) {
    for (std::size_t n = 1; n <= 20; ++n)
        for (long l = -static_cast<long>(n); l <= static_cast<long>(n); ++l) {
            const std::uint64_t count = enumerate_paths(n, l);
            EXPECT_EQ(static_cast<double>(count), std::ldexp(walk_probability_exact(n, l), static_cast<int>(n)));
            if (walk_reachable(n, l)) {
                EXPECT_EQ(count, pascal(n, static_cast<std::size_t>((static_cast<long>(n) + l) / 2)));
            }
        }
}

TEST(Enumerate, MarkovConcatenation) {
    // (n1 + n2)-step counts are the convolution of n1- and n2-step counts.
    for (std::size_t n1 : {3, 5, 8})
        for (std::size_t n2 : {2, 7, 12}) {
            if (n1 + n2 > 20) continue;
            const long n = static_cast<long>(n1 + n2);
            for (long l = -n; l <= n; ++l) {
                std::uint64_t conv = 0;
                for (long a = -static_cast<long>(n1); a <= static_cast<long>(n1); ++a)
                    if (std::labs(l - a) <= static_cast<long>(n2)) conv += enumerate_paths(n1, a) * enumerate_paths(n2, l - a);
                EXPECT_EQ(conv, enumerate_paths(n1 + n2, l));
            }
        }
}

TEST(Stirling, SpecExamples) {
    EXPECT_NEAR(stirling_density(100, 0), 2.0 / std::sqrt(200.0 * pi), 1e-15);
    EXPECT_NEAR(stirling_density(100, 0), 0.07979, 1e-5);
    EXPECT_NEAR(walk_probability_exact(100, 0), 0.07959, 1e-5);
    EXPECT_NEAR(stirling_density(100, 0) / walk_probability_exact(100, 0), 1.0, 3e-3);
    EXPECT_NEAR(walk_probability_exact(100, 10) / stirling_density(100, 10), 1.0, 1e-2);
    EXPECT_EQ(stirling_density(100, -12), stirling_density(100, 12));
    EXPECT_EQ(stirling_density(100, 11), 0.0);
}

TEST(Green, Normalized) {
    const double D = 0.7, t = 1.3, w = std::sqrt(D * t);
    const Grid1D g(-20.0 * w, 20.0 * w, 4001);
    auto rho = ComplexField::sample(g, [&](double x) { return gaussian_green(x, t, D); });
    EXPECT_NEAR(integrate(rho).real(), 1.0, 1e-10);
    auto x2 = ComplexField::sample(g, [&](double x) { return x * x * gaussian_green(x, t, D); });
    EXPECT_NEAR(integrate(x2).real(), 2.0 * D * t, 1e-8);
}

TEST(Green, SolvesDiffusionEquation) {
    const double D = 0.5, t = 1.0, h = 1e-3, k = 1e-4;
    double num = 0.0, den = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.1) {
        const double dt = (gaussian_green(x, t + k, D) - gaussian_green(x, t - k, D)) / (2.0 * k);
        const double dxx = (gaussian_green(x + h, t, D) - 2.0 * gaussian_green(x, t, D) + gaussian_green(x - h, t, D)) / (h * h);
        num += std::pow(dt - D * dxx, 2);
        den += std::pow(dt, 2);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-4);
    EXPECT_THROW(gaussian_green(0.0, 0.0, 1.0), Error);
}

TEST(LatticeContinuum, WithinTwoPercentAt400) {
    EXPECT_LT(lattice_continuum_error({0.1, 0.01, 400}), 0.02);
}

TEST(MonteCarlo, SingleStepFraction) {
    const auto h = mc_walk_sample({1.0, 1.0, 1}, 1'000'000, rng_stream(1));
    EXPECT_NEAR(h.fraction(1), 0.5, 0.002);
}

TEST(MonteCarlo, HundredStepKs) {
    const auto h = mc_walk_sample({1.0, 1.0, 100}, 1'000'000, rng_stream(2), 4);
    EXPECT_LT(ks_distance_to_exact(h), 0.005);
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
    const WalkSpec spec{1.0, 1.0, 37};
    const auto a = mc_walk_sample(spec, 50'000, rng_stream(9), 1);
    const auto b = mc_walk_sample(spec, 50'000, rng_stream(9), 1);
    const auto c = mc_walk_sample(spec, 50'000, rng_stream(9), 7);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.counts, c.counts);
}

TEST(GaussianSteps, SingleStepVariance) {
    const auto s = gaussian_step_path_mc(1, 0.01, 2.0, 1'000'000, rng_stream(3), 4);
    double m2 = 0.0;
    for (double x : s.endpoints) m2 += x * x;
    EXPECT_NEAR(m2 / s.endpoints.size() / (2.0 * 2.0 * 0.01), 1.0, 5e-3);
}

TEST(GaussianSteps, HundredStepKs) {
    const auto s = gaussian_step_path_mc(100, 0.01, 0.5, 1'000'000, rng_stream(4), 8);
    EXPECT_LT(ks_distance_to_green(s), 0.005);
}

TEST(GaussianSteps, VanishingDiffusion) {
    const auto s = gaussian_step_path_mc(50, 0.1, 1e-12, 10'000, rng_stream(5));
    for (double x : s.endpoints) EXPECT_LT(std::abs(x), 1e-4);
}

TEST(GaussianSteps, DeterministicAcrossThreads) {
    const auto a = gaussian_step_path_mc(20, 0.1, 1.0, 20'000, rng_stream(6), 1);
    const auto b = gaussian_step_path_mc(20, 0.1, 1.0, 20'000, rng_stream(6), 5);
    EXPECT_EQ(a.endpoints, b.endpoints);
}
