#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pathlab/core/convolve.hpp"
#include "pathlab/core/fft.hpp"
#include "pathlab/core/grid.hpp"

using namespace pathlab;

TEST(Grid, SpacingIncludesBothEnds) {
    Grid1D g(-1.0, 1.0, 21);
    EXPECT_DOUBLE_EQ(g.dx(), 0.1);
    EXPECT_DOUBLE_EQ(g.x(0), -1.0);
    EXPECT_NEAR(g.x(20), 1.0, 1e-15);
    EXPECT_EQ(g.nearest(0.04), 10u);
    EXPECT_TRUE(g.on_node(0.3));
    EXPECT_FALSE(g.on_node(0.35));
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(Grid1D(1.0, 0.0, 16), Error);
    EXPECT_THROW(Grid1D(0.0, 1.0, 7), Error);
}

TEST(Integrate, ConstantIsExact) {
    Grid1D g(0.0, 1.0, 101);
    auto f = ComplexField::sample(g, [](double) { return 1.0; });
    EXPECT_NEAR(integrate(f).real(), 1.0, 1e-15);
}

TEST(Integrate, SineOverHalfPeriod) {
    Grid1D g(0.0, pi, 201);
    auto f = ComplexField::sample(g, [](double x) { return std::sin(x); });
    // -cos(pi) + cos(0)
    EXPECT_NEAR(integrate(f).real(), 2.0, 1e-8);
}

TEST(Integrate, GaussianIntegral) {
    Grid1D g(-8.0, 8.0, 401);
    auto f = ComplexField::sample(g, [](double x) { return std::exp(-x * x); });
    EXPECT_NEAR(integrate(f).real(), std::sqrt(pi), 1e-10);
}

TEST(Integrate, OddIntervalCountUsesThreeEighthsClosure) {
    // 100 points -> 99 intervals; cubic integrands are integrated exactly.
    Grid1D g(0.0, 2.0, 100);
    auto f = ComplexField::sample(g, [](double x) { return x * x * x - x; });
    EXPECT_NEAR(integrate(f).real(), 4.0 - 2.0, 1e-12);
}

TEST(Integrate, IsLinear) {
    Grid1D g(-3.0, 3.0, 257);
    auto f = ComplexField::sample(g, [](double x) { return std::cos(2.0 * x) * std::exp(-x * x); });
    auto h = ComplexField::sample(g, [](double x) { return cplx(x * x, std::sin(x)); });
    const cplx a(0.7, -1.3), b(-2.1, 0.4);
    ComplexField mix(g);
    for (std::size_t i = 0; i < g.size(); ++i) mix[i] = a * f[i] + b * h[i];
    const cplx lhs = integrate(mix), rhs = a * integrate(f) + b * integrate(h);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
}

TEST(Integrate, RejectsNonFinite) {
    Grid1D g(0.0, 1.0, 16);
    ComplexField f(g);
    f[3] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(integrate(f), Error);
}

TEST(Fft, RoundTripAndKnownTransform) {
    const std::size_t n = 16;
    FftPlan plan(n);
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = std::polar(1.0, 2.0 * pi * 3.0 * j / n);
    auto w = v;
    plan.forward(w);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(w[k]), k == 3 ? 16.0 : 0.0, 1e-12);
    plan.backward(w);
    for (std::size_t j = 0; j < n; ++j) EXPECT_LT(std::abs(w[j] / double(n) - v[j]), 1e-14);
}

TEST(Fft, LinearConvolutionMatchesDirectSum) {
    std::vector<cplx> a{{1, 0}, {2, -1}, {0, 3}};
    std::vector<cplx> b{{0.5, 0}, {-1, 1}, {2, 0}, {0, -1}};
    auto c = linear_convolution(a, b);
    ASSERT_EQ(c.size(), 6u);
    for (std::size_t m = 0; m < c.size(); ++m) {
        cplx want{};
        for (std::size_t j = 0; j < a.size(); ++j)
            if (m >= j && m - j < b.size()) want += a[j] * b[m - j];
        EXPECT_LT(std::abs(c[m] - want), 1e-13);
    }
}

namespace {
Grid1D centred_grid(double half, std::size_t n) { return Grid1D(-half, half, n); }
} // namespace

TEST(Convolve, DeltaIsIdentity) {
    auto g = centred_grid(10.0, 401);
    auto b = ComplexField::sample(g, [](double x) { return cplx(std::exp(-x * x), x * std::exp(-x * x / 4.0)); });
    const double shift = 1.5;
    auto out = convolve(discrete_delta(g, shift), b);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i) - shift;
        if (x < g.x_min()) continue;
        err = std::max(err, std::abs(out[i] - b[g.nearest(x)]));
    }
    EXPECT_LT(err, 1e-12);
}

TEST(Convolve, GaussiansAddVariances) {
    auto g = centred_grid(15.0, 601);
    auto unit = [](double var) {
        return [var](double x) { return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * pi * var); };
    };
    auto a = ComplexField::sample(g, unit(1.0));
    auto out = convolve(a, a);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(out[i] - unit(2.0)(g.x(i))));
    EXPECT_LT(err, 1e-8);
}

TEST(Convolve, BoxesMakeTriangle) {
    auto g = centred_grid(4.0, 801);
    auto box = ComplexField::sample(g, [](double x) { return std::abs(x) <= 0.5 ? 1.0 : 0.0; });
    auto out = convolve(box, box);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(out[i] - std::max(0.0, 1.0 - std::abs(g.x(i)))));
    EXPECT_LT(err, 2.0 * g.dx());
}

TEST(Convolve, CommutativeAndAssociative) {
    // Supports fit three times over, so no truncation enters.
    auto g = centred_grid(24.0, 769);
    auto a = ComplexField::sample(g, [](double x) { return cplx(std::exp(-(x - 1) * (x - 1)), 0.3 * std::exp(-x * x)); });
    auto b = ComplexField::sample(g, [](double x) { return std::exp(-2.0 * (x + 0.5) * (x + 0.5)) * std::cos(x); });
    auto c = ComplexField::sample(g, [](double x) { return cplx(0.0, std::exp(-x * x / 3.0)); });
    auto ab = convolve(a, b), ba = convolve(b, a);
    EXPECT_LT(relative_l2_error(ab.values, ba.values, 0, g.size()), 1e-10);
    auto left = convolve(ab, c), right = convolve(a, convolve(b, c));
    EXPECT_LT(relative_l2_error(left.values, right.values, 0, g.size()), 1e-10);
}

TEST(Convolve, RejectsMismatchedOrMisalignedGrids) {
    auto g1 = centred_grid(5.0, 101);
    auto g2 = centred_grid(5.0, 103);
    EXPECT_THROW(convolve(ComplexField(g1), ComplexField(g2)), Error);
    Grid1D skew(-5.05, 5.0, 101);
    EXPECT_THROW(convolve(ComplexField(skew), ComplexField(skew)), Error);
}

TEST(Convolve, DisplacementKernelMatchesConvolveOnAlignedGrid) {
    auto g = centred_grid(6.0, 241);
    auto f = ComplexField::sample(g, [](double x) { return std::exp(-x * x); });
    auto kern_fn = [](double u) { return cplx(std::exp(-u * u / 2.0), u); };
    auto k = DisplacementKernel::sample(g, kern_fn);
    auto direct = apply_kernel(k, f);
    auto via = convolve(f, ComplexField::sample(g, kern_fn));
    // convolve only sees kernel samples inside the grid, so compare where both agree.
    for (std::size_t i = 100; i < 141; ++i) EXPECT_LT(std::abs(direct[i] - via[i]), 1e-9);
}
