#include <gtest/gtest.h>

#include <cmath>

#include "pathlab/feynman/propagator.hpp"
#include "pathlab/schrodinger/split_step.hpp"

using namespace pathlab;
namespace pot = pathlab::potential;

namespace {

const Grid1D wide(-20.0, 20.0, 1024);

SourceOptions lattice_delta() {
    SourceOptions s;
    s.model = SourceModel::lattice_delta;
    return s;
}

// Free kernel written out independently of the library.
cplx free_oracle(double u, double t) {
    const cplx i(0.0, 1.0);
    return std::sqrt(1.0 / (2.0 * pi * i * t)) * std::exp(i * u * u / (2.0 * t));
}

} // namespace

TEST(ShortTimeKernel, ZeroActionGivesPrefactor) {
    const cplx k = short_time_kernel(0.3, 0.3, 0.1, pot::Free{});
    EXPECT_NEAR(std::abs(k), std::sqrt(1.0 / (2.0 * pi * 0.1)), 1e-12);
    EXPECT_NEAR(std::arg(k), -pi / 4.0, 1e-12);
    EXPECT_NEAR(std::abs(k), 1.2616, 1e-4);
}

TEST(ShortTimeKernel, PhaseReachesPiAtFirstFresnelZone) {
    const double eps = 0.1;
    const double u = std::sqrt(2.0 * eps * pi);
    const cplx ratio = short_time_kernel(0.0, u, eps, pot::Free{}) / short_time_kernel(0.0, 0.0, eps, pot::Free{});
    EXPECT_NEAR(std::abs(std::arg(ratio)), pi, 1e-12);
}

TEST(ShortTimeKernel, HarmonicAtOriginEqualsFree) {
    EXPECT_EQ(short_time_kernel(0.0, 0.0, 0.1, pot::Harmonic{1.0}), short_time_kernel(0.0, 0.0, 0.1, pot::Free{}));
}

TEST(ShortTimeKernel, SymmetricPotentialSplit) {
    const double eps = 0.05;
    const cplx with = short_time_kernel(1.0, 2.0, eps, pot::Harmonic{1.0});
    const cplx without = short_time_kernel(1.0, 2.0, eps, pot::Free{});
    EXPECT_NEAR(std::arg(with / without), -eps * 0.5 * (0.5 + 2.0), 1e-12);
}

TEST(AnalyticKernel, FreeMatchesOracle) {
    for (double x : {-3.0, 0.0, 1.7}) EXPECT_LT(std::abs(analytic_kernel(pot::Free{}, 0.5, x, 0.8) - free_oracle(x - 0.5, 0.8)), 1e-14);
}

TEST(AnalyticKernel, MehlerQuarterPeriodModulus) {
    for (double x : {-4.0, 0.0, 2.5})
        EXPECT_NEAR(std::abs(analytic_kernel(pot::Harmonic{1.0}, 0.0, x, pi / 2.0)), std::sqrt(1.0 / (2.0 * pi)), 1e-12);
}

TEST(AnalyticKernel, LinearReducesToFree) {
    EXPECT_LT(std::abs(analytic_kernel(pot::Linear{0.0}, 0.2, 1.1, 0.7) - analytic_kernel(pot::Free{}, 0.2, 1.1, 0.7)), 1e-15);
}

TEST(AnalyticKernel, LinearSatisfiesSchrodinger) {
    // i dA/dt = -A''/2 - f x A, checked by finite differences of the closed form.
    const double f = 0.8, x0 = 0.3, x = 1.2, t = 0.9, h = 1e-4;
    auto a = [&](double xx, double tt) { return analytic_kernel(pot::Linear{f}, x0, xx, tt); };
    const cplx dt = (a(x, t + h) - a(x, t - h)) / (2.0 * h);
    const cplx dxx = (a(x + h, t) - 2.0 * a(x, t) + a(x - h, t)) / (h * h);
    const cplx lhs = cplx(0, 1) * dt, rhs = -0.5 * dxx - f * x * a(x, t);
    EXPECT_LT(std::abs(lhs - rhs), 1e-5 * std::abs(rhs));
}

TEST(AnalyticKernel, CausticIsAnError) {
    EXPECT_THROW(analytic_kernel(pot::Harmonic{1.0}, 0.0, 1.0, pi), Error);
    EXPECT_THROW(analytic_kernel(pot::Quartic{1.0}, 0.0, 1.0, 1.0), Error);
}

TEST(SliceKernel, MatchesShortTimeKernelWellInsidePassband) {
    // One slice from a lattice delta: stationary wavenumbers |x|/eps <= 10 sit far below the passband.
    const TimeSlicing one{1.0, 1};
    const auto out = apply_slices(discrete_delta(wide, wide.x(512)), pot::Free{}, one);
    double worst = 0.0;
    for (std::size_t i = 0; i < wide.size(); ++i) {
        const double u = wide.x(i) - wide.x(512);
        if (std::abs(u) > 10.0) continue;
        worst = std::max(worst, std::abs(out[i] - short_time_kernel(wide.x(512), wide.x(i), 1.0, pot::Free{})));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(ComposePropagator, FreeConvergesToAnalytic) {
    const auto k = compose_propagator(pot::Free{}, 0.0, {1.0, 64}, wide);
    EXPECT_LT(kernel_error_vs_analytic(k, pot::Free{}), 1e-3);
}

TEST(ComposePropagator, HarmonicMatchesMehler) {
    const auto k = compose_propagator(pot::Harmonic{1.0}, 0.0, {1.0, 128}, wide);
    EXPECT_LT(kernel_error_vs_analytic(k, pot::Harmonic{1.0}), 1e-2);
}

TEST(ComposePropagator, LinearMatchesClosedForm) {
    const auto k = compose_propagator(pot::Linear{0.5}, 0.0, {1.0, 128}, wide);
    EXPECT_LT(kernel_error_vs_analytic(k, pot::Linear{0.5}), 1e-2);
}

TEST(ComposePropagator, HarmonicConvergesAtLeastLinearly) {
    double prev = 0.0;
    for (std::size_t n : {16, 32, 64, 128}) {
        const double err = kernel_error_vs_analytic(compose_propagator(pot::Harmonic{1.0}, 0.0, {1.0, n}, wide), pot::Harmonic{1.0});
        if (prev > 0.0) {
            const double order = std::log2(prev / err);
            EXPECT_GE(order, 1.0) << "n=" << n;
            RecordProperty("order_n" + std::to_string(n), std::to_string(order));
        }
        prev = err;
    }
}

TEST(ComposePropagator, DroppedEndpointPotentialIsFirstOrder) {
    SliceOptions opt;
    opt.drop_endpoint_potential = true;
    const double e64 = kernel_error_vs_analytic(compose_propagator(pot::Harmonic{1.0}, 0.0, {1.0, 64}, wide, {}, opt), pot::Harmonic{1.0});
    const double e128 = kernel_error_vs_analytic(compose_propagator(pot::Harmonic{1.0}, 0.0, {1.0, 128}, wide, {}, opt), pot::Harmonic{1.0});
    EXPECT_NEAR(std::log2(e64 / e128), 1.0, 0.15);
}

TEST(ComposePropagator, MidpointRuleConverges) {
    SliceOptions opt;
    opt.rule = PotentialRule::midpoint;
    const double e32 = kernel_error_vs_analytic(compose_propagator(pot::Harmonic{1.0}, 0.0, {1.0, 32}, wide, {}, opt), pot::Harmonic{1.0});
    const double e128 = kernel_error_vs_analytic(compose_propagator(pot::Harmonic{1.0}, 0.0, {1.0, 128}, wide, {}, opt), pot::Harmonic{1.0});
    EXPECT_LT(e128, e32 / 3.0);
    EXPECT_LT(e128, 1e-2);
}

TEST(ComposePropagator, MidpointEqualsEndpointForFree) {
    SliceOptions mid;
    mid.rule = PotentialRule::midpoint;
    const auto a = compose_propagator(pot::Free{}, 0.0, {1.0, 8}, wide);
    const auto b = compose_propagator(pot::Free{}, 0.0, {1.0, 8}, wide, {}, mid);
    EXPECT_LT(relative_l2_error(a.field.values, b.field.values, 0, wide.size()), 1e-10);
}

TEST(ComposePropagator, GridTooSmallIsDetected) {
    // A lattice delta carries the full passband, which outruns a 40-wide box in t = 1.
    EXPECT_THROW(compose_propagator(pot::Free{}, wide.x(512), {1.0, 16}, wide, {}, {}, lattice_delta()), Error);
}

TEST(ComposePropagator, ChapmanKolmogorov) {
    for (const PotentialSpec& spec : {PotentialSpec{pot::Free{}}, PotentialSpec{pot::Harmonic{1.0}}}) {
        const auto one_leg = compose_propagator(spec, 0.0, {1.0, 128}, wide);
        // Legs of unequal duration, 64 slices each: distinct slice widths.
        // Same source as the one-leg kernel.
        const auto first = compose_propagator(spec, 0.0, {0.4, 64}, wide, {}, {}, one_leg.source_options);
        const auto two_leg = apply_slices(first.field, spec, {0.6, 64});
        const auto [lo, hi] = resolved_range(one_leg, spec);
        EXPECT_LT(relative_l2_error(two_leg.values, one_leg.field.values, lo, hi), 1e-3) << potential_name(spec);
    }
}

TEST(SchrodingerResidual, AnalyticFreeKernelFloor) {
    const Grid1D fine(-6.0, 6.0, 1201);
    const double t = 1.0, dt = 1e-3;
    const auto a = analytic_kernel_field(pot::Free{}, 0.0, t - dt, fine);
    const auto b = analytic_kernel_field(pot::Free{}, 0.0, t, fine);
    const auto c = analytic_kernel_field(pot::Free{}, 0.0, t + dt, fine);
    EXPECT_LT(schrodinger_residual(a, b, c, dt, pot::Free{}, {}, fine.nearest(-2.0), fine.nearest(2.0)), 1e-4);
}

TEST(SchrodingerResidual, ComposedKernels) {
    for (const PotentialSpec& spec : {PotentialSpec{pot::Free{}}, PotentialSpec{pot::Harmonic{1.0}}}) {
        const auto k = compose_propagator(spec, 0.0, {1.0, 128}, wide);
        EXPECT_LT(check_schrodinger_residual(k, spec), 1e-2) << potential_name(spec);
    }
}

TEST(EvolveWavefunction, DeltaSiftsOutKernel) {
    // Unnormalized input goes through apply_slices; evolve_wavefunction needs unit norm.
    const auto delta = discrete_delta(wide, wide.x(500));
    const auto a = apply_slices(delta, pot::Harmonic{0.5}, {0.05, 4});
    const auto k = compose_propagator(pot::Harmonic{0.5}, wide.x(500), {0.05, 4}, wide, {}, {}, lattice_delta());
    EXPECT_EQ(a.values, k.field.values);
}

TEST(EvolveWavefunction, FreeGaussianSpreads) {
    const auto psi0 = gaussian_packet(wide, 0.0, 1.0, 0.0);
    const auto psi = evolve_wavefunction(psi0, pot::Free{}, {1.0, 64});
    ComplexField x2(wide);
    for (std::size_t i = 0; i < wide.size(); ++i) x2[i] = wide.x(i) * wide.x(i) * std::norm(psi[i]);
    EXPECT_NEAR(integrate(x2).real(), 1.25, 1e-3);
}

TEST(EvolveWavefunction, HarmonicCoherentStateRevives) {
    const Grid1D g(-12.0, 12.0, 512);
    const auto psi0 = ComplexField::sample(g, [](double x) { return std::exp(-(x - 1.0) * (x - 1.0) / 2.0) / std::pow(pi, 0.25); });
    const auto psi = evolve_wavefunction(psi0, pot::Harmonic{1.0}, {2.0 * pi, 1024});
    EXPECT_GT(fidelity(psi0, psi), 0.999);
}

TEST(EvolveWavefunction, NormPreservedForCatalog) {
    const Grid1D g(-20.0, 20.0, 512);
    const std::vector<std::pair<PotentialSpec, double>> cases{
        {pot::Free{}, 0.0},          {pot::Linear{1.0}, 0.0},          {pot::Harmonic{1.0}, 1.0},
        {pot::Quartic{0.1}, 0.0},    {pot::GaussianWell{-1.0, 1.0}, -3.0}, {pot::Yukawa{0.5, 1.0}, -6.0},
        {pot::SquareBarrier{1.0, 1.0}, -4.0}};
    for (const auto& [spec, x0] : cases) {
        const auto psi = evolve_wavefunction(gaussian_packet(g, x0, 1.0, 1.0), spec, {1.0, 128});
        EXPECT_NEAR(probability(psi), 1.0, 1e-3) << potential_name(spec);
    }
}

TEST(EvolveWavefunction, RejectsUnnormalizedInput) {
    auto psi0 = gaussian_packet(wide, 0.0, 1.0, 0.0);
    for (auto& v : psi0.values) v *= 1.01;
    EXPECT_THROW(evolve_wavefunction(psi0, pot::Free{}, {1.0, 8}), Error);
}
