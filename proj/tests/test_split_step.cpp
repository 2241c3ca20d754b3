#include <gtest/gtest.h>

#include <cmath>

#include "pathlab/schrodinger/split_step.hpp"

using namespace pathlab;
namespace pot = pathlab::potential;

namespace {

double variance(const ComplexField& psi) {
    ComplexField m1(psi.grid), m2(psi.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = psi.grid.x(i), p = std::norm(psi[i]);
        m1[i] = x * p;
        m2[i] = x * x * p;
    }
    const double mean = integrate(m1).real();
    return integrate(m2).real() - mean * mean;
}

} // namespace

TEST(SplitStep, PreservesNorm) {
    const Grid1D g(-20.0, 20.0, 512);
    const auto psi0 = gaussian_packet(g, -2.0, 1.0, 1.5);
    for (const PotentialSpec& spec : {PotentialSpec{pot::Quartic{0.3}}, PotentialSpec{pot::SquareBarrier{2.0, 1.0}},
                                      PotentialSpec{pot::GaussianWell{-3.0, 0.5}}}) {
        const auto psi = split_step_evolve(psi0, {g, 1e-3, 1000, spec, {}});
        EXPECT_NEAR(discrete_norm(psi), discrete_norm(psi0), 1e-10 * discrete_norm(psi0));
        EXPECT_NEAR(probability(psi), 1.0, 1e-8);
    }
}

TEST(SplitStep, FreeGaussianWidth) {
    const Grid1D g(-30.0, 30.0, 1024);
    const auto psi = split_step_evolve(gaussian_packet(g, 0.0, 1.0, 0.0), {g, 1e-3, 1000, pot::Free{}, {}});
    // sigma(t)^2 = sigma0^2 + (hbar t / (2 m sigma0))^2
    EXPECT_NEAR(variance(psi), 1.25, 1e-6);
}

TEST(SplitStep, FreeGaussianWidthWithUnits) {
    const Grid1D g(-30.0, 30.0, 1024);
    const PhysicalParams p{2.0, 0.5};
    const auto psi = split_step_evolve(gaussian_packet(g, 0.0, 1.0, 0.0), {g, 1e-3, 1000, pot::Free{}, p});
    EXPECT_NEAR(variance(psi), 1.0 + std::pow(0.5 / 4.0, 2), 1e-6);
}

TEST(SplitStep, HarmonicGroundStateIsStationary) {
    const Grid1D g(-10.0, 10.0, 256);
    const auto psi0 = ComplexField::sample(g, [](double x) { return std::exp(-x * x / 2.0) / std::pow(pi, 0.25); });
    const std::size_t steps = 6283;
    const auto psi = split_step_evolve(psi0, {g, 2.0 * pi / steps, steps, pot::Harmonic{1.0}, {}});
    EXPECT_GT(fidelity(psi0, psi), 1.0 - 1e-8);
}

TEST(SplitStep, HarmonicEnergyDrift) {
    const Grid1D g(-12.0, 12.0, 512);
    const auto psi0 = gaussian_packet(g, 1.5, 0.8, 0.5);
    const double e0 = energy(psi0, pot::Harmonic{1.0});
    const auto psi = split_step_evolve(psi0, {g, 1e-3, 1000, pot::Harmonic{1.0}, {}});
    EXPECT_LT(std::abs(energy(psi, pot::Harmonic{1.0}) - e0), 1e-6 * std::abs(e0));
}

TEST(SplitStep, SecondOrderInTimeStep) {
    const Grid1D g(-15.0, 15.0, 512);
    const auto psi0 = gaussian_packet(g, -1.0, 1.0, 1.0);
    const PotentialSpec spec = pot::Quartic{0.2};
    auto run = [&](std::size_t steps) { return split_step_evolve(psi0, {g, 1.0 / steps, steps, spec, {}}); };
    const auto a = run(100), b = run(200), c = run(400);
    // Richardson reference from the two finest runs.
    ComplexField ref(g);
    for (std::size_t i = 0; i < g.size(); ++i) ref[i] = (4.0 * c[i] - b[i]) / 3.0;
    const double ea = relative_l2_error(a.values, ref.values, 0, g.size());
    const double eb = relative_l2_error(b.values, ref.values, 0, g.size());
    EXPECT_NEAR(ea / eb, 4.0, 0.4);
}

TEST(SplitStep, UnderResolvedGridIsRejected) {
    const Grid1D g(-10.0, 10.0, 64);
    EXPECT_THROW(split_step_evolve(gaussian_packet(g, 0.0, 1.0, 5.0), {g, 1e-3, 10, pot::Free{}, {}}), Error);
}

TEST(ReflectionTransmission, FreePacketFullyTransmits) {
    const Grid1D g(-100.0, 100.0, 4096);
    const auto psi = split_step_evolve(gaussian_packet(g, -20.0, 2.0, 3.0), {g, 1e-2, 2000, pot::Free{}, {}});
    const auto rt = reflection_transmission(psi, -1.0, 1.0);
    EXPECT_NEAR(rt.reflected, 0.0, 1e-8);
    EXPECT_NEAR(rt.transmitted, 1.0, 1e-8);
}

TEST(ReflectionTransmission, RequiresClearedBarrier) {
    const Grid1D g(-20.0, 20.0, 512);
    EXPECT_THROW(reflection_transmission(gaussian_packet(g, 0.0, 1.0, 0.0), -1.0, 1.0), Error);
}

TEST(ReflectionTransmission, WeakBarrierSignBlind) {
    const Grid1D g(-150.0, 150.0, 4096);
    const auto psi0 = gaussian_packet(g, -50.0, 8.0, 2.0);
    auto r_of = [&](double v0) {
        const auto psi = split_step_evolve(psi0, {g, 5e-3, 10000, pot::GaussianWell{v0, 0.5}, {}});
        const auto rt = reflection_transmission(psi, -5.0, 5.0);
        EXPECT_NEAR(rt.reflected + rt.transmitted, 1.0, 1e-6);
        return rt.reflected;
    };
    const double plus = r_of(0.01), minus = r_of(-0.01);
    EXPECT_GT(plus, 0.0);
    EXPECT_LT(std::abs(plus - minus), 0.1 * plus);
}
