#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "pathlab/born/scattering.hpp"

using namespace pathlab;
namespace pot = pathlab::potential;

namespace {

// Plain trapezoid sums, independent of the library's Gauss-Kronrod path.
double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) s += f(a + static_cast<double>(i) * h);
    return s * h;
}

// Transform of an even potential, integrated only over its support so the
// barrier's jumps sit on the end points.
double fourier_1d_oracle(const PotentialSpec& spec, double k) {
    if (const auto* b = std::get_if<pot::SquareBarrier>(&spec))
        return b->height * trapezoid([&](double x) { return std::cos(k * x); }, -b->half_width, b->half_width, 400000);
    return trapezoid([&](double x) { return std::cos(k * x) * potential_value(spec, x); }, -12.0, 12.0, 400000);
}

std::vector<double> sweep(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

// Each packet run takes several seconds, so the three couplings are shared.
const ReflectionResult& reflection(double depth) {
    static std::map<double, ReflectionResult> cache;
    auto it = cache.find(depth);
    if (it == cache.end()) it = cache.emplace(depth, weak_potential_reflection_1d(pot::GaussianWell{depth, 0.5}, 2.0)).first;
    return it->second;
}

} // namespace

TEST(Kinematics, RightAngleDeflection) {
    const auto k = kinematics_from_geometry({-1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(k.v_in[0], 1.0);
    EXPECT_DOUBLE_EQ(k.v_out[1], 1.0);
    EXPECT_NEAR(k.dk_magnitude(), std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(k.speed_ratio(), 1.0);
}

TEST(Kinematics, ForwardGeometryHasNoTransfer) {
    const Vec3 r0{-2.0, -1.0, 0.5}, r{4.0, 2.0, -0.25};
    const Vec3 rk{0.0, 0.0, 0.25};
    const double t = 3.0;
    const double tk = t * norm3(rk - r0) / norm3(r - r0);
    EXPECT_LT(kinematics_from_geometry(r0, rk, r, tk, t).dk_magnitude(), 1e-14);
}

TEST(Kinematics, DoublingTimesHalvesTransfer) {
    const Vec3 r0{-1.0, 0.3, 0.0}, rk{0.0, 0.0, 0.0}, r{0.5, 1.0, -0.2};
    const auto a = kinematics_from_geometry(r0, rk, r, 0.7, 1.9);
    const auto b = kinematics_from_geometry(r0, rk, r, 1.4, 3.8);
    EXPECT_NEAR(b.dk_magnitude(), 0.5 * a.dk_magnitude(), 1e-14);
}

TEST(Kinematics, MassOverHbarScalesTransfer) {
    const auto k = kinematics_from_geometry({-1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.0, 2.0, {2.0, 0.5});
    EXPECT_NEAR(k.dk_magnitude(), 4.0 * std::sqrt(2.0), 1e-14);
}

TEST(Kinematics, DegenerateGeometryThrows) {
    const Vec3 o{0.0, 0.0, 0.0}, a{1.0, 0.0, 0.0};
    EXPECT_THROW(kinematics_from_geometry(a, o, a, 0.0, 1.0), Error);
    EXPECT_THROW(kinematics_from_geometry(a, o, a, 1.0, 1.0), Error);
    EXPECT_THROW(kinematics_from_geometry(o, o, a, 0.5, 1.0), Error);
    EXPECT_THROW(kinematics_from_geometry(a, o, o, 0.5, 1.0), Error);
}

TEST(BornProbability, YukawaAtUnitTransfer) {
    // 4 pi / k * integral of sin(k r) exp(-mu r) dr, summed directly.
    const double oracle =
        4.0 * pi * trapezoid([](double r) { return std::sin(r) * std::exp(-r); }, 0.0, 60.0, 600000);
    const auto b = born_probability(pot::Yukawa{1.0, 1.0}, 1.0);
    EXPECT_NEAR(b.analytic, oracle * oracle, 1e-8 * oracle * oracle);
    EXPECT_NEAR(b.analytic, 4.0 * pi * pi, 1e-10);
    EXPECT_NEAR(b.quadrature, 4.0 * pi * pi, 1e-6 * 4.0 * pi * pi);
}

TEST(BornProbability, GaussianDecay) {
    for (double sigma : {0.5, 1.0, 1.3}) {
        for (Dimension dim : {Dimension::one, Dimension::three}) {
            const pot::GaussianWell g{-2.0, sigma};
            const double ratio = born_probability(g, 2.0, dim).analytic / born_probability(g, 1.0, dim).analytic;
            EXPECT_NEAR(ratio / std::exp(-3.0 * sigma * sigma), 1.0, 1e-6);
            const double qratio = born_probability(g, 2.0, dim).quadrature / born_probability(g, 1.0, dim).quadrature;
            EXPECT_NEAR(qratio / std::exp(-3.0 * sigma * sigma), 1.0, 1e-6);
        }
    }
}

TEST(BornProbability, AnalyticMatchesQuadratureOnSweep) {
    const std::vector<PotentialSpec> specs{pot::Yukawa{1.0, 1.0}, pot::Yukawa{-0.5, 2.0}, pot::GaussianWell{-1.0, 1.0},
                                           pot::GaussianWell{0.7, 0.4}, pot::SquareBarrier{1.0, 1.0}};
    for (const auto& spec : specs)
        for (Dimension dim : {Dimension::one, Dimension::three}) {
            // The 1/r singularity is not integrable on a line.
            if (std::holds_alternative<pot::Yukawa>(spec) && dim == Dimension::one) continue;
            for (double dk : sweep(0.1, 4.0, 20)) {
                const auto b = born_probability(spec, dk, dim);
                EXPECT_GE(b.analytic, 0.0);
                EXPECT_GE(b.quadrature, 0.0);
                // Skip the exact zeros of the square barrier transform.
                if (b.analytic < 1e-12) continue;
                EXPECT_LT(b.disagreement, 1e-6) << potential_name(spec) << " dk=" << dk;
            }
        }
}

TEST(BornProbability, EvenInTransfer) {
    for (double dk : {0.3, 1.1, 2.7})
        EXPECT_DOUBLE_EQ(born_probability(pot::GaussianWell{-1.0, 0.8}, dk).analytic,
                         born_probability(pot::GaussianWell{-1.0, 0.8}, -dk).analytic);
}

TEST(BornProbability, SignBlind) {
    EXPECT_DOUBLE_EQ(born_probability(pot::GaussianWell{-0.3, 1.0}, 1.5).analytic,
                     born_probability(pot::GaussianWell{0.3, 1.0}, 1.5).analytic);
}

TEST(BornProbability, ForwardDirectionIsFlagged) {
    const auto b = born_probability(pot::GaussianWell{-1.0, 1.0}, 0.0);
    EXPECT_TRUE(b.forward_excluded);
    EXPECT_EQ(b.note, "excluded by collimation");
    EXPECT_FALSE(born_probability(pot::GaussianWell{-1.0, 1.0}, 0.5).forward_excluded);
}

TEST(BornProbability, RejectsUnboundedPotentials) {
    EXPECT_THROW(born_probability(pot::Harmonic{1.0}, 1.0), Error);
    EXPECT_THROW(born_probability(pot::Free{}, 1.0), Error);
}

TEST(BornAudit, LinearTermsCancel) {
    for (double dk : {0.5, 1.0, 2.0}) {
        const auto a = born_term_audit(pot::GaussianWell{-1.0, 1.0}, dk, 0.1);
        EXPECT_LT(a.linear_diff, 1e-10 * std::abs(a.cross_term));
        EXPECT_GT(std::abs(a.linear_minus), 1e-3);
    }
}

TEST(BornAudit, CrossTermIsHalfTheBornProbability) {
    const std::vector<PotentialSpec> specs{pot::GaussianWell{-1.0, 1.0}, pot::SquareBarrier{1.0, 1.0}};
    for (const auto& spec : specs)
        for (double dk : {0.5, 1.0, 1.5, 2.0, 2.5}) {
            const auto a = born_term_audit(spec, dk, 0.1);
            const double ft = fourier_1d_oracle(spec, dk);
            const double half = 0.5 * ft * ft;
            EXPECT_NEAR(a.cross_term / half, 1.0, 1e-2) << potential_name(spec) << " dk=" << dk;
            EXPECT_NEAR(a.expected_cross / half, 1.0, 1e-6);
            EXPECT_LT(std::abs(a.cross.imag()), 1e-10 * std::abs(a.cross_term));
        }
}

TEST(BornAudit, SquaredTermsShrinkWithWindow) {
    for (double dk : {1.0, 1.25, 2.0, 2.5}) {
        AuditGrid small, large;
        large.v_window = 2.0 * small.v_window;
        const auto a = born_term_audit(pot::GaussianWell{-1.0, 1.0}, dk, 0.1, {}, small);
        const auto b = born_term_audit(pot::GaussianWell{-1.0, 1.0}, dk, 0.1, {}, large);
        EXPECT_GE(a.squared_at_nonzero, 4.0 * b.squared_at_nonzero) << "dk=" << dk;
    }
}

TEST(BornAudit, CouplingIsEpsOverHbar) {
    const auto a = born_term_audit(pot::GaussianWell{-1.0, 1.0}, 1.0, 0.2, {1.0, 0.5});
    EXPECT_DOUBLE_EQ(a.coupling, 0.4);
}

TEST(BornAudit, RejectsForwardTransfer) {
    EXPECT_THROW(born_term_audit(pot::GaussianWell{-1.0, 1.0}, 0.0, 0.1), Error);
}

TEST(Reflection, WeakBumpMatchesFirstOrder) {
    const auto& r = reflection(0.01);
    EXPECT_GT(r.r_simulated / r.r_born, 0.9);
    EXPECT_LT(r.r_simulated / r.r_born, 1.1);
    EXPECT_NEAR(r.r_simulated + r.transmitted, 1.0, 1e-9);

    const auto& half = reflection(0.005);
    EXPECT_NEAR(r.r_born / half.r_born, 4.0, 1e-12);
    EXPECT_NEAR(r.r_simulated / half.r_simulated / 4.0, 1.0, 0.1);
}

TEST(Reflection, WellAndBumpReflectAlike) {
    const auto& bump = reflection(0.01);
    const auto& well = reflection(-0.01);
    EXPECT_DOUBLE_EQ(bump.r_born, well.r_born);
    EXPECT_LT(std::abs(bump.r_simulated - well.r_simulated), 0.1 * bump.r_born);
}

TEST(Reflection, StrongCouplingRejected) {
    try {
        weak_potential_reflection_1d(pot::GaussianWell{5.0, 0.5}, 2.0);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "outside Born regime");
    }
}

TEST(Reflection, BroadMomentumRejected) {
    ReflectionSetup s;
    s.sigma_x = 2.0;
    EXPECT_THROW(weak_potential_reflection_1d(pot::GaussianWell{0.01, 0.5}, 2.0, s), Error);
}

TEST(Reflection, PacketAverageApproachesPointFormula) {
    const pot::GaussianWell g{0.01, 0.5};
    const double point = born_reflection_1d(g, 2.0);
    const double wide = born_reflection_packet(g, 2.0, 8.0);
    const double narrow = born_reflection_packet(g, 2.0, 64.0);
    EXPECT_LT(std::abs(narrow - point), 0.1 * std::abs(wide - point));
}
