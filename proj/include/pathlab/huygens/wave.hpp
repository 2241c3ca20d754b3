#pragma once

// Monochromatic scalar waves built from three-point paths
// source -> aperture point -> detector, each leg weighted by the
// isotropic wavelet exp(ik r) / (2 pi i r).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "pathlab/core/error.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/core/rng.hpp"
#include "pathlab/core/window.hpp"
#include "pathlab/potentials.hpp"

namespace pathlab {

inline double distance(const Vec3& a, const Vec3& b) { return std::hypot(b[0] - a[0], b[1] - a[1], b[2] - a[2]); }

struct AperturePoint {
    Vec3 r;
    double area = 1.0;
};

struct WaveSetup {
    double k = 1.0;
    Vec3 source;
    std::vector<AperturePoint> aperture;
    std::vector<Vec3> detectors;

    void validate() const {
        require(k > 0.0 && std::isfinite(k), "wavenumber must be positive");
        require(!aperture.empty(), "aperture has no points");
        for (const auto& a : aperture) {
            require(distance(source, a.r) > 0.0, "aperture point coincides with source");
            for (const auto& d : detectors) require(distance(a.r, d) > 0.0, "aperture point coincides with detector");
        }
        for (const auto& d : detectors) require(distance(source, d) > 0.0, "detector coincides with source");
    }
};

/// exp(ik|b - a|) / (2 pi i |b - a|).
inline cplx huygens_kernel(const Vec3& a, const Vec3& b, double k) {
    const double r = distance(a, b);
    require(r > 0.0, "singular kernel");
    return std::polar(1.0 / (2.0 * pi * r), k * r - pi / 2.0);
}

/// Sum over aperture points of f(source|r2) f(r2|r) dA(r2).
inline cplx aperture_amplitude(const WaveSetup& setup, const Vec3& r) {
    cplx sum{};
    for (const auto& a : setup.aperture)
        sum += huygens_kernel(setup.source, a.r, setup.k) * huygens_kernel(a.r, r, setup.k) * a.area;
    return sum;
}

inline std::vector<cplx> detector_amplitudes(const WaveSetup& setup, unsigned threads = 1) {
    setup.validate();
    std::vector<cplx> out(setup.detectors.size());
    parallel_chunks(out.size(), 64, threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) out[i] = aperture_amplitude(setup, setup.detectors[i]);
    });
    return out;
}

inline std::vector<double> detector_intensities(const WaveSetup& setup, unsigned threads = 1) {
    auto amps = detector_amplitudes(setup, threads);
    std::vector<double> out(amps.size());
    std::transform(amps.begin(), amps.end(), out.begin(), [](cplx a) { return std::norm(a); });
    return out;
}

/// Slit of the given width centred at `center`, spanning x, split into
/// `points` midpoint cells of area width/points (unit extent in y).
/// A zero width gives a single pinhole of unit weight.
inline std::vector<AperturePoint> slit_points(const Vec3& center, double width, std::size_t points) {
    require(width >= 0.0, "slit width must be non-negative");
    if (width == 0.0) return {{center, 1.0}};
    require(points >= 1, "slit needs at least one point");
    std::vector<AperturePoint> out;
    const double h = width / static_cast<double>(points);
    for (std::size_t j = 0; j < points; ++j) {
        Vec3 r = center;
        r[0] += -0.5 * width + (static_cast<double>(j) + 0.5) * h;
        out.push_back({r, h});
    }
    return out;
}

/// Two slits at x = +-d/2 in the plane z = 0, a point source on the axis at
/// z = -source_distance, and a screen at z = screen_distance.
struct DoubleSlit {
    double k = 2.0 * pi;
    double separation = 10.0;
    double screen_distance = 1000.0;
    double source_distance = 100.0;
    double slit_width = 0.0;
    std::size_t points_per_slit = 1;

    void validate() const {
        require(k > 0.0, "wavenumber must be positive");
        require(separation > 0.0 && screen_distance > 0.0 && source_distance > 0.0, "distances must be positive");
        require(slit_width < separation, "slits overlap");
    }
    double wavelength() const { return 2.0 * pi / k; }
    /// Two-source fringe spacing 2 pi L / (k d).
    double predicted_spacing() const { return 2.0 * pi * screen_distance / (k * separation); }
    bool far_field() const { return screen_distance > 10.0 * separation * separation * k / (2.0 * pi); }
    Vec3 screen_point(double x) const { return {x, 0.0, screen_distance}; }

    WaveSetup setup(std::vector<Vec3> detectors = {}) const {
        validate();
        WaveSetup s{k, {0.0, 0.0, -source_distance}, {}, std::move(detectors)};
        for (double sign : {-1.0, 1.0}) {
            auto pts = slit_points({sign * 0.5 * separation, 0.0, 0.0}, slit_width, points_per_slit);
            s.aperture.insert(s.aperture.end(), pts.begin(), pts.end());
        }
        return s;
    }
    double intensity(double x) const { return std::norm(aperture_amplitude(setup(), screen_point(x))); }
};

struct Pattern {
    std::vector<double> x;
    std::vector<double> intensity;
    bool near_field = false;
    std::string annotation;
};

inline Pattern double_slit_pattern(const DoubleSlit& ds, const std::vector<double>& xs, unsigned threads = 1) {
    std::vector<Vec3> det;
    det.reserve(xs.size());
    for (double x : xs) det.push_back(ds.screen_point(x));
    Pattern p{xs, detector_intensities(ds.setup(std::move(det)), threads), !ds.far_field(), {}};
    if (p.near_field) p.annotation = "near field: L <= 10 d^2 k / (2 pi)";
    return p;
}

struct FringeReport {
    double predicted_spacing = 0.0;
    double measured_spacing = 0.0;
    std::vector<double> maxima;
    std::vector<double> minima;
    /// Largest I(min) / mean(I of the two neighbouring maxima).
    double worst_contrast = 0.0;
    bool near_field = false;
};

/// Locates the central `orders` maxima on each side and the minima between
/// them by Brent search around the two-source prediction.
inline FringeReport analyze_fringes(const DoubleSlit& ds, int orders = 2) {
    require(orders >= 1, "need at least one fringe order");
    const WaveSetup s = ds.setup();
    const double dx = ds.predicted_spacing();
    auto intensity = [&](double x) { return std::norm(aperture_amplitude(s, ds.screen_point(x))); };
    auto extremum = [&](double guess, bool maximum) {
        auto f = [&](double x) { return maximum ? -intensity(x) : intensity(x); };
        return boost::math::tools::brent_find_minima(f, guess - 0.4 * dx, guess + 0.4 * dx, 50).first;
    };
    FringeReport r;
    r.predicted_spacing = dx;
    r.near_field = !ds.far_field();
    for (int m = -orders; m <= orders; ++m) r.maxima.push_back(extremum(m * dx, true));
    for (int m = -orders; m < orders; ++m) r.minima.push_back(extremum((m + 0.5) * dx, false));
    r.measured_spacing = (r.maxima.back() - r.maxima.front()) / (2.0 * orders);
    for (std::size_t j = 0; j < r.minima.size(); ++j) {
        const double peak = 0.5 * (intensity(r.maxima[j]) + intensity(r.maxima[j + 1]));
        r.worst_contrast = std::max(r.worst_contrast, intensity(r.minima[j]) / peak);
    }
    return r;
}

/// Intermediate plane z = z_plane sampled on a square lattice and apodized
/// radially: full weight inside `flat`, smoothly zero by `cut`.
struct RelayPlane {
    double z = 0.0;
    double spacing = 0.1;
    double flat = 8.0;
    double cut = 14.0;
    double cx = 0.0;
    double cy = 0.0;
};

/// Amplitude at r with every aperture-to-detector leg replaced by
/// k * integral over the relay plane of f(r2|p) f(p|r) dA(p). The factor k
/// restores the 1/(i lambda) Fresnel normalization that the isotropic
/// wavelet omits; stationary phase then returns the direct leg.
inline cplx relayed_amplitude(const WaveSetup& setup, const Vec3& r, const RelayPlane& plane) {
    setup.validate();
    require(plane.spacing > 0.0 && plane.cut > plane.flat && plane.flat >= 0.0, "bad relay plane");
    const auto half = static_cast<long>(std::ceil(plane.cut / plane.spacing));
    const double da = plane.spacing * plane.spacing;
    std::vector<Vec3> pts;
    std::vector<double> weight;
    for (long i = -half; i <= half; ++i)
        for (long j = -half; j <= half; ++j) {
            const double px = static_cast<double>(i) * plane.spacing, py = static_cast<double>(j) * plane.spacing;
            const double w = flat_top_window(std::hypot(px, py), plane.flat, plane.cut);
            if (w == 0.0) continue;
            pts.push_back({plane.cx + px, plane.cy + py, plane.z});
            weight.push_back(w * da);
        }
    cplx sum{};
    for (const auto& a : setup.aperture) {
        cplx leg{};
        for (std::size_t p = 0; p < pts.size(); ++p)
            leg += huygens_kernel(a.r, pts[p], setup.k) * huygens_kernel(pts[p], r, setup.k) * weight[p];
        sum += huygens_kernel(setup.source, a.r, setup.k) * setup.k * leg * a.area;
    }
    return sum;
}

} // namespace pathlab
