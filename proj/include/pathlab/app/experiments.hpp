#pragma once

// One runner per experiment family. Each runner parses and validates its
// whole parameter block first, then computes, writes CSV/JSON artifacts into
// the output directory and returns named checks. run() wraps a runner with
// timing and the manifest.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pathlab/born/scattering.hpp"
#include "pathlab/diffusion/walk.hpp"
#include "pathlab/feynman/propagator.hpp"
#include "pathlab/huygens/wave.hpp"
#include "pathlab/io/config.hpp"
#include "pathlab/io/csv.hpp"
#include "pathlab/pairpath/quasiprob.hpp"
#include "pathlab/schrodinger/split_step.hpp"

#ifndef PATHLAB_VERSION
#define PATHLAB_VERSION "0.1.0"
#endif

namespace pathlab::app {

using io::json;
namespace fs = std::filesystem;

inline std::string version() { return PATHLAB_VERSION; }

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    /// "<=", ">=", "==" or "in" (value within [limit, upper]).
    std::string relation = "<=";
    double upper = 0.0;
    bool pass = false;
};

inline Check check_at_most(std::string name, double value, double limit) {
    return {std::move(name), value, limit, "<=", 0.0, value <= limit};
}
inline Check check_at_least(std::string name, double value, double limit) {
    return {std::move(name), value, limit, ">=", 0.0, value >= limit};
}
inline Check check_within(std::string name, double value, double lo, double hi) {
    return {std::move(name), value, lo, "in", hi, value >= lo && value <= hi};
}

inline json check_json(const Check& c) {
    json j{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"pass", c.pass}};
    if (c.relation == "in") j["range"] = {c.limit, c.upper};
    else j["limit"] = c.limit;
    return j;
}

struct RunContext {
    io::RunConfig config;
    fs::path out;
    unsigned threads = 1;
    std::vector<std::string> artifacts;

    std::vector<std::string> header() const {
        return {"pathlab " + version(), "experiment: " + config.experiment, "config_hash: " + config.hash(),
                "seed: " + std::to_string(config.seed)};
    }
    io::CsvTable table(std::vector<std::string> columns) const {
        io::CsvTable t(std::move(columns));
        for (const auto& h : header()) t.comment(h);
        return t;
    }
    /// Artifacts are plain file names inside the output directory.
    fs::path artifact_path(const std::string& name) {
        require(fs::path(name).filename() == fs::path(name), "artifact name must not contain a directory");
        artifacts.push_back(name);
        return out / name;
    }
    void write_csv(const std::string& name, const io::CsvTable& t) { t.write(artifact_path(name)); }
    void write_json(const std::string& name, json j) {
        json doc{{"pathlab", version()}, {"experiment", config.experiment}, {"config_hash", config.hash()},
                 {"seed", config.seed}, {"data", std::move(j)}};
        std::ofstream f(artifact_path(name), std::ios::binary);
        require(static_cast<bool>(f), "cannot write " + name);
        f << doc.dump(2) << "\n";
    }
};

struct Outcome {
    json results = json::object();
    std::vector<Check> checks;
};

using Job = std::function<Outcome(RunContext&)>;

namespace detail {

inline TimeSlicing read_slicing(io::Reader& r, double t, std::size_t n) {
    TimeSlicing s{r.number("t", t), static_cast<std::size_t>(r.count("slices", n))};
    s.validate();
    return s;
}

inline SliceOptions read_slice_options(io::Reader& r) {
    SliceOptions opt;
    const auto rule = r.text("rule", "endpoint_average");
    if (rule == "midpoint") opt.rule = PotentialRule::midpoint;
    else require(rule == "endpoint_average", "unknown potential rule '" + rule + "'");
    opt.drop_endpoint_potential = r.flag("drop_endpoint_potential", false);
    return opt;
}

inline SourceOptions read_source(io::Reader r) {
    SourceOptions s;
    const auto model = r.text("model", "band_limited");
    if (model == "lattice_delta") s.model = SourceModel::lattice_delta;
    else require(model == "band_limited", "unknown source model '" + model + "'");
    if (r.has("edge")) s.edge_wavenumber = r.number("edge");
    s.rolloff_fraction = r.number("rolloff", s.rolloff_fraction);
    r.finish();
    require(s.rolloff_fraction > 0.0, "source rolloff must be positive");
    return s;
}

inline bool has_closed_form(const PotentialSpec& spec) { return is_at_most_quadratic(spec); }

} // namespace detail

/// Composed kernel from x0 over the grid, compared with the closed form when
/// the potential has one.
inline Job prepare_propagate(const json& params) {
    io::Reader r(params, "params");
    const auto spec = io::read_potential(r.child("potential"));
    const auto grid = io::read_grid(r.child("grid"), -20.0, 20.0, 1024);
    const auto slicing = detail::read_slicing(r, 1.0, 64);
    const double x0 = r.number("x0", 0.0);
    const auto opt = detail::read_slice_options(r);
    const auto src = detail::read_source(r.child("source"));
    const auto phys = io::read_physical(r.child("physical"));
    const double tol = r.number("tolerance", 1e-3);
    r.finish();
    require(x0 > grid.x_min() && x0 < grid.x_max(), "source point lies outside the grid");
    return [=](RunContext& ctx) {
        const auto k = compose_propagator(spec, x0, slicing, grid, phys, opt, src);
        const bool exact = detail::has_closed_form(spec);
        auto t = ctx.table(exact ? std::vector<std::string>{"x", "re", "im", "abs", "re_exact", "im_exact", "resolved"}
                                 : std::vector<std::string>{"x", "re", "im", "abs"});
        Outcome o;
        o.results["flat_wavenumber"] = k.flat_wavenumber;
        if (!exact) {
            for (std::size_t i = 0; i < grid.size(); ++i)
                t.add_row({grid.x(i), k.field[i].real(), k.field[i].imag(), std::abs(k.field[i])});
            ctx.write_csv("kernel.csv", t);
            return o;
        }
        const auto ref = analytic_kernel_field(spec, x0, slicing.total_time, grid, phys);
        const auto [lo, hi] = resolved_range(k, spec);
        double max_err = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const bool in = i >= lo && i < hi;
            if (in) {
                max_err = std::max(max_err, std::abs(k.field[i] - ref[i]));
                peak = std::max(peak, std::abs(ref[i]));
            }
            t.add_row({grid.x(i), k.field[i].real(), k.field[i].imag(), std::abs(k.field[i]), ref[i].real(),
                       ref[i].imag(), in});
        }
        ctx.write_csv("kernel.csv", t);
        const double l2 = relative_l2_error(k.field.values, ref.values, lo, hi);
        o.results["l2_relative_error"] = l2;
        o.results["max_error"] = max_err / peak;
        o.results["resolved_range"] = {grid.x(lo), grid.x(hi - 1)};
        o.checks.push_back(check_at_most("l2_relative_error", l2, tol));
        return o;
    };
}

/// A Gaussian packet through the time-sliced propagator and through the
/// split-step solver.
inline Job prepare_evolve(const json& params) {
    io::Reader r(params, "params");
    const auto spec = io::read_potential(r.child("potential"));
    const auto grid = io::read_grid(r.child("grid"), -20.0, 20.0, 512);
    const auto slicing = detail::read_slicing(r, 1.0, 128);
    auto pk = r.child("packet");
    const double px = pk.number("x0", 0.0), ps = pk.number("sigma", 1.0), pkk = pk.number("k0", 1.0);
    pk.finish();
    const double dt = r.number("dt", 1e-3);
    const auto opt = detail::read_slice_options(r);
    const auto phys = io::read_physical(r.child("physical"));
    const double tol = r.number("tolerance", 1e-3);
    r.finish();
    require(dt > 0.0, "dt must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(slicing.total_time / dt));
    require(steps >= 1 && std::abs(static_cast<double>(steps) * dt - slicing.total_time) < 1e-9 * slicing.total_time,
            "dt must divide t");
    return [=](RunContext& ctx) {
        const auto psi0 = gaussian_packet(grid, px, ps, pkk);
        const auto a = evolve_wavefunction(psi0, spec, slicing, phys, opt);
        const auto b = split_step_evolve(psi0, {grid, dt, steps, spec, phys});
        auto t = ctx.table({"x", "re_path", "im_path", "re_split_step", "im_split_step"});
        ComplexField diff(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            t.add_row({grid.x(i), a[i].real(), a[i].imag(), b[i].real(), b[i].imag()});
            diff[i] = a[i] - b[i];
        }
        ctx.write_csv("wavefunction.csv", t);
        Outcome o;
        const double dist = std::sqrt(discrete_norm(diff));
        o.results["l2_distance"] = dist;
        o.results["norm_path"] = discrete_norm(a);
        o.results["norm_split_step"] = discrete_norm(b);
        o.checks.push_back(check_at_most("l2_distance", dist, tol));
        return o;
    };
}

/// Lattice walks (exact distribution as the oracle) or Gaussian-step walks
/// (the Green's function as the oracle).
inline Job prepare_diffuse(const json& params) {
    io::Reader r(params, "params");
    const auto mode = r.text("mode", "lattice");
    require(mode == "lattice" || mode == "gaussian", "diffuse mode must be lattice or gaussian");
    const WalkSpec spec{r.number("lambda", 1.0), r.number("eps", 1.0), static_cast<std::size_t>(r.count("steps", 100))};
    const auto walkers = r.count("walkers", 1'000'000);
    const double D = r.number("D", spec.diffusion_constant());
    const auto bins = static_cast<std::size_t>(r.count("bins", 80));
    const double tol = r.number("tolerance", 0.005);
    r.finish();
    spec.validate();
    require(walkers >= 1, "need at least one walker");
    require(D > 0.0, "D must be positive");
    require(bins >= 1, "need at least one bin");
    return [=](RunContext& ctx) {
        const auto rng = rng_stream(ctx.config.seed);
        Outcome o;
        if (mode == "lattice") {
            const auto h = mc_walk_sample(spec, walkers, rng, ctx.threads);
            auto t = ctx.table({"l", "count", "fraction", "exact"});
            for (std::size_t i = 0; i < h.counts.size(); ++i)
                t.add_row({static_cast<std::int64_t>(h.offset(i)), static_cast<std::int64_t>(h.counts[i]), h.fraction(i),
                           walk_probability_exact(spec.n_steps, h.offset(i))});
            ctx.write_csv("walk.csv", t);
            const double ks = ks_distance_to_exact(h);
            o.results["ks_distance"] = ks;
            o.checks.push_back(check_at_most("ks_distance", ks, tol));
            return o;
        }
        const auto s = gaussian_step_path_mc(spec.n_steps, spec.eps, D, walkers, rng, ctx.threads);
        const double half = 5.0 * std::sqrt(2.0 * D * s.duration());
        const auto b = bin_samples(s.endpoints, -half, half, bins);
        auto t = ctx.table({"x", "count", "density", "green"});
        for (std::size_t i = 0; i < b.counts.size(); ++i)
            t.add_row({b.center(i), static_cast<std::int64_t>(b.counts[i]),
                       static_cast<double>(b.counts[i]) / (static_cast<double>(b.total) * b.width()),
                       gaussian_green(b.center(i), s.duration(), D)});
        ctx.write_csv("endpoints.csv", t);
        const double ks = ks_distance_to_green(s);
        o.results["ks_distance"] = ks;
        o.checks.push_back(check_at_most("ks_distance", ks, tol));
        return o;
    };
}

inline Job prepare_huygens(const json& params) {
    io::Reader r(params, "params");
    DoubleSlit ds;
    ds.k = 2.0 * pi / r.number("wavelength", 0.5);
    ds.separation = r.number("separation", 10.0);
    ds.screen_distance = r.number("screen_distance", 1000.0);
    ds.source_distance = r.number("source_distance", 100.0);
    ds.slit_width = r.number("slit_width", 0.0);
    ds.points_per_slit = static_cast<std::size_t>(r.count("points_per_slit", 1));
    auto sc = r.child("screen");
    const double lo = sc.number("min", -150.0), hi = sc.number("max", 150.0);
    const auto n = static_cast<std::size_t>(sc.count("points", 601));
    sc.finish();
    const double spacing_tol = r.number("spacing_tolerance", 0.02);
    const double contrast_tol = r.number("contrast_tolerance", 1e-4);
    r.finish();
    ds.validate();
    require(hi > lo && n >= 2, "screen needs max > min and at least two points");
    return [=](RunContext& ctx) {
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto p = double_slit_pattern(ds, xs, ctx.threads);
        auto t = ctx.table({"x", "intensity"});
        if (p.near_field) t.comment(p.annotation);
        for (std::size_t i = 0; i < n; ++i) t.add_row({xs[i], p.intensity[i]});
        ctx.write_csv("pattern.csv", t);
        const auto f = analyze_fringes(ds);
        Outcome o;
        const double rel = std::abs(f.measured_spacing / f.predicted_spacing - 1.0);
        o.results = {{"predicted_spacing", f.predicted_spacing}, {"measured_spacing", f.measured_spacing},
                     {"maxima", f.maxima}, {"minima", f.minima}, {"worst_contrast", f.worst_contrast},
                     {"near_field", f.near_field}};
        if (p.near_field) o.results["annotation"] = p.annotation;
        o.checks.push_back(check_at_most("spacing_relative_error", rel, spacing_tol));
        // Finite slits put zeros of the single-slit envelope between fringes;
        // the two-source contrast bound applies to pinholes.
        if (ds.slit_width == 0.0) o.checks.push_back(check_at_most("worst_contrast", f.worst_contrast, contrast_tol));
        return o;
    };
}

/// |A|^2 from the composed kernel against the direct sum of pair-path
/// quasiprobabilities over the grid.
inline Job prepare_pairpaths(const json& params) {
    io::Reader r(params, "params");
    const auto spec = io::read_potential(r.child("potential"));
    const auto grid = io::read_grid(r.child("grid"), -10.0, 10.0, 64);
    const auto slicing = detail::read_slicing(r, 1.0, 2);
    const auto source = static_cast<std::size_t>(r.count("source_index", 31));
    auto det_raw = r.numbers("detector_indices", {31, 32, 33, 34});
    auto srcj = r.child("source");
    SourceOptions src;
    src.edge_wavenumber = srcj.number("edge", 4.5);
    src.rolloff_fraction = srcj.number("rolloff", 0.2);
    srcj.finish();
    const double fraction = r.number("window_fraction", 0.5);
    const auto w_points = static_cast<std::size_t>(r.count("w_points", 64));
    const auto phys = io::read_physical(r.child("physical"));
    const double tol = r.number("tolerance", 0.05);
    r.finish();
    require(source < grid.size(), "source index outside the grid");
    require(slicing.n_slices >= 2 && slicing.n_slices <= 4, "direct pair quadrature needs 2 to 4 slices");
    std::vector<std::size_t> detectors;
    for (double d : det_raw) {
        require(d >= 0.0 && d < static_cast<double>(grid.size()) && d == std::floor(d), "bad detector index");
        detectors.push_back(static_cast<std::size_t>(d));
    }
    return [=](RunContext& ctx) {
        auto t = ctx.table({"x", "kernel_modulus_squared", "pair_quadrature", "ratio"});
        Outcome o;
        double worst = 0.0;
        const double x0 = grid.x(source);
        for (auto j : detectors) {
            const double x = grid.x(j);
            const double anchor = transition_probability_via_pairs(spec, x0, x, slicing.total_time, slicing.n_slices,
                                                                   grid, phys, {}, src);
            const double direct = direct_pair_quadrature(spec, x0, x, slicing.total_time, slicing.n_slices, grid, phys,
                                                         fraction, w_points);
            t.add_row({x, anchor, direct, direct / anchor});
            worst = std::max(worst, std::abs(direct / anchor - 1.0));
        }
        ctx.write_csv("pairpaths.csv", t);
        o.results["worst_relative_difference"] = worst;
        o.checks.push_back(check_at_most("worst_relative_difference", worst, tol));
        return o;
    };
}

inline Job prepare_positivity(const json& params) {
    io::Reader r(params, "params");
    const auto spec = io::read_potential(r.child("potential"));
    auto pj = r.child("path");
    const double a = pj.number("x0", 0.0), b = pj.number("x", 1.0), t = pj.number("t", 1.0);
    const auto n = static_cast<std::size_t>(pj.count("slices", 3));
    pj.finish();
    const auto paths = static_cast<std::size_t>(r.count("paths", 3000));
    ScanOptions opt;
    opt.w_cutoff = r.number("w_cutoff", 3.0);
    opt.w_points = static_cast<std::size_t>(r.count("w_points", 64));
    const auto phys = io::read_physical(r.child("physical"));
    r.finish();
    const auto tmpl = PathLattice::straight(a, b, t, n, phys);
    tmpl.validate();
    require(paths >= 1, "need at least one path");
    require(opt.w_cutoff > 0.0 && opt.w_points >= 2, "bad w window");
    return [=](RunContext& ctx) {
        auto o2 = opt;
        o2.threads = ctx.threads;
        const auto rep = positivity_scan(spec, tmpl, paths, rng_stream(ctx.config.seed), o2);
        auto tab = ctx.table({"path", "value", "relative", "below_floor"});
        for (std::size_t i = 0; i < rep.values.size(); ++i) {
            const double rel = rep.values[i] / rep.normalization;
            tab.add_row({static_cast<std::int64_t>(i), rep.values[i], rel, rel < -(rep.artifact_floor + 1e-9)});
        }
        ctx.write_csv("quasiprobabilities.csv", tab);
        json report{{"potential", rep.potential},           {"paths", rep.values.size()},
                    {"min_value", rep.min_value},           {"normalization", rep.normalization},
                    {"fraction_negative", rep.fraction_negative}, {"artifact_floor", rep.artifact_floor},
                    {"fraction_below_floor", rep.fraction_below_floor}, {"max_imaginary", rep.max_imaginary}};
        ctx.write_json("report.json", report);
        Outcome o;
        o.results = report;
        const bool well_formed = std::isfinite(rep.min_value) && rep.normalization > 0.0 &&
                                 rep.fraction_negative >= 0.0 && rep.fraction_negative <= 1.0;
        o.checks.push_back({"report_well_formed", well_formed ? 1.0 : 0.0, 1.0, "==", 0.0, well_formed});
        // Only the potentials with at most quadratic terms have a proven floor.
        if (is_at_most_quadratic(spec))
            o.checks.push_back({"fraction_below_floor", rep.fraction_below_floor, 0.0, "==", 0.0,
                                rep.fraction_below_floor == 0.0});
        return o;
    };
}

inline Job prepare_born(const json& params) {
    io::Reader r(params, "params");
    const auto spec = io::read_potential(r.child("potential"), "yukawa");
    const auto dim_n = r.count("dimension", 3);
    require(dim_n == 1 || dim_n == 3, "dimension must be 1 or 3");
    const Dimension dim = dim_n == 1 ? Dimension::one : Dimension::three;
    auto dj = r.child("dk");
    const double lo = dj.number("min", 0.1), hi = dj.number("max", 4.0);
    const auto count = static_cast<std::size_t>(dj.count("count", 20));
    dj.finish();
    const double tol = r.number("tolerance", 1e-6);
    auto aj = r.child("audit");
    const bool audit = aj.flag("enabled", std::holds_alternative<potential::GaussianWell>(spec) ||
                                              std::holds_alternative<potential::SquareBarrier>(spec));
    const double eps = aj.number("eps", 0.1);
    AuditGrid ag;
    ag.v_window = aj.number("v_window", ag.v_window);
    ag.spacing = aj.number("spacing", ag.spacing);
    aj.finish();
    const auto phys = io::read_physical(r.child("physical"));
    r.finish();
    require(is_fourier_transformable(spec), "non-integrable potential");
    require(count >= 1 && hi >= lo && lo >= 0.0, "bad dk sweep");
    return [=](RunContext& ctx) {
        auto t = ctx.table({"dk", "p_analytic", "p_quadrature", "relative_difference", "agree"});
        Outcome o;
        double worst = 0.0;
        bool forward = false;
        json audits = json::array();
        for (std::size_t i = 0; i < count; ++i) {
            const double dk = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
            const auto b = born_probability(spec, dk, dim);
            // Exact zeros of a transform have no relative error to speak of.
            const bool meaningful = b.analytic > 1e-12;
            if (meaningful) worst = std::max(worst, b.disagreement);
            t.add_row({dk, b.analytic, b.quadrature, b.disagreement, !meaningful || b.disagreement <= tol});
            forward = forward || b.forward_excluded;
            if (audit && dk != 0.0) {
                const auto a = born_term_audit(spec, dk, eps, phys, ag);
                audits.push_back({{"dk", dk},
                                  {"linear_diff", a.linear_diff},
                                  {"squared_at_nonzero", a.squared_at_nonzero},
                                  {"cross_term", a.cross_term},
                                  {"expected_cross", a.expected_cross},
                                  {"coupling", a.coupling}});
            }
        }
        if (forward) t.comment("dk = 0: excluded by collimation");
        ctx.write_csv("born.csv", t);
        o.results["worst_relative_difference"] = worst;
        o.results["agreement"] = worst <= tol;
        if (forward) o.results["forward"] = "excluded by collimation";
        o.checks.push_back(check_at_most("analytic_vs_quadrature", worst, tol));
        if (audit) {
            ctx.write_json("audit.json", audits);
            double lin = 0.0, cross = 0.0;
            for (const auto& a : audits) {
                lin = std::max(lin, a["linear_diff"].get<double>() / std::abs(a["cross_term"].get<double>()));
                cross = std::max(cross, std::abs(a["cross_term"].get<double>() / a["expected_cross"].get<double>() - 1.0));
            }
            o.checks.push_back(check_at_most("linear_cancellation", lin, 1e-10));
            o.checks.push_back(check_at_most("cross_term_relative_error", cross, 1e-2));
        }
        return o;
    };
}

inline Job prepare_reflect1d(const json& params) {
    io::Reader r(params, "params");
    const auto spec = io::read_potential(r.child("potential"), "gaussian_well");
    const double k0 = r.number("k0", 2.0);
    ReflectionSetup s;
    s.grid = io::read_grid(r.child("grid"), -300.0, 300.0, 8192);
    s.x_start = r.number("x_start", s.x_start);
    s.sigma_x = r.number("sigma_x", s.sigma_x);
    s.dt = r.number("dt", s.dt);
    s.barrier_extent = r.number("barrier_extent", s.barrier_extent);
    s.params = io::read_physical(r.child("physical"));
    const bool halve = r.flag("check_scaling", true);
    const double tol = r.number("tolerance", 0.1);
    r.finish();
    require(std::holds_alternative<potential::GaussianWell>(spec) ||
                std::holds_alternative<potential::SquareBarrier>(spec),
            "reflect1d needs a gaussian_well or square_barrier");
    require(born_reflection_1d(spec, k0, s.params) < 0.05, "outside Born regime");
    return [=](RunContext& ctx) {
        auto scaled = [&](double f) {
            return std::visit(overloaded{[&](const potential::GaussianWell& g) -> PotentialSpec {
                                             return potential::GaussianWell{f * g.depth, g.sigma};
                                         },
                                         [&](const potential::SquareBarrier& b) -> PotentialSpec {
                                             return potential::SquareBarrier{f * b.height, b.half_width};
                                         },
                                         [](const auto&) -> PotentialSpec { throw Error("unreachable"); }},
                              spec);
        };
        auto t = ctx.table({"coupling_factor", "r_simulated", "r_born", "r_born_packet", "ratio"});
        Outcome o;
        const auto full = weak_potential_reflection_1d(spec, k0, s);
        t.add_row({1.0, full.r_simulated, full.r_born, full.r_born_packet, full.r_simulated / full.r_born});
        const double ratio = full.r_simulated / full.r_born;
        o.results = {{"r_simulated", full.r_simulated}, {"r_born", full.r_born}, {"r_born_packet", full.r_born_packet},
                     {"ratio", ratio}, {"steps", full.steps}};
        o.checks.push_back(check_within("r_simulated_over_r_born", ratio, 1.0 - tol, 1.0 + tol));
        if (halve) {
            const auto half = weak_potential_reflection_1d(scaled(0.5), k0, s);
            t.add_row({0.5, half.r_simulated, half.r_born, half.r_born_packet, half.r_simulated / half.r_born});
            const double q = full.r_simulated / half.r_simulated / 4.0;
            o.results["halving_ratio_over_4"] = q;
            o.checks.push_back(check_within("coupling_halving_over_4", q, 1.0 - tol, 1.0 + tol));
        }
        ctx.write_csv("reflection.csv", t);
        return o;
    };
}

inline Job prepare(const io::RunConfig& cfg) {
    static const std::map<std::string, std::function<Job(const json&)>> table{
        {"propagate", prepare_propagate}, {"evolve", prepare_evolve},       {"diffuse", prepare_diffuse},
        {"huygens", prepare_huygens},     {"pairpaths", prepare_pairpaths}, {"positivity", prepare_positivity},
        {"born", prepare_born},           {"reflect1d", prepare_reflect1d}};
    const auto it = table.find(cfg.experiment);
    require(it != table.end(), "unknown experiment '" + cfg.experiment + "'");
    return it->second(cfg.params);
}

struct RunResult {
    json manifest;
    bool success = false;
};

/// Validates, runs and writes manifest.json; the manifest is written even
/// when validation or the computation fails.
inline RunResult run(const io::RunConfig& cfg, const fs::path& out, unsigned threads) {
    const auto start = std::chrono::steady_clock::now();
    RunContext ctx{cfg, out, threads, {}};
    json m{{"pathlab", version()},
           {"experiment", cfg.experiment},
           {"config", cfg.canonical()},
           {"config_hash", cfg.hash()},
           {"seed", cfg.seed},
           {"threads", threads},
           {"output_directory", out.string()}};
    bool ok = false;
    try {
        fs::create_directories(out);
        const Job job = prepare(cfg);
        const Outcome o = job(ctx);
        m["results"] = o.results;
        json checks = json::array();
        ok = true;
        for (const auto& c : o.checks) {
            checks.push_back(check_json(c));
            ok = ok && c.pass;
        }
        m["checks"] = checks;
        m["status"] = ok ? "pass" : "fail";
    } catch (const std::exception& e) {
        m["status"] = "error";
        m["error"] = e.what();
    }
    m["artifacts"] = ctx.artifacts;
    m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec) {
        std::ofstream f(out / "manifest.json", std::ios::binary);
        if (f) f << m.dump(2) << "\n";
    }
    return {m, ok};
}

} // namespace pathlab::app
