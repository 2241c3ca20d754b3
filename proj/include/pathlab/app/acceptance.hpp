#pragma once

// The fourteen acceptance criteria, each run at its stated tolerance and
// reported as one pass/fail line.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "pathlab/app/experiments.hpp"

namespace pathlab::app {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    /// Red for a reason recorded in the decisions ledger, not a regression.
    bool known_red = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;
};

struct AcceptanceOptions {
    unsigned threads = 4;
    /// Every tolerance is divided by this; 100 makes the harness fail on purpose.
    double tighten = 1.0;
    std::set<int> only;
    fs::path scratch = fs::temp_directory_path() / "pathlab-acceptance";
};

namespace acceptance_detail {

struct Ctx {
    const AcceptanceOptions& opt;
    std::ostringstream detail;
    bool pass = true;

    double tol(double t) const { return t / opt.tighten; }
    /// Records value <= limit (after tightening).
    void at_most(const std::string& what, double value, double limit) {
        const double l = tol(limit);
        const bool ok = value <= l;
        pass = pass && ok;
        note(what + "=" + fmt(value) + (ok ? " <= " : " > ") + fmt(l));
    }
    /// Records value >= limit (after tightening).
    void at_least(const std::string& what, double value, double limit) {
        const double l = limit * opt.tighten;
        const bool ok = value >= l;
        pass = pass && ok;
        note(what + "=" + fmt(value) + (ok ? " >= " : " < ") + fmt(l));
    }
    void within(const std::string& what, double value, double target, double rel) {
        const double r = tol(rel);
        const bool ok = std::abs(value / target - 1.0) <= r;
        pass = pass && ok;
        note(what + "=" + fmt(value) + (ok ? " within " : " outside ") + fmt(100.0 * r) + "% of " + fmt(target));
    }
    void in_range(const std::string& what, double value, double lo, double hi) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo) / opt.tighten;
        const bool ok = value >= mid - half && value <= mid + half;
        pass = pass && ok;
        note(what + "=" + fmt(value) + (ok ? " in [" : " not in [") + fmt(mid - half) + ", " + fmt(mid + half) + "]");
    }
    void require_true(const std::string& what, bool ok) {
        pass = pass && ok;
        note(what + (ok ? ": yes" : ": no"));
    }
    void note(const std::string& s) {
        if (detail.tellp() > 0) detail << "; ";
        detail << s;
    }
    static std::string fmt(double v) {
        std::ostringstream s;
        s.precision(3);
        s << v;
        return s.str();
    }
};

inline const Grid1D& wide_grid() {
    static const Grid1D g(-20.0, 20.0, 1024);
    return g;
}

inline void free_convergence(Ctx& c) {
    std::vector<double> errs;
    for (std::size_t n : {16, 32, 64, 128})
        errs.push_back(kernel_error_vs_analytic(compose_propagator(potential::Free{}, 0.0, {1.0, n}, wide_grid()),
                                                potential::Free{}));
    c.at_most("L2(n=64)", errs[2], 1e-3);
    bool monotone = true;
    for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] < errs[i - 1];
    c.require_true("strictly decreasing over n=16,32,64,128 (" + Ctx::fmt(errs[0]) + ", " + Ctx::fmt(errs[1]) + ", " +
                       Ctx::fmt(errs[2]) + ", " + Ctx::fmt(errs[3]) + ")",
                   monotone);
}

inline void harmonic_mehler(Ctx& c) {
    const potential::Harmonic h{1.0};
    c.at_most("L2(n=128)", kernel_error_vs_analytic(compose_propagator(h, 0.0, {1.0, 128}, wide_grid()), h), 1e-2);
}

inline void chapman_kolmogorov(Ctx& c) {
    for (const PotentialSpec& spec : {PotentialSpec{potential::Free{}}, PotentialSpec{potential::Harmonic{1.0}}}) {
        const auto one_leg = compose_propagator(spec, 0.0, {1.0, 128}, wide_grid());
        const auto first = compose_propagator(spec, 0.0, {0.4, 64}, wide_grid(), {}, {}, one_leg.source_options);
        const auto two_leg = apply_slices(first.field, spec, {0.6, 64});
        const auto [lo, hi] = resolved_range(one_leg, spec);
        c.at_most(potential_name(spec), relative_l2_error(two_leg.values, one_leg.field.values, lo, hi), 1e-3);
    }
}

inline void evolution_consistency(Ctx& c) {
    const Grid1D g(-20.0, 20.0, 512);
    struct Case {
        PotentialSpec spec;
        double x0, k0;
    };
    const std::vector<Case> cases{{potential::Free{}, 0.0, 1.0},          {potential::Linear{1.0}, 0.0, 1.0},
                                  {potential::Harmonic{1.0}, 1.0, 0.0},   {potential::Quartic{0.1}, 0.0, 1.0},
                                  {potential::GaussianWell{-1.0, 1.0}, -3.0, 2.0},
                                  {potential::Yukawa{0.5, 1.0}, -6.0, 0.0},
                                  {potential::SquareBarrier{1.0, 1.0}, -4.0, 2.0}};
    for (const auto& k : cases) {
        const auto psi0 = gaussian_packet(g, k.x0, 1.0, k.k0);
        const auto a = evolve_wavefunction(psi0, k.spec, {1.0, 128});
        const auto b = split_step_evolve(psi0, {g, 1e-3, 1000, k.spec, {}});
        ComplexField d(g);
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = a[i] - b[i];
        c.at_most(potential_name(k.spec), std::sqrt(discrete_norm(d)), 1e-3);
    }
}

inline void diffusion_exactness(Ctx& c) {
    bool exact = true;
    for (std::size_t n = 0; n <= 12; ++n)
        for (long l = -static_cast<long>(n); l <= static_cast<long>(n); ++l) {
            const auto e = enumerate_paths(n, l);
            const auto b = walk_reachable(n, l) ? static_cast<std::uint64_t>(binomial_count(n, l)) : 0;
            exact = exact && e == b;
        }
    c.require_true("enumeration equals binomial for n <= 12", exact);
    const auto h = mc_walk_sample({1.0, 1.0, 100}, 1'000'000, rng_stream(2), c.opt.threads);
    c.at_most("KS(lattice MC)", ks_distance_to_exact(h), 0.005);
    c.at_most("lattice/continuum(n=400)", lattice_continuum_error({0.1, 0.01, 400}), 0.02);
}

inline void gaussian_steps(Ctx& c) {
    const auto s = gaussian_step_path_mc(100, 0.01, 0.5, 1'000'000, rng_stream(4), c.opt.threads);
    c.at_most("KS(Gaussian steps)", ks_distance_to_green(s), 0.005);
}

inline void double_slit(Ctx& c) {
    DoubleSlit ds{2.0 * pi / 0.5, 10.0, 1000.0, 100.0, 0.0, 1};
    const auto f = analyze_fringes(ds);
    c.within("spacing", f.measured_spacing, f.predicted_spacing, 0.02);
    c.at_most("min/max", f.worst_contrast, 1e-4);
    const double near = ds.intensity(0.0);
    ds.screen_distance = 2000.0;
    c.within("I(L)/I(2L)", near / ds.intensity(0.0), 4.0, 0.05);
}

inline void pair_identity(Ctx& c) {
    const Grid1D g(-10.0, 10.0, 64);
    SourceOptions src;
    src.edge_wavenumber = 4.5;
    src.rolloff_fraction = 0.2;
    double worst = 0.0;
    for (std::size_t j : {31, 32, 33, 34}) {
        const double anchor = transition_probability_via_pairs(potential::Free{}, g.x(31), g.x(j), 1.0, 2, g, {}, {}, src);
        const double direct = direct_pair_quadrature(potential::Free{}, g.x(31), g.x(j), 1.0, 2, g);
        worst = std::max(worst, std::abs(direct / anchor - 1.0));
    }
    c.at_most("|direct/anchor - 1|", worst, 0.05);
    const auto k = compose_propagator(potential::Free{}, g.x(31), {1.0, 2}, g, {}, {}, src);
    c.require_true("anchor is |A|^2",
                   transition_probability_via_pairs(potential::Free{}, g.x(31), g.x(33), 1.0, 2, g, {}, {}, src) ==
                       std::norm(k.field[33]));
}

inline void concentration(Ctx& c) {
    const double W = 2.0, eps = 0.5;
    auto path = [&](double d) { return PathLattice{{0.0, 0.5 + d, 1.0}, eps, {}, 1}; };
    auto q = [&](double d) { return path_quasiprobability(path(d), potential::Free{}, W); };
    const double zero = dirichlet_first_zero(eps, W);
    std::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve(q, 0.5 * zero, 1.5 * zero,
                                                        boost::math::tools::eps_tolerance<double>(40), iters);
    c.within("first zero", 0.5 * (root.first + root.second), zero, 0.02);
    const double peak = q(0.0);
    double worst = 0.0, worst_abs = 0.0;
    for (int i = 1; i <= 4000; ++i) {
        const double d = zero * (1.0 + 0.005 * i);
        for (double s : {-1.0, 1.0}) {
            worst = std::max(worst, q(s * d));
            worst_abs = std::max(worst_abs, std::abs(q(s * d)));
        }
    }
    c.at_least("peak/max past zero", peak / worst, 5.0);
    c.note("by magnitude " + Ctx::fmt(peak / worst_abs));
}

inline void classical_argmax(Ctx& c) {
    const auto tmpl = PathLattice::straight(0.0, 1.0, 1.0, 3);
    const double step = 0.02;
    ScanOptions so{2.0, 64, c.opt.threads};
    const auto r = argmax_over_samples(potential::Harmonic{1.0}, tmpl, 1000, rng_stream(21), step, so);
    c.at_most("max node offset / step", r.max_node_offset / step, 1.0);
    const auto cl = classical_path_discrete(potential::Harmonic{1.0}, 0.0, 1.0, 1.0, 3);
    c.at_most("residual", classical_residual(cl, potential::Harmonic{1.0}), 1e-10);
}

inline void positivity(Ctx& c) {
    const auto tmpl = PathLattice::straight(0.0, 1.0, 1.0, 3);
    for (const PotentialSpec& spec : {PotentialSpec{potential::Free{}}, PotentialSpec{potential::Harmonic{1.0}}}) {
        const auto rep = positivity_scan(spec, tmpl, 3000, rng_stream(11), {3.0, 64, c.opt.threads});
        c.require_true(potential_name(spec) + " none below floor " + Ctx::fmt(rep.artifact_floor) + " (negative " +
                           Ctx::fmt(rep.fraction_negative) + ")",
                       rep.fraction_below_floor == 0.0);
    }
    const auto rep = positivity_scan(potential::Quartic{1.0}, tmpl, 3000, rng_stream(12), {3.0, 64, c.opt.threads});
    c.require_true("quartic report well formed (negative " + Ctx::fmt(rep.fraction_negative) + ")",
                   rep.values.size() == 3000 && std::isfinite(rep.min_value) && rep.normalization > 0.0 &&
                       rep.fraction_negative >= 0.0 && rep.fraction_negative <= 1.0);
}

inline void born_consistency(Ctx& c) {
    double lin = 0.0, cross = 0.0;
    for (const PotentialSpec& spec :
         {PotentialSpec{potential::GaussianWell{-1.0, 1.0}}, PotentialSpec{potential::SquareBarrier{1.0, 1.0}}})
        for (double dk : {0.5, 1.0, 1.5, 2.0, 2.5}) {
            const auto a = born_term_audit(spec, dk, 0.1);
            lin = std::max(lin, a.linear_diff / std::abs(a.cross_term));
            cross = std::max(cross, std::abs(a.cross_term / a.expected_cross - 1.0));
        }
    c.at_most("linear/cross", lin, 1e-10);
    c.at_most("|cross/(|V~|^2/2) - 1|", cross, 1e-2);
    double worst = 0.0;
    for (const PotentialSpec& spec : {PotentialSpec{potential::Yukawa{1.0, 1.0}},
                                      PotentialSpec{potential::GaussianWell{-1.0, 1.0}},
                                      PotentialSpec{potential::SquareBarrier{1.0, 1.0}}})
        for (int i = 0; i < 20; ++i) {
            const auto b = born_probability(spec, 0.1 + 3.9 * i / 19.0);
            if (b.analytic > 1e-12) worst = std::max(worst, b.disagreement);
        }
    c.at_most("analytic vs quadrature", worst, 1e-6);
}

inline void dynamical_born(Ctx& c) {
    const auto full = weak_potential_reflection_1d(potential::GaussianWell{0.01, 0.5}, 2.0);
    const auto half = weak_potential_reflection_1d(potential::GaussianWell{0.005, 0.5}, 2.0);
    c.at_most("R_born", full.r_born, 0.05);
    c.in_range("R_sim/R_born", full.r_simulated / full.r_born, 0.9, 1.1);
    c.within("R(g)/R(g/2)", full.r_simulated / half.r_simulated, 4.0, 0.1);
}

inline std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void determinism(Ctx& c) {
    const std::vector<io::RunConfig> configs{
        {"diffuse", 7, json{{"steps", 100}, {"walkers", 200000}, {"tolerance", 0.01}}, {}, 0},
        {"diffuse", 8, json{{"mode", "gaussian"}, {"steps", 50}, {"eps", 0.01}, {"D", 0.5}, {"walkers", 200000},
                            {"tolerance", 0.01}}, {}, 0},
        {"positivity", 11, json{{"potential", {{"type", "quartic"}, {"lambda4", 1.0}}}, {"paths", 600}}, {}, 0},
        {"huygens", 1, json{{"slit_width", 0.5}, {"points_per_slit", 8}}, {}, 0}};
    const unsigned many = std::max(2u, c.opt.threads);
    bool same = true;
    std::size_t files = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<std::vector<std::string>> contents;
        for (unsigned th : {1u, many, 1u}) {
            const fs::path dir = c.opt.scratch / ("run" + std::to_string(i) + "_" + std::to_string(contents.size()));
            fs::remove_all(dir);
            const auto r = run(configs[i], dir, th);
            std::vector<std::string> files_here;
            for (const auto& a : r.manifest["artifacts"]) files_here.push_back(slurp(dir / a.get<std::string>()));
            same = same && !files_here.empty();
            contents.push_back(std::move(files_here));
        }
        same = same && contents[0] == contents[1] && contents[0] == contents[2];
        files += contents[0].size();
    }
    c.require_true(std::to_string(files) + " artifacts identical across 1/" + std::to_string(many) +
                       " threads and repeat runs",
                   same);
}

} // namespace acceptance_detail

struct Criterion {
    int id;
    std::string title;
    double budget;
    bool known_red;
    std::function<void(acceptance_detail::Ctx&)> body;
};

inline const std::vector<Criterion>& criteria() {
    namespace d = acceptance_detail;
    static const std::vector<Criterion> list{
        // Red: the free time-sliced kernel does not depend on n, so its error is flat.
        {1, "Free propagator convergence", 5.0, true, d::free_convergence},
        {2, "Harmonic propagator vs Mehler kernel", 10.0, false, d::harmonic_mehler},
        {3, "Chapman-Kolmogorov composition", 10.0, false, d::chapman_kolmogorov},
        {4, "Evolution vs split-step", 30.0, false, d::evolution_consistency},
        {5, "Diffusion exactness", 60.0, false, d::diffusion_exactness},
        {6, "Gaussian-step path integral", 30.0, false, d::gaussian_steps},
        {7, "Huygens double slit", 10.0, false, d::double_slit},
        {8, "Pair-path identity", 10.0, false, d::pair_identity},
        {9, "Concentration", 10.0, false, d::concentration},
        {10, "Classical argmax", 60.0, false, d::classical_argmax},
        {11, "Positivity artifact floor", 60.0, false, d::positivity},
        {12, "Born consistency", 30.0, false, d::born_consistency},
        {13, "Dynamical Born check", 120.0, false, d::dynamical_born},
        {14, "Determinism", 30.0, false, d::determinism}};
    return list;
}

inline CriterionResult run_criterion(const Criterion& cr, const AcceptanceOptions& opt) {
    acceptance_detail::Ctx c{opt, {}, true};
    const auto start = std::chrono::steady_clock::now();
    try {
        cr.body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.note(std::string("error: ") + e.what());
    }
    CriterionResult r{cr.id, cr.title, c.pass, cr.known_red, c.detail.str(), 0.0, cr.budget};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > cr.budget) {
        r.pass = false;
        r.detail += "; over runtime budget";
    }
    return r;
}

inline std::string format_line(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.pass ? "PASS" : "FAIL") << "  [" << (r.id < 10 ? " " : "") << r.id << "] " << r.title << " ("
      << acceptance_detail::Ctx::fmt(r.seconds) << " s / " << r.budget << " s): " << r.detail;
    if (!r.pass && r.known_red) s << " [known red]";
    return s.str();
}

/// Runs the selected criteria, calling `report` after each one.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                                   const std::function<void(const CriterionResult&)>& report = {}) {
    require(opt.tighten > 0.0, "tightening factor must be positive");
    std::vector<CriterionResult> out;
    for (const auto& cr : criteria()) {
        if (!opt.only.empty() && opt.only.count(cr.id) == 0) continue;
        out.push_back(run_criterion(cr, opt));
        if (report) report(out.back());
    }
    return out;
}

} // namespace pathlab::app
