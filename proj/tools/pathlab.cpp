#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pathlab/app/acceptance.hpp"

namespace app = pathlab::app;
namespace io = pathlab::io;

namespace {

struct Common {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

int run_experiment(const std::string& name, const Common& c) {
    io::RunConfig cfg;
    try {
        if (c.config.empty()) {
            cfg.experiment = name;
        } else {
            cfg = io::load_config(c.config);
            pathlab::require(cfg.experiment == name,
                             "config is for '" + cfg.experiment + "', not '" + name + "'");
        }
        if (c.seed) cfg.seed = *c.seed;
    } catch (const std::exception& e) {
        std::cerr << "pathlab " << name << ": " << e.what() << "\n";
        return 2;
    }
    const unsigned threads = pathlab::resolve_threads(c.threads);
    const auto r = app::run(cfg, c.out, threads);
    const auto& m = r.manifest;
    if (m.at("status") == "error") {
        std::cerr << "pathlab " << name << ": " << m.at("error").get<std::string>() << "\n";
        return 2;
    }
    for (const auto& ch : m.at("checks"))
        std::cout << (ch.at("pass").get<bool>() ? "PASS  " : "FAIL  ") << ch.at("name").get<std::string>() << " = "
                  << ch.at("value").get<double>() << "\n";
    std::cout << "artifacts in " << c.out << " (manifest.json)\n";
    return r.success ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"pathlab: path-summation experiments"};
    cli.require_subcommand(1);

    Common common;
    for (const auto& name : io::experiment_names()) {
        auto* sub = cli.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", common.config, "run configuration (.yaml, .yml or .json)")->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--seed", common.seed, "seed, overrides the config");
        sub->add_option("--threads", common.threads, "worker threads (default: PATHLAB_THREADS or all cores)");
        sub->callback([name, &common] { std::exit(run_experiment(name, common)); });
    }

    app::AcceptanceOptions acc;
    std::string report;
    int threads = 0;
    std::vector<int> only;
    auto* verify = cli.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--threads", threads, "worker threads (default: PATHLAB_THREADS or all cores)");
    verify->add_option("--tighten", acc.tighten, "divide every tolerance by this factor")->capture_default_str();
    verify->add_option("--only", only, "criterion ids to run, e.g. --only 7,9")->delimiter(',');
    verify->add_option("--out", report, "write the report as JSON to this directory");
    verify->callback([&] {
        acc.threads = pathlab::resolve_threads(threads);
        acc.only = {only.begin(), only.end()};
        if (!report.empty()) acc.scratch = std::filesystem::path(report) / "scratch";
        bool ok = true;
        nlohmann::json rows = nlohmann::json::array();
        app::run_acceptance(acc, [&](const app::CriterionResult& r) {
            std::cout << app::format_line(r) << std::endl;
            ok = ok && r.pass;
            rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"known_red", r.known_red},
                            {"detail", r.detail}, {"seconds", r.seconds}, {"budget_seconds", r.budget}});
        });
        if (!report.empty()) {
            std::filesystem::create_directories(report);
            std::ofstream(std::filesystem::path(report) / "acceptance.json") << rows.dump(2) << "\n";
        }
        std::exit(ok ? 0 : 1);
    });

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e);
    }
    return 0;
}
