// rislab: scenario-driven front end for the RIS analysis library.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rislab/acceptance.hpp"
#include "rislab/errors.hpp"
#include "rislab/result_table.hpp"
#include "rislab/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kIoError = 1, kConfigError = 2, kNumericalError = 3 };

struct RunOptions {
    std::string config;
    std::string out;
    std::string format;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

int run_workflow(rislab::Workflow workflow, const RunOptions& opt) {
    rislab::ScenarioConfig cfg;
    try {
        cfg = rislab::load_config(opt.config, workflow);
        if (opt.seed) rislab::override_seed(cfg, *opt.seed);
        if (!opt.out.empty()) cfg.out_dir = opt.out;
        if (!opt.format.empty()) {
            cfg.format = opt.format == "json" ? rislab::OutputFormat::Json : rislab::OutputFormat::Csv;
        }
    } catch (const rislab::ConfigurationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rislab::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    }

    try {
        auto table = rislab::run_scenario(cfg, opt.jobs);
        table.metadata.timestamp = rislab::utc_timestamp();
        for (const auto& path : rislab::emit(table, cfg.format, cfg.out_dir, cfg.stem)) {
            std::cout << path.string() << '\n';
        }
        return kOk;
    } catch (const rislab::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\nconfiguration:\n" << cfg.document.dump(2) << '\n';
        return kNumericalError;
    } catch (const rislab::ConfigurationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rislab::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rislab::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS channel, routing, overhead and estimation analysis"};
    app.require_subcommand(1);

    RunOptions opt;
    const std::pair<rislab::Workflow, const char*> workflows[] = {
        {rislab::Workflow::Coupling, "Eigenvalues of the array coupling matrix"},
        {rislab::Workflow::Scatter, "Far-field scattering, noise and interference of one load"},
        {rislab::Workflow::Bandwidth, "Fresnel size and fractional bandwidth limits"},
        {rislab::Workflow::Overhead, "Redirective vs reflective rate over the access gain"},
        {rislab::Workflow::Routing, "Multi-route load combination and per-route gain"},
        {rislab::Workflow::Estimate, "Retrodirective vs cascaded channel estimation MSE"},
    };
    std::optional<rislab::Workflow> chosen;
    for (const auto& [workflow, help] : workflows) {
        auto* sub = app.add_subcommand(std::string(rislab::workflow_name(workflow)), help);
        sub->add_option("--config", opt.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory (overrides the config)");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "Random seed (overrides the config)");
        sub->callback([&chosen, w = workflow] { chosen = w; });
    }

    rislab::AcceptanceOptions acceptance;
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest->add_option("--jobs", acceptance.jobs, "Worker threads")->check(CLI::PositiveNumber);
    selftest->add_option("--seed", acceptance.seed, "Monte-Carlo seed");
    selftest->add_option("--criteria", acceptance.criteria, "Subset of criteria to run")
        ->check(CLI::Range(1, rislab::kCriterionCount));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    if (*selftest) {
        const auto results = rislab::run_acceptance(acceptance, &std::cout);
        int failed = 0;
        for (const auto& r : results) failed += r.passed ? 0 : 1;
        std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
        return failed == 0 ? kOk : kIoError;
    }
    return run_workflow(*chosen, opt);
}
