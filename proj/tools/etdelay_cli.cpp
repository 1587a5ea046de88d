// etdelay: design, simulate and report on event-triggered controllers for
// linear time-delay systems.
//
//   etdelay design   --scenario example2-fig2
//   etdelay simulate --config my.json --out results --step 0.005
//   etdelay report   --scenario example1
//   etdelay scenario list
//   etdelay scenario dump example1 > example1.json

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "etdelay/config.hpp"
#include "etdelay/error.hpp"
#include "etdelay/output.hpp"
#include "etdelay/pipeline.hpp"
#include "etdelay/scenarios.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct RunOptions {
    std::string config_path;
    std::string scenario;
    std::string out_dir;
    std::optional<double> step;
    std::optional<double> horizon;
};

enum class Command { Design, Simulate, Report };

etdelay::ScenarioConfig resolve_config(const RunOptions& opts) {
    if (opts.config_path.empty() == opts.scenario.empty()) {
        throw etdelay::ConfigError("", "pass exactly one of --config or --scenario");
    }
    etdelay::ScenarioConfig cfg = opts.config_path.empty()
                                      ? etdelay::builtin_scenario(opts.scenario)
                                      : etdelay::load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
    if (opts.step) cfg.sim.step = *opts.step;
    if (opts.horizon) cfg.sim.horizon = *opts.horizon;
    etdelay::validate_config(cfg);
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& what,
                const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw etdelay::ConfigError("output.dir", "cannot write " + what + " to " + path.string());
    body(os);
}

int run(Command command, const RunOptions& opts) {
    etdelay::ScenarioConfig cfg;
    try {
        cfg = resolve_config(opts);
    } catch (const etdelay::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto sys = etdelay::build_system(cfg);
        std::optional<etdelay::SimConfig> sim;
        if (command != Command::Design) sim = cfg.sim;
        const auto report = etdelay::design_controller(sys, cfg.synthesis, cfg.trigger,
                                                       etdelay::build_mode(cfg), sim);
        const std::string text = etdelay::format_report(cfg.name, report, command != Command::Design);
        std::cout << text;

        const std::filesystem::path dir(cfg.output.dir);
        std::filesystem::create_directories(dir);
        write_file(dir / cfg.output.report, "report", [&](std::ostream& os) { os << text; });
        if (command == Command::Simulate && report.sim) {
            write_file(dir / cfg.output.trajectory, "trajectory",
                       [&](std::ostream& os) { etdelay::write_trajectory_csv(os, *report.sim); });
            write_file(dir / cfg.output.events, "events",
                       [&](std::ostream& os) { etdelay::write_events_csv(os, *report.sim); });
        }
        if (report.sim && report.sim->aborted) return kExitNumeric;
    } catch (const etdelay::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const etdelay::InputError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const etdelay::ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const etdelay::Error& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}

void add_run_options(CLI::App* sub, RunOptions& opts) {
    sub->add_option("--config", opts.config_path, "JSON scenario file");
    sub->add_option("--scenario", opts.scenario, "built-in scenario name");
    sub->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--step", opts.step, "integration step override");
    sub->add_option("--horizon", opts.horizon, "simulation horizon override");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered stabilization of linear time-delay systems"};
    app.require_subcommand(1);

    RunOptions design_opts, simulate_opts, report_opts;
    auto* design = app.add_subcommand("design", "synthesize or verify a controller and print the design report");
    add_run_options(design, design_opts);
    auto* simulate = app.add_subcommand("simulate", "design, simulate, and write trajectory/event CSVs");
    add_run_options(simulate, simulate_opts);
    auto* report = app.add_subcommand("report", "design and simulate, print a combined summary");
    add_run_options(report, report_opts);

    auto* scenario = app.add_subcommand("scenario", "inspect built-in scenarios");
    scenario->require_subcommand(1);
    auto* list = scenario->add_subcommand("list", "list built-in scenario names");
    std::string dump_name;
    auto* dump = scenario->add_subcommand("dump", "print a built-in scenario as JSON");
    dump->add_option("name", dump_name, "scenario name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*design) return run(Command::Design, design_opts);
    if (*simulate) return run(Command::Simulate, simulate_opts);
    if (*report) return run(Command::Report, report_opts);
    if (*list) {
        for (const auto& name : etdelay::builtin_scenario_names()) std::cout << name << '\n';
        return 0;
    }
    if (*dump) {
        try {
            std::cout << etdelay::config_to_json_text(etdelay::builtin_scenario(dump_name));
        } catch (const etdelay::Error& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        return 0;
    }
    return kExitConfig;
}
