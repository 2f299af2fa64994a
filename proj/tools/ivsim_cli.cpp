// Command-line entry point: single runs, Monte Carlo suites, controller
// comparisons and config validation.
#include "ivsim/eval.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

ivsim::ScenarioConfig load_or_default(const std::string& path, bool quiet) {
    std::vector<std::string> warnings;
    ivsim::ScenarioConfig cfg;
    if (!path.empty()) {
        cfg = ivsim::load_config_file(path, &warnings);
    } else {
        cfg.target.p0 = ivsim::Vec3(0.0, 25.0, 1.0);
        cfg.target.law = ivsim::StaticModel{};
    }
    if (!quiet) {
        for (const auto& w : warnings) {
            std::cerr << "warning: " << w << "\n";
        }
    }
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vision-guided multicopter interception simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string controller = "proposed";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int runs = 50;
    int jobs = 1;
    bool quiet = false;

    const auto add_common = [&](CLI::App* cmd, bool with_runs) {
        cmd->add_option("--config", config_path, "Scenario config JSON file");
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--controller", controller, "Guidance law: proposed | pg")
            ->check(CLI::IsMember({"proposed", "pg"}));
        cmd->add_option("--seed", seed, "Override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_flag("--quiet", quiet, "Suppress console summaries");
        if (with_runs) {
            cmd->add_option("--runs", runs, "Number of Monte Carlo runs")
                ->check(CLI::PositiveNumber);
        }
    };

    CLI::App* cmd_run = app.add_subcommand("run", "Run one engagement");
    add_common(cmd_run, false);
    CLI::App* cmd_mc = app.add_subcommand("montecarlo", "Run a randomized static-target suite");
    add_common(cmd_mc, true);
    CLI::App* cmd_cmp =
        app.add_subcommand("compare", "Proposed vs pursuit on the moving-target scenarios");
    add_common(cmd_cmp, false);
    CLI::App* cmd_val = app.add_subcommand("validate-config", "Check a scenario config file");
    cmd_val->add_option("--config", config_path, "Scenario config JSON file")->required();
    cmd_val->add_flag("--quiet", quiet, "Suppress the normalized config dump");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_val->parsed()) {
            std::vector<std::string> warnings;
            const ivsim::ScenarioConfig cfg = ivsim::load_config_file(config_path, &warnings);
            for (const auto& w : warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            if (!quiet) {
                std::cout << ivsim::config_to_json(cfg);
            }
            return 0;
        }

        ivsim::ScenarioConfig cfg = load_or_default(config_path, quiet);
        if (seed_set) {
            cfg.seed = seed;
        }
        cfg.controller = ivsim::controller_from_string(controller);
        fs::create_directories(out_dir);

        if (cmd_run->parsed()) {
            const ivsim::RunResult res = ivsim::run_scenario(cfg);
            write_text(fs::path(out_dir) / "summary.json", ivsim::summary_to_json(res.summary));
            ivsim::write_records_csv((fs::path(out_dir) / "steps.csv").string(), res.records);
            if (!quiet) {
                std::cout << ivsim::summary_to_json(res.summary);
            }
            return 0;
        }

        if (cmd_mc->parsed()) {
            ivsim::MonteCarloSpec spec;
            spec.base = cfg;
            spec.runs = runs;
            spec.controller = cfg.controller;
            spec.seed = cfg.seed;
            std::vector<std::vector<ivsim::StepRecord>> records;
            const ivsim::MonteCarloReport rep = ivsim::montecarlo(spec, jobs, &records);
            write_text(fs::path(out_dir) / "report.json", ivsim::report_to_json(rep));
            const fs::path run_dir = fs::path(out_dir) / "runs";
            fs::create_directories(run_dir);
            for (std::size_t i = 0; i < records.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof(name), "run_%03zu.csv", i);
                ivsim::write_records_csv((run_dir / name).string(), records[i]);
            }
            if (!quiet) {
                std::printf("runs=%d cep=%.4g m success=%.1f%%\n", runs, rep.cep,
                            100.0 * rep.success_rate);
            }
            return 0;
        }

        if (cmd_cmp->parsed()) {
            const auto rows = ivsim::compare_table(ivsim::moving_target_scenarios(cfg));
            write_text(fs::path(out_dir) / "compare.json", ivsim::compare_to_json(rows));
            write_text(fs::path(out_dir) / "compare.csv", ivsim::compare_to_csv(rows));
            if (!quiet) {
                std::cout << ivsim::compare_to_csv(rows);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
