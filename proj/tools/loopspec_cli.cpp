// Command-line front end: run named experiments from a JSON configuration,
// list the catalog, or validate a configuration against the schema.
//
// Exit status: 0 all declared claims pass, 1 at least one measured-claim
// failure, 2 configuration or infeasibility error.
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "loopspec/experiments.hpp"

namespace {

loopspec::Json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw loopspec::ConfigError("cannot open config file: " + path);
    loopspec::Json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw loopspec::ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loopspec: spectral toolkit for a magnetic Schrodinger operator with a delta loop"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int workers = 1;
    bool strict = false;

    auto* run = app.add_subcommand("run", "execute an experiment from a JSON config");
    run->add_option("config", config_path, "configuration file")->required();
    run->add_option("--out", out_dir, "output directory for artifacts");
    run->add_option("--workers", workers, "worker threads for sweep points");
    run->add_flag("--strict", strict, "treat unverified enclosure flags as failures");

    auto* list = app.add_subcommand("list", "list available experiments");

    auto* validate = app.add_subcommand("validate", "check a config against the schema");
    validate->add_option("config", config_path, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& e : loopspec::list_experiments()) {
                std::cout << e.name << " - " << e.description << "\n  required keys:";
                for (const auto& k : e.required_keys) std::cout << " " << k;
                std::cout << "\n";
            }
            return 0;
        }
        if (validate->parsed()) {
            loopspec::validate_config(load_json(config_path));
            std::cout << "config ok\n";
            return 0;
        }
        // run
        const auto t0 = std::chrono::steady_clock::now();
        const loopspec::Json config = load_json(config_path);
        loopspec::validate_config(config);
        const loopspec::RunReport rep = loopspec::run_experiment(config, out_dir, workers, strict);

        std::filesystem::create_directories(out_dir);
        {
            std::ofstream rj(std::filesystem::path(out_dir) / "report.json");
            rj << loopspec::report_to_json(rep).dump(2) << "\n";
        }
        {
            std::ofstream log(std::filesystem::path(out_dir) / "run.log");
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            log << "experiment: " << rep.experiment << "\n";
            log << "input_digest: " << rep.input_digest << "\n";
            log << "wall_ms: " << ms << "\n";
            for (const auto& c : rep.claims)
                log << "claim " << c.name << ": " << c.status
                    << (std::isfinite(c.value) ? " (" + std::to_string(c.value) + ")" : "") << "\n";
        }
        for (const auto& c : rep.claims) std::cout << c.name << ": " << c.status << "\n";
        return rep.exit_code(strict);
    } catch (const loopspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
