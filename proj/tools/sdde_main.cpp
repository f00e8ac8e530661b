// Command-line front end: sdde <subcommand> --config FILE [--out DIR], or sdde --list.
// Exit status: 0 pass, 1 tolerance failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "sdde/config.hpp"
#include "sdde/errors.hpp"
#include "sdde/experiments.hpp"

#ifndef SDDE_CONFIG_DIR
#define SDDE_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace {

std::string config_dir() {
    if (const char* env = std::getenv("SDDE_CONFIG_DIR")) return env;
    return SDDE_CONFIG_DIR;
}

int list_configs() {
    std::vector<fs::path> files;
    const fs::path dir = config_dir();
    if (fs::is_directory(dir))
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::string description;
        try {
            description = sdde::load_config(f.string()).description;
        } catch (const std::exception& e) {
            description = std::string("invalid: ") + e.what();
        }
        std::cout << f.filename().string() << "\t" << description << "\n";
    }
    return 0;
}

void append_records(const fs::path& path, const std::vector<std::string>& records) {
    std::ofstream out(path, std::ios::app);
    for (const auto& r : records) {
        out << r << "\n";
        std::cout << r << "\n";
    }
}

std::string error_record(const std::string& sub, const std::string& kind, const std::string& what, int code) {
    return nlohmann::json{{"subcommand", sub}, {"error", kind}, {"message", what}, {"exit", code}, {"pass", false}}
        .dump();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulator for second-order equations with state-dependent delay"};
    std::string subcommand, config_path, out_dir = "out";
    bool list = false;
    app.add_option("subcommand", subcommand, "simulate | energy-check | dissipativity | quasi-stability | lipschitz | "
                                             "residual | ode-stability | attractor-dim | attraction-rate | convergence");
    app.add_option("--config", config_path, "experiment configuration (JSON)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_flag("--list", list, "list bundled configurations");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (list) return list_configs();

    if (subcommand.empty() || !sdde::is_subcommand(subcommand)) {
        std::cerr << "unknown or missing subcommand '" << subcommand << "'\n" << app.help();
        return 2;
    }
    if (config_path.empty()) {
        std::cerr << "--config is required\n";
        return 2;
    }
    const fs::path log = fs::path(out_dir) / (subcommand + ".jsonl");
    try {
        fs::create_directories(out_dir);
        fs::remove(log);
        const auto cfg = sdde::load_config(config_path);
        const auto result = sdde::run_experiment(subcommand, cfg, out_dir);
        append_records(log, result.records);
        return result.pass ? 0 : 1;
    } catch (const sdde::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        append_records(log, {error_record(subcommand, "config", e.what(), 2)});
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        append_records(log, {error_record(subcommand, "runtime", e.what(), 1)});
        return 1;
    }
}
