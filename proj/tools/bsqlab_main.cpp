// bsqlab command line: run / validate / report over the C API.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "bsqlab.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Canonical desk/heavy configurations of the nonhomogeneous experiment.
std::string preset_config(const std::string& name) {
    nlohmann::json j = {
        {"scenario", "nonhomogeneous"},
        {"box", {{"period_L", 2.0 * 3.14159265358979323846 * 16.0}, {"resolution_N", 32}}},
        {"gevrey_r", 1.0},
        {"seed", 1},
        {"output_dir", "out"},
        {"forces",
         {{"f", {{"amplitude", 1e-2}}}, {"g", {{"amplitude", 1e-2}}}, {"gvec", {{"amplitude", 1.0}}}}},
    };
    if (name == "heavy") {
        j["box"]["resolution_N"] = 64;
        j["evolution"] = {{"steps", 16}};
    } else if (name != "desk") {
        throw std::runtime_error("unknown preset '" + name + "' (expected desk or heavy)");
    }
    return j.dump();
}

int exit_code_of(bsq_status status) {
    switch (status) {
        case BSQ_OK: return 0;
        case BSQ_ERR_CONFIG: return kExitConfig;
        default: return kExitNumerical;
    }
}

void print_summary_checks(const std::string& summary_json) {
    const nlohmann::json summary = nlohmann::json::parse(summary_json);
    for (const auto& check : summary["checks"]) {
        std::cout << check["status"].get<std::string>() << " " << check["name"].get<std::string>();
        const std::string detail = check["detail"].get<std::string>();
        if (!detail.empty()) std::cout << "  " << detail;
        std::cout << "\n";
    }
    if (!summary["ok"].get<bool>()) {
        const std::string stage = summary["failing_stage"].get<std::string>();
        std::cout << "FAILED" << (stage.empty() ? "" : " at stage " + stage) << "\n";
    } else {
        std::cout << "OK\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bsqlab — stationary/evolution Boussinesq spectral laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset, report_dir;
    std::int64_t seed = -1;

    auto* run = app.add_subcommand("run", "execute a scenario and write its artifacts");
    run->add_option("--config", config_path, "scenario configuration (JSON)");
    run->add_option("--preset", preset, "built-in configuration: desk or heavy");
    run->add_option("--out", out_dir, "override output_dir");
    run->add_option("--seed", seed, "override the config seed");

    auto* validate = app.add_subcommand("validate", "check a configuration and print the canonical echo");
    validate->add_option("--config", config_path, "scenario configuration (JSON)")->required();

    auto* report = app.add_subcommand("report", "re-print the PASS/FAIL table of a finished run");
    report->add_option("--dir", report_dir, "output directory of a previous run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand(run)) {
            if (config_path.empty() == preset.empty()) {
                std::cerr << "run: provide exactly one of --config or --preset\n";
                return kExitConfig;
            }
            const std::string text = preset.empty() ? read_file(config_path) : preset_config(preset);
            char* summary = nullptr;
            const bsq_status status = bsq_run_scenario(text.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                                                       seed, &summary);
            if (summary != nullptr) {
                print_summary_checks(summary);
                bsq_string_free(summary);
            }
            if (status != BSQ_OK) std::cerr << "error: " << bsq_last_error() << "\n";
            return exit_code_of(status);
        }

        if (app.got_subcommand(validate)) {
            const std::string text = read_file(config_path);
            char* echo = nullptr;
            char* diagnostics = nullptr;
            const bsq_status status = bsq_validate_config(text.c_str(), &echo, &diagnostics);
            if (status == BSQ_OK) {
                std::cout << echo;
                bsq_string_free(echo);
                return 0;
            }
            if (diagnostics != nullptr) {
                std::cerr << diagnostics;
                bsq_string_free(diagnostics);
            } else {
                std::cerr << bsq_last_error() << "\n";
            }
            return exit_code_of(status);
        }

        if (app.got_subcommand(report)) {
            const std::string text = read_file(report_dir + "/summary.json");
            print_summary_checks(text);
            const nlohmann::json summary = nlohmann::json::parse(text);
            return summary["ok"].get<bool>() ? 0 : kExitNumerical;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
