// Command-line front end.  All computation goes through the C API of the
// shared library; this file only handles argument parsing, config plumbing
// and file output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "otrisk/otrisk.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitSelfTest = 4;

struct CommandOptions {
    std::string config_path;
    std::string out_base;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_paths;
};

/// The --n-paths override maps onto the replication-count key of the command.
const char* sample_count_key(const std::string& command) {
    if (command == "verify-duality") {
        return "count";
    }
    if (command == "calibrate") {
        return "replications";
    }
    return "n_paths";
}

int run_command(const std::string& command, const CommandOptions& opts) {
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) {
            std::cerr << "error: cannot open config file '" << opts.config_path << "'\n";
            return kExitBadConfig;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            config = nlohmann::ordered_json::parse(buf.str());
        } catch (const std::exception& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return kExitBadConfig;
        }
        if (!config.is_object()) {
            std::cerr << "error: config must be a JSON object\n";
            return kExitBadConfig;
        }
    }
    if (opts.seed) {
        config["seed"] = *opts.seed;
    }
    if (opts.n_paths) {
        config[sample_count_key(command)] = *opts.n_paths;
    }

    char* report = nullptr;
    char* csv = nullptr;
    const otk_status status =
        otk_run_experiment(command.c_str(), config.dump().c_str(), &report, &csv);
    if (status != OTK_OK) {
        std::cerr << "error: " << otk_last_error() << "\n";
        return (status == OTK_INVALID_INPUT || status == OTK_PARSE_ERROR) ? kExitBadConfig
                                                                          : kExitSolver;
    }

    int exit_code = kExitOk;
    const std::string report_text = report;
    const std::string csv_text = csv ? csv : "";
    otk_string_free(report);
    otk_string_free(csv);

    // Self-test commands flag threshold violations in the report.
    try {
        const auto parsed = nlohmann::json::parse(report_text);
        if (parsed.contains("results") && parsed["results"].contains("all_ok") &&
            parsed["results"]["all_ok"].is_boolean() &&
            !parsed["results"]["all_ok"].get<bool>()) {
            std::cerr << "self-test failed: see the report for per-case diagnostics\n";
            exit_code = kExitSelfTest;
        }
    } catch (const std::exception&) {
        // The report is produced by the library; leave it to the caller as-is.
    }

    if (opts.out_base.empty()) {
        std::cout << report_text;
    } else {
        const std::string json_path = opts.out_base + ".json";
        std::ofstream out(json_path);
        out << report_text;
        if (!out) {
            std::cerr << "error: cannot write '" << json_path << "'\n";
            return kExitSolver;
        }
        out.close();
        if (!csv_text.empty()) {
            const std::string csv_path = opts.out_base + ".csv";
            std::ofstream cout_file(csv_path);
            cout_file << csv_text;
            if (!cout_file) {
                std::cerr << "error: cannot write '" << csv_path << "'\n";
                return kExitSolver;
            }
        }
        std::cout << json_path << "\n";
    }
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("robust bounds over transport ambiguity sets (") +
                 otk_version() + ")"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"verify-duality", "solve finite instances both ways and check the duality gap"},
        {"ruin1d", "robust ruin probabilities for the one-dimensional surrogate"},
        {"ruin2d", "required capital against worst-case two-line ruin"},
        {"reinsurance", "optimize the retained fraction under ambiguity"},
        {"calibrate", "estimate the ambiguity radius by path coupling"},
    };

    std::vector<CommandOptions> opts(commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, commands[i].second);
        sub->add_option("--config", opts[i].config_path, "JSON configuration file");
        sub->add_option("--out", opts[i].out_base,
                        "output base path (writes <out>.json and <out>.csv)");
        sub->add_option("--seed", opts[i].seed, "override the master seed");
        sub->add_option("--n-paths", opts[i].n_paths,
                        "override the sample/replication count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadConfig;
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (app.got_subcommand(commands[i].first)) {
            return run_command(commands[i].first, opts[i]);
        }
    }
    std::cerr << "error: no command given\n";
    return kExitBadConfig;
}
