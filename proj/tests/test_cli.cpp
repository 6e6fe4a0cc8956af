// End-to-end tests of the command-line binary: spawn it, capture exit codes
// and output files, and check the documented contract (exit 0/2/3/4, --out
// file layout, stdout report, flag overrides).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

using njson = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

RunResult run_cli(const std::string& args) {
    const std::string out_path = "cli_stdout.tmp";
    const std::string err_path = "cli_stderr.tmp";
    const std::string cmd = std::string("\"") + OTRISK_CLI_PATH + "\" " + args + " > " +
                            out_path + " 2> " + err_path;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

} // namespace

TEST_CASE("help lists the subcommands") {
    const RunResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verify-duality") != std::string::npos);
    CHECK(r.out.find("reinsurance") != std::string::npos);
    CHECK(r.out.find("calibrate") != std::string::npos);
}

TEST_CASE("verify-duality writes the report and csv next to --out") {
    write_file("cli_vd_cfg.json", R"({"n": 4, "count": 3, "seed": 5})");
    const RunResult r = run_cli("verify-duality --config cli_vd_cfg.json --out cli_vd_out");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "cli_vd_out.json\n");
    REQUIRE(file_exists("cli_vd_out.json"));
    REQUIRE(file_exists("cli_vd_out.csv"));

    const njson report = njson::parse(slurp("cli_vd_out.json"));
    CHECK(report.at("schema") == "otrisk/v1");
    CHECK(report.at("command") == "verify-duality");
    CHECK(report.at("config").at("n") == 4);
    CHECK(report.at("config").at("seed") == 5);
    CHECK(report.at("results").at("all_ok") == true);

    const std::string csv = slurp("cli_vd_out.csv");
    CHECK(csv.rfind("case,delta,primal,dual,gap\n", 0) == 0);

    std::remove("cli_vd_cfg.json");
    std::remove("cli_vd_out.json");
    std::remove("cli_vd_out.csv");
}

TEST_CASE("without --out the report goes to stdout and reruns are identical") {
    write_file("cli_std_cfg.json", R"({"n": 3, "count": 2, "seed": 8})");
    const RunResult first = run_cli("verify-duality --config cli_std_cfg.json");
    const RunResult second = run_cli("verify-duality --config cli_std_cfg.json");
    std::remove("cli_std_cfg.json");
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    const njson report = njson::parse(first.out);
    CHECK(report.at("command") == "verify-duality");
    CHECK(report.at("config").at("count") == 2);
}

TEST_CASE("seed and sample-count flags override the config") {
    write_file("cli_ov_cfg.json", R"({"n": 3, "count": 2, "seed": 8})");
    const RunResult r =
        run_cli("verify-duality --config cli_ov_cfg.json --seed 42 --n-paths 7");
    std::remove("cli_ov_cfg.json");
    CHECK(r.exit_code == 0);
    const njson report = njson::parse(r.out);
    CHECK(report.at("config").at("seed") == 42);
    CHECK(report.at("config").at("count") == 7); // --n-paths maps to the case count

    // For the calibration command the same flag controls the replications.
    write_file("cli_cal_cfg.json",
               R"({"claims": {"kind": "fixed", "value": 1.0},
                   "model": {"horizon": 1, "m1": 1, "m2": 1}, "grid_step": 0.05})");
    const RunResult cal = run_cli("calibrate --config cli_cal_cfg.json --n-paths 3");
    std::remove("cli_cal_cfg.json");
    CHECK(cal.exit_code == 0);
    const njson cal_report = njson::parse(cal.out);
    CHECK(cal_report.at("config").at("replications") == 3);
    CHECK(cal_report.at("results").at("n") == 3);
}

TEST_CASE("configuration problems exit with code 2") {
    const RunResult missing = run_cli("verify-duality --config cli_no_such_file.json");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("cannot open") != std::string::npos);

    write_file("cli_bad_json.json", "{nope");
    const RunResult bad_json = run_cli("verify-duality --config cli_bad_json.json");
    std::remove("cli_bad_json.json");
    CHECK(bad_json.exit_code == 2);
    CHECK(bad_json.err.find("not valid JSON") != std::string::npos);

    write_file("cli_bad_key.json", R"({"wat": 1})");
    const RunResult bad_key = run_cli("verify-duality --config cli_bad_key.json");
    std::remove("cli_bad_key.json");
    CHECK(bad_key.exit_code == 2);
    CHECK(bad_key.err.find("unknown key") != std::string::npos);

    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("").exit_code == 2); // a subcommand is required
}

TEST_CASE("numeric failures after config validation exit with code 3") {
    // A claim far below the embedding grid step cannot be resolved by the
    // random walk; the library reports it as a runtime failure, not a config
    // problem.
    write_file("cli_res_cfg.json",
               R"({"claims": {"kind": "fixed", "value": 1e-10},
                   "model": {"horizon": 1, "m1": 1, "m2": 1},
                   "replications": 2, "grid_step": 0.05})");
    const RunResult r = run_cli("calibrate --config cli_res_cfg.json");
    std::remove("cli_res_cfg.json");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("self-test threshold violations exit with code 4 yet write the report") {
    // An impossible gap tolerance turns finite floating-point noise into
    // failures; the report must still be produced for diagnosis.
    write_file("cli_strict_cfg.json",
               R"({"n": 8, "count": 10, "seed": 1, "gap_tol": 1e-18})");
    const RunResult r =
        run_cli("verify-duality --config cli_strict_cfg.json --out cli_strict_out");
    std::remove("cli_strict_cfg.json");
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("self-test failed") != std::string::npos);
    REQUIRE(file_exists("cli_strict_out.json"));
    const njson report = njson::parse(slurp("cli_strict_out.json"));
    CHECK(report.at("results").at("all_ok") == false);
    std::remove("cli_strict_out.json");
    std::remove("cli_strict_out.csv");
}

TEST_CASE("ruin1d emits the documented csv columns") {
    write_file("cli_r1_cfg.json",
               R"({"u_values": [5, 10], "delta": 0.2, "n_paths": 32, "n_steps": 32,
                   "seed": 2, "model": {"horizon": 4}})");
    const RunResult r = run_cli("ruin1d --config cli_r1_cfg.json --out cli_r1_out");
    std::remove("cli_r1_cfg.json");
    CHECK(r.exit_code == 0);
    REQUIRE(file_exists("cli_r1_out.csv"));
    const std::string csv = slurp("cli_r1_out.csv");
    CHECK(csv.rfind("u,psi_B,u_tilde,psi_rob\n", 0) == 0);
    const njson report = njson::parse(slurp("cli_r1_out.json"));
    CHECK(report.at("results").at("rows").size() == 2);
    std::remove("cli_r1_out.json");
    std::remove("cli_r1_out.csv");
}
