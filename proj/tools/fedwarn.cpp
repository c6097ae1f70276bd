// Command-line front end: run one scenario, sweep endorser counts, or verify
// an exported chain. Exit codes: 0 success, 1 failed verification, 2 bad
// configuration or usage, 3 runtime invariant violation.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedwarn/fedwarn.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::string& seed_str, const std::string& mode_str) {
    fedwarn::scenario::ScenarioConfig cfg = fedwarn::scenario::load_scenario(scenario_path);
    if (!seed_str.empty()) {
        cfg.seed = std::stoull(seed_str);
    }
    if (!mode_str.empty()) {
        cfg.mode = fedwarn::scenario::parse_mode(mode_str, "mode");
    }
    fedwarn::sim::RunOutputs out = fedwarn::sim::run_scenario(cfg);
    out.write(out_dir);
    std::printf("run complete: %zu traces, %zu warnings, mode=%s, out=%s\n",
                out.traces.size(), out.warnings.size(),
                fedwarn::scenario::to_string(out.mode).c_str(), out_dir.c_str());
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& out_dir,
              const std::vector<std::uint64_t>& endorsers) {
    fedwarn::scenario::ScenarioConfig cfg = fedwarn::scenario::load_scenario(scenario_path);
    fedwarn::sim::SweepResult result = fedwarn::sim::latency_sweep(cfg, endorsers);
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        result.runs[i].write(
            (fs::path(out_dir) / ("endorsers-" + std::to_string(endorsers[i]))).string());
    }
    const fs::path sweep_path = fs::path(out_dir) / "sweep.csv";
    std::ofstream sweep_file(sweep_path, std::ios::binary | std::ios::trunc);
    if (!sweep_file) {
        throw fedwarn::Error("cannot open " + sweep_path.string() + " for writing");
    }
    sweep_file << result.table.csv();
    std::printf("sweep complete: slope %.9g s/peer, intercept %.9g s, out=%s\n",
                result.table.slope_s_per_peer, result.table.intercept_s, out_dir.c_str());
    return kExitOk;
}

int cmd_verify(const std::string& chain_path) {
    fedwarn::chainio::ChainDocument doc = fedwarn::chainio::load_chain(chain_path);
    if (fedwarn::chainio::verify_document(doc)) {
        std::printf("chain OK: %zu blocks verify\n", doc.blocks.size());
        return kExitOk;
    }
    std::printf("chain verification FAILED\n");
    return kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DLT-backed epidemic telemetry simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::string seed_str;
    std::string mode_str;
    std::string chain_path;
    std::vector<std::uint64_t> endorsers;

    CLI::App* run = app.add_subcommand("run", "Run one scenario end to end");
    run->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seed", seed_str, "Override the scenario seed");
    run->add_option("--mode", mode_str, "Override the mode (dlt|conventional)");

    CLI::App* sweep = app.add_subcommand("sweep", "Latency sweep over endorser counts");
    sweep->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
    sweep->add_option("--endorsers", endorsers, "Endorser counts, e.g. 1,2,3,4")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* verify = app.add_subcommand("verify", "Verify an exported chain");
    verify->add_option("--chain", chain_path, "chain.ndjson file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand(run)) {
            return cmd_run(scenario_path, out_dir, seed_str, mode_str);
        }
        if (app.got_subcommand(sweep)) {
            return cmd_sweep(scenario_path, out_dir, endorsers);
        }
        return cmd_verify(chain_path);
    } catch (const fedwarn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    }
}
