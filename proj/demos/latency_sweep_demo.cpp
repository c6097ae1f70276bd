// Minimal end-to-end demo: sweep the endorser count on a one-device scenario
// with the default latency calibration and print the fitted line.

#include <cstdio>

#include "fedwarn/fedwarn.hpp"

int main() {
    using namespace fedwarn;

    scenario::ScenarioConfig cfg;
    cfg.seed = 7;
    cfg.n_peers = 6;
    cfg.n_messages = 1000;
    cfg.message_period_s = 60.0;
    cfg.aggregation_window_s = 600.0;
    cfg.regions.push_back({"metro", 10000.0, 0.0, 5.0, 1});

    sim::SweepResult sweep = sim::latency_sweep(cfg, {1, 2, 3, 4});

    std::printf("%-10s %-8s %-12s %-12s\n", "endorsers", "txs", "mean_e2e_s", "sd_e2e_s");
    for (const auto& row : sweep.table.rows) {
        std::printf("%-10llu %-8llu %-12.6f %-12.6f\n",
                    static_cast<unsigned long long>(row.n_endorsers),
                    static_cast<unsigned long long>(row.n_txs), row.mean_e2e_s,
                    row.sd_e2e_s);
    }
    std::printf("fit: e2e ~= %.6f * n + %.6f (s)\n", sweep.table.slope_s_per_peer,
                sweep.table.intercept_s);

    const auto& baseline_cfg = cfg;
    scenario::ScenarioConfig conv = baseline_cfg;
    conv.mode = scenario::RunMode::Conventional;
    sim::RunOutputs out = sim::run_scenario(conv);
    double sum = 0.0;
    for (const auto& tr : out.traces) {
        sum += tr.e2e_s;
    }
    std::printf("conventional mean e2e: %.6f s over %zu messages\n",
                sum / static_cast<double>(out.traces.size()), out.traces.size());
    return 0;
}
