// Acceptance gate. Each criterion below re-checks one shipped guarantee end
// to end against an independent oracle and prints a single [PASS]/[FAIL]
// line; the exit status is the number of failures. Tolerances are pinned
// here, next to the check they bound.

#include <fedwarn/fedwarn.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

using namespace fedwarn;
namespace sim = fedwarn::sim;
namespace scenario = fedwarn::scenario;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++g_failures;
    }
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// One device firing 1000 messages: no queueing between transactions, so the
// measured mean is an unbiased estimate of the closed-form latency.
scenario::ScenarioConfig sweep_base() {
    scenario::ScenarioConfig cfg;
    cfg.seed = 2024;
    cfg.mode = scenario::RunMode::Dlt;
    cfg.n_peers = 4;
    cfg.message_period_s = 60.0;
    cfg.n_messages = 1000;
    cfg.aggregation_window_s = 600.0;
    scenario::RegionConfig r;
    r.region_id = "r";
    r.population = 10000.0;
    r.n_devices = 1;
    cfg.regions.push_back(r);
    cfg.privacy.noise_scale = 0.0;
    cfg.privacy.secret = "acceptance";
    return cfg;
}

// Same expected legs as the default calibration (0.09/0.06/0.10), sampled
// instead of constant.
net::LatencyModel stochastic_latency() {
    net::LatencyModel m = net::LatencyModel::defaults();
    m.uplink = net::DelayDistribution::shifted_exponential(0.04, 0.05);
    m.downlink = net::DelayDistribution::uniform(0.03, 0.09);
    m.endorse_proc = net::DelayDistribution::shifted_exponential(0.06, 0.04);
    return m;
}

// ---- criterion 4 helpers ----------------------------------------------

struct FlatChain {
    ledger::EndorsementPolicy policy;
    ledger::PeerRegistry registry;
    std::vector<KeyPair> peers;
    std::vector<ledger::Block> blocks;
    std::string scheme;
};

FlatChain build_reference_chain(std::size_t n_blocks) {
    FlatChain fc;
    fc.policy = ledger::EndorsementPolicy{1};
    for (std::uint64_t i = 0; i < 4; ++i) {
        KeyPair kp = generate_keypair(9000 + i);
        fc.registry[kp.peer_id] = kp.public_key;
        fc.peers.push_back(std::move(kp));
    }
    ledger::Ledger lg(fc.policy, fc.registry);
    const ledger::CutPolicy cut{1, 0.0};
    for (std::size_t i = 1; i < n_blocks; ++i) {
        auto proposal = ledger::TransactionProposal::make(
            "dev-" + std::to_string(i % 7),
            to_bytes("reading-" + std::to_string(i)), static_cast<double>(i));
        ledger::EndorsedTransaction tx;
        tx.endorsements.push_back(
            ledger::endorse(proposal, fc.peers[i % fc.peers.size()], lg));
        tx.proposal = std::move(proposal);
        auto block =
            ledger::cut_block({tx}, lg.tip(), static_cast<double>(i), cut);
        lg.validate_and_commit(*block);
    }
    fc.blocks = lg.chain();
    fc.scheme = lg.scheme();
    return fc;
}

struct ByteSpan {
    std::uint8_t* data;
    std::size_t len;
};

// Every byte the block actually stores, so a random flip can land anywhere.
void collect_spans(ledger::Block& b, std::vector<ByteSpan>& spans) {
    spans.push_back({reinterpret_cast<std::uint8_t*>(&b.height), sizeof(b.height)});
    spans.push_back({b.prev_hash.data(), b.prev_hash.size()});
    spans.push_back({b.block_hash.data(), b.block_hash.size()});
    spans.push_back({reinterpret_cast<std::uint8_t*>(&b.cut_at), sizeof(b.cut_at)});
    for (auto& tx : b.txs) {
        spans.push_back({tx.proposal.tx_id.data(), tx.proposal.tx_id.size()});
        spans.push_back(
            {reinterpret_cast<std::uint8_t*>(tx.proposal.device_pseudonym.data()),
             tx.proposal.device_pseudonym.size()});
        spans.push_back({tx.proposal.payload.data(), tx.proposal.payload.size()});
        spans.push_back({reinterpret_cast<std::uint8_t*>(&tx.proposal.created_at),
                         sizeof(tx.proposal.created_at)});
        for (auto& e : tx.endorsements) {
            spans.push_back({e.tx_id.data(), e.tx_id.size()});
            spans.push_back({reinterpret_cast<std::uint8_t*>(e.peer_id.data()),
                             e.peer_id.size()});
            spans.push_back({e.signature.data(), e.signature.size()});
        }
    }
}

// ---- criterion 7 helpers ----------------------------------------------

epi::RegionCompartments fixed_prevalence_region(double population, double prevalence) {
    epi::RegionCompartments c;
    c.region_id = "r";
    c.S = population * (1.0 - prevalence);
    c.I = population * prevalence;
    return c;
}

// One aggregation window of the reporting pipeline: sample, window, obfuscate.
telemetry::RegionAggregate
window_aggregate(const epi::RegionCompartments& region, std::uint64_t epoch,
                 std::size_t n_devices, double noise_scale,
                 const telemetry::SymptomModel& model, const Bytes& secret,
                 Rng& symptoms, Rng& noise) {
    std::vector<std::string> devices;
    devices.reserve(n_devices);
    for (std::size_t d = 0; d < n_devices; ++d) {
        devices.push_back("d" + std::to_string(d));
    }
    const double w = 600.0;
    const auto readings = telemetry::generate_readings(
        region, devices, model, epoch, secret, static_cast<double>(epoch) * w,
        symptoms);
    return telemetry::aggregate_region(readings, model, region.region_id,
                                       static_cast<double>(epoch) * w,
                                       static_cast<double>(epoch + 1) * w,
                                       noise_scale, noise);
}

// ---- criteria ----------------------------------------------------------

void criterion_1_2_3() {
    // Criterion 1: fitted slope over n in {1..4}, >= 1000 messages per point.
    // Constant delays must hit 0.25 s/peer to 1e-9; stochastic delays with
    // the same expected legs must land within 5%. Each point under 30 s.
    sim::SweepResult res_const;
    sim::SweepResult res_sto;
    double const_s = 0.0, sto_s = 0.0;
    scenario::ScenarioConfig sto = sweep_base();
    sto.latency = stochastic_latency();
    try {
        auto t0 = std::chrono::steady_clock::now();
        res_const = sim::latency_sweep(sweep_base(), {1, 2, 3, 4});
        const_s = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        res_sto = sim::latency_sweep(sto, {1, 2, 3, 4});
        sto_s = seconds_since(t0);
    } catch (const std::exception& e) {
        report(1, false, std::string("sweep failed: ") + e.what());
        report(2, false, "skipped: sweep failed");
        report(3, false, "skipped: sweep failed");
        return;
    }

    const double slope_c = res_const.table.slope_s_per_peer;
    const double slope_s = res_sto.table.slope_s_per_peer;
    const double per_point_s = std::max(const_s, sto_s) / 4.0;
    const bool c1 = std::abs(slope_c - 0.25) <= 1e-9 &&
                    std::abs(slope_s - 0.25) <= 0.05 * 0.25 &&
                    per_point_s < 30.0;
    report(1, c1,
           fmt("latency slope %.12f s/peer constant (|err| <= 1e-9), %.6f "
               "stochastic (within 5%%), %.2f s/point",
               slope_c, slope_s, per_point_s));

    // Criterion 2: mean DLT e2e strictly above the conventional path for
    // every endorser count, same scenario.
    try {
        scenario::ScenarioConfig conv = sto;
        conv.mode = scenario::RunMode::Conventional;
        const sim::RunOutputs out = sim::run_scenario(conv);
        double conv_sum = 0.0;
        for (const auto& tr : out.traces) {
            conv_sum += tr.e2e_s;
        }
        const double conv_mean = conv_sum / static_cast<double>(out.traces.size());
        double min_dlt = res_sto.table.rows[0].mean_e2e_s;
        bool all_above = true;
        for (const auto& row : res_sto.table.rows) {
            min_dlt = std::min(min_dlt, row.mean_e2e_s);
            all_above = all_above && row.mean_e2e_s > conv_mean;
        }
        report(2, all_above,
               fmt("min DLT mean %.4f s > conventional mean %.4f s across n=1..4",
                   min_dlt, conv_mean));
    } catch (const std::exception& e) {
        report(2, false, std::string("conventional run failed: ") + e.what());
    }

    // Criterion 3: measured means against the closed-form oracle, within
    // three standard errors over 1000 transactions per point.
    bool c3 = true;
    double worst_z = 0.0;
    for (const auto& row : res_sto.table.rows) {
        const double expected =
            net::expected_dlt_e2e(sto.latency, static_cast<int>(row.n_endorsers));
        const double se =
            row.sd_e2e_s / std::sqrt(static_cast<double>(row.n_txs));
        const double z = se > 0.0 ? std::abs(row.mean_e2e_s - expected) / se
                                  : (row.mean_e2e_s == expected ? 0.0 : 1e9);
        worst_z = std::max(worst_z, z);
        c3 = c3 && z <= 3.0 && row.n_txs == 1000;
    }
    report(3, c3, fmt("DES mean vs expected_dlt_e2e, worst |z| = %.2f <= 3 over "
                      "1000 txs per point", worst_z));
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        FlatChain fc = build_reference_chain(100);
        ledger::Ledger clean(fc.policy, fc.registry, fc.scheme, fc.blocks);
        if (!ledger::verify_chain(clean)) {
            report(4, false, "clean 100-block chain failed verify_chain");
            return;
        }

        // Replay: re-submitting an already committed transaction must come
        // back rejected and leave the chain verifiable.
        const ledger::EndorsedTransaction replayed = fc.blocks[1].txs[0];
        auto block = ledger::cut_block({replayed}, clean.tip(), 1e6,
                                       ledger::CutPolicy{1, 0.0});
        const ledger::CommitResult res = clean.validate_and_commit(*block);
        const bool replay_rejected = res.accepted_tx_ids.empty() &&
                                     res.rejected_tx_ids.size() == 1 &&
                                     res.rejected_tx_ids[0] == replayed.proposal.tx_id &&
                                     ledger::verify_chain(clean);

        // 1000 random single-bit mutations over every stored field; each
        // must flip verify_chain to false.
        Rng rng(derive_stream_seed(4242, "mutate"));
        std::size_t undetected = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<ledger::Block> blocks = fc.blocks;
            auto& b = blocks[static_cast<std::size_t>(rng.below(blocks.size()))];
            std::vector<ByteSpan> spans;
            collect_spans(b, spans);
            const auto& span = spans[static_cast<std::size_t>(rng.below(spans.size()))];
            const std::size_t byte = static_cast<std::size_t>(rng.below(span.len));
            span.data[byte] ^= static_cast<std::uint8_t>(1u << rng.below(8));
            ledger::Ledger mutated(fc.policy, fc.registry, fc.scheme,
                                   std::move(blocks));
            if (ledger::verify_chain(mutated)) {
                ++undetected;
            }
        }
        const double elapsed = seconds_since(t0);
        const bool ok = replay_rejected && undetected == 0 && elapsed < 10.0;
        report(4, ok,
               fmt("100-block chain verifies, %zu/1000 bit flips undetected, "
                   "replay rejected=%s, %.2f s < 10 s",
                   undetected, replay_rejected ? "yes" : "no", elapsed));
    } catch (const std::exception& e) {
        report(4, false, std::string("integrity suite failed: ") + e.what());
    }
}

void criterion_5() {
    try {
        // Hand-computed Euler step, exact to 1e-12.
        epi::RegionCompartments r0;
        r0.region_id = "r";
        r0.S = 990;
        r0.I = 10;
        const auto r1 = epi::seir_step(r0, epi::EpidemicParams{0.5, 0.2, 0.1, 1.0, false});
        const bool hand = std::abs(r1.S - 985.05) < 1e-12 &&
                          std::abs(r1.E - 4.95) < 1e-12 &&
                          std::abs(r1.I - 9.0) < 1e-12 && std::abs(r1.R - 1.0) < 1e-12;

        // Conservation over 1e4 coupled steps.
        epi::MetapopulationState st;
        epi::RegionCompartments a, b, c;
        a.region_id = "a"; a.S = 5000; a.E = 10; a.I = 5;
        b.region_id = "b"; b.S = 3000; b.I = 1;
        c.region_id = "c"; c.S = 2000;
        st.regions = {a, b, c};
        st.mobility = epi::MobilityMatrix::zero(3);
        st.mobility.m[0][1] = 0.05;
        st.mobility.m[1][0] = 0.02;
        st.mobility.m[1][2] = 0.03;
        st.mobility.m[2][0] = 0.01;
        const epi::EpidemicParams p{0.5, 0.2, 0.1, 0.25, false};
        const double total0 = epi::total_population(st);
        for (int i = 0; i < 10000; ++i) {
            st = epi::step(st, p);
        }
        const double drift = std::abs(epi::total_population(st) - total0) / total0;

        // beta = 0: susceptibles frozen, E drains, R accumulates.
        bool monotone = true;
        {
            const epi::EpidemicParams z{0.0, 0.2, 0.1, 0.5, false};
            epi::RegionCompartments m;
            m.region_id = "m";
            m.S = 500; m.E = 40; m.I = 10;
            double prev_e = m.E, prev_r = m.R;
            for (int i = 0; i < 200; ++i) {
                m = epi::seir_step(m, z);
                monotone = monotone && m.S == 500.0 && m.E <= prev_e && m.R >= prev_r;
                prev_e = m.E;
                prev_r = m.R;
            }
        }

        // First-order convergence: halving dt roughly halves the error
        // against a dt = 1e-3 oracle.
        const auto integrate = [](double dt) {
            const epi::EpidemicParams q{0.5, 0.2, 0.1, dt, false};
            epi::RegionCompartments x;
            x.region_id = "x";
            x.S = 9990; x.I = 10;
            const int steps = static_cast<int>(std::round(10.0 / dt));
            for (int i = 0; i < steps; ++i) {
                x = epi::seir_step(x, q);
            }
            return x;
        };
        const auto l1 = [](const epi::RegionCompartments& u, const epi::RegionCompartments& v) {
            return std::abs(u.S - v.S) + std::abs(u.E - v.E) + std::abs(u.I - v.I) +
                   std::abs(u.R - v.R);
        };
        const auto oracle = integrate(0.001);
        const double ratio = l1(integrate(0.1), oracle) / l1(integrate(0.05), oracle);
        const bool converges = ratio > 1.7 && ratio < 2.3;

        report(5, hand && drift <= 1e-9 && monotone && converges,
               fmt("hand step exact, conservation drift %.2e <= 1e-9 over 1e4 "
                   "steps, beta=0 monotone, dt ratio %.3f in 2.0+-0.3",
                   drift, ratio));
    } catch (const std::exception& e) {
        report(5, false, std::string("SEIR suite failed: ") + e.what());
    }
}

void criterion_6() {
    try {
        // Fixed truth: 50 fevered of 200 reports. Mean absolute error of the
        // reported fraction must grow (weakly) with the noise scale.
        telemetry::SymptomModel model;
        std::vector<telemetry::DeviceReading> readings(200);
        for (std::size_t i = 0; i < readings.size(); ++i) {
            readings[i].device_pseudonym = "p" + std::to_string(i);
            readings[i].region_id = "r";
            readings[i].temp_c = i < 50 ? 39.0 : 36.5;
        }
        const double truth = 50.0 / 200.0;
        const std::vector<double> scales{0.0, 1.0, 2.0, 5.0, 10.0};
        std::vector<double> mae;
        Rng rng(derive_stream_seed(606, "privacy"));
        for (const double s : scales) {
            double sum = 0.0;
            for (int trial = 0; trial < 1000; ++trial) {
                const auto agg = telemetry::aggregate_region(readings, model, "r",
                                                             0.0, 600.0, s, rng);
                sum += std::abs(agg.fever_fraction - truth);
            }
            mae.push_back(sum / 1000.0);
        }
        bool ok = mae[0] == 0.0;
        for (std::size_t i = 1; i < mae.size(); ++i) {
            ok = ok && mae[i] >= mae[i - 1];
        }
        report(6, ok,
               fmt("MAE by scale {0,1,2,5,10} = {%.4f, %.4f, %.4f, %.4f, %.4f} "
                   "nondecreasing, scale 0 exact",
                   mae[0], mae[1], mae[2], mae[3], mae[4]));
    } catch (const std::exception& e) {
        report(6, false, std::string("privacy suite failed: ") + e.what());
    }
}

void criterion_7() {
    try {
        const telemetry::SymptomModel model;
        const Bytes secret = to_bytes("c7-secret");
        const fed::DetectorConfig detector; // 5x watch, 20x alert, 10 reports
        const double baseline = model.healthy_fever_rate();

        // (a) Prevalence steps from 0 to 0.2 between windows; an alert must
        // land within two windows in at least 99 of 100 seeded runs.
        int detected = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng symptoms(derive_stream_seed(seed, "c7-symptoms"));
            Rng noise(derive_stream_seed(seed, "c7-noise"));
            const auto quiet = fixed_prevalence_region(10000.0, 0.0);
            const auto outbreak = fixed_prevalence_region(10000.0, 0.2);
            (void)window_aggregate(quiet, 0, 50, 1.0, model, secret, symptoms, noise);
            bool alerted = false;
            for (std::uint64_t epoch = 1; epoch <= 2 && !alerted; ++epoch) {
                const auto agg = window_aggregate(outbreak, epoch, 50, 1.0, model,
                                                  secret, symptoms, noise);
                const auto w = fed::detect_anomaly(agg, baseline, detector, {},
                                                   agg.window_end);
                alerted = w.has_value() && w->severity == fed::Severity::Alert;
            }
            detected += alerted ? 1 : 0;
        }

        // Full-pipeline spot check: a hot region must raise an alert whose
        // cited transactions the end-of-run audit verifies on-chain.
        scenario::ScenarioConfig cfg = sweep_base();
        cfg.seed = 77;
        cfg.message_period_s = 30.0;
        cfg.n_messages = 20;
        cfg.regions[0].population = 1000.0;
        cfg.regions[0].initial_infectious = 200.0;
        cfg.regions[0].n_devices = 20;
        const sim::RunOutputs out = sim::run_scenario(cfg);
        bool integrated = false;
        for (const auto& w : out.warnings) {
            integrated = integrated || (w.severity == fed::Severity::Alert &&
                                        !w.source_tx_ids.empty());
        }

        // (b) Prevalence pinned at zero, noise off: the alert rate over 50
        // healthy reports must match the binomial tail within 3 sigma.
        const double p_fp = baseline;
        const double q = 1.0 - p_fp;
        // Alert needs fever_fraction >= 20 * baseline = 0.027, i.e. >= 2 of 50.
        const double tail =
            1.0 - std::pow(q, 50) - 50.0 * p_fp * std::pow(q, 49);
        const int trials = 20000;
        Rng symptoms(derive_stream_seed(7001, "c7-null-symptoms"));
        Rng noise(derive_stream_seed(7001, "c7-null-noise"));
        const auto healthy = fixed_prevalence_region(10000.0, 0.0);
        int alerts = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const auto agg =
                window_aggregate(healthy, static_cast<std::uint64_t>(trial), 50,
                                 0.0, model, secret, symptoms, noise);
            const auto w =
                fed::detect_anomaly(agg, baseline, detector, {}, agg.window_end);
            if (w.has_value() && w->severity == fed::Severity::Alert) {
                ++alerts;
            }
        }
        const double expect = trials * tail;
        const double sigma = std::sqrt(trials * tail * (1.0 - tail));
        const bool null_ok = std::abs(alerts - expect) <= 3.0 * sigma;

        report(7, detected >= 99 && integrated && null_ok,
               fmt("step alert in %d/100 runs (>=99), pipeline alert on-chain=%s, "
                   "false alerts %d vs %.1f expected (3 sigma = %.1f)",
                   detected, integrated ? "yes" : "no", alerts, expect,
                   3.0 * sigma));
    } catch (const std::exception& e) {
        report(7, false, std::string("warning pipeline failed: ") + e.what());
    }
}

void criterion_8() {
    try {
        scenario::ScenarioConfig cfg;
        cfg.seed = 31337;
        cfg.mode = scenario::RunMode::Dlt;
        cfg.n_endorsers = 2;
        cfg.n_peers = 5;
        cfg.message_period_s = 45.0;
        cfg.n_messages = 40;
        cfg.aggregation_window_s = 540.0;
        scenario::RegionConfig a, b;
        a.region_id = "a";
        a.population = 5000.0;
        a.initial_infectious = 50.0;
        a.n_devices = 6;
        b.region_id = "b";
        b.population = 3000.0;
        b.initial_exposed = 20.0;
        b.n_devices = 4;
        cfg.regions = {a, b};
        cfg.mobility = {{0.0, 0.02}, {0.01, 0.0}};
        cfg.latency = stochastic_latency();
        cfg.cut_policy = ledger::CutPolicy{3, 2.0};
        cfg.escalation.regional_k = 1;
        cfg.privacy.noise_scale = 1.5;
        cfg.privacy.secret = "c8";
        scenario::SeedInfection si;
        si.t_days = 0.02;
        si.region_id = "b";
        si.count = 25.0;
        cfg.seed_infections.push_back(si);

        const sim::RunOutputs x = sim::run_scenario(cfg);
        const sim::RunOutputs y = sim::run_scenario(cfg);
        const bool same = x.traces_csv() == y.traces_csv() &&
                          x.epidemic_csv() == y.epidemic_csv() &&
                          x.aggregates_csv() == y.aggregates_csv() &&
                          x.warnings_csv() == y.warnings_csv() &&
                          x.credits_csv() == y.credits_csv() &&
                          x.status_csv() == y.status_csv() &&
                          x.chain_ndjson == y.chain_ndjson;
        report(8, same && !x.chain_ndjson.empty(),
               fmt("two seed-%llu runs byte-identical across 6 CSVs and the "
                   "%zu-byte chain export",
                   static_cast<unsigned long long>(cfg.seed),
                   x.chain_ndjson.size()));
    } catch (const std::exception& e) {
        report(8, false, std::string("determinism run failed: ") + e.what());
    }
}

} // namespace

int main() {
    criterion_1_2_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
    } else {
        std::printf("all 8 criteria passed\n");
    }
    return g_failures;
}
