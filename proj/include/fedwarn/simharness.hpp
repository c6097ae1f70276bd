#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedwarn/bytes.hpp"
#include "fedwarn/chain_io.hpp"
#include "fedwarn/csv.hpp"
#include "fedwarn/epidemic.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/events.hpp"
#include "fedwarn/federation.hpp"
#include "fedwarn/ledger.hpp"
#include "fedwarn/netmodel.hpp"
#include "fedwarn/rng.hpp"
#include "fedwarn/scenario.hpp"
#include "fedwarn/telemetry.hpp"

namespace fedwarn::sim {

struct TransactionTrace {
    std::string tx_id; // hex
    std::string device_pseudonym;
    std::uint64_t n_endorsers = 0; // 0 in conventional mode
    double t_send = 0.0;
    double t_commit_confirm = 0.0;
    double e2e_s = 0.0;
};

struct EpidemicRow {
    double t_days = 0.0;
    std::string region_id;
    double S = 0.0, E = 0.0, I = 0.0, R = 0.0;
};

struct AggregateRow {
    telemetry::RegionAggregate agg;
    std::uint64_t n_fever_true = 0; // simulation-side truth, never on-ledger
};

struct StatusRow {
    double t_s = 0.0;
    std::string node_id;
    fed::NodeLevel level = fed::NodeLevel::Edge;
    fed::NodeStatus status = fed::NodeStatus::Normal;
};

struct RunOutputs {
    scenario::RunMode mode = scenario::RunMode::Dlt;
    std::vector<TransactionTrace> traces;
    std::vector<EpidemicRow> epidemic;
    std::vector<AggregateRow> aggregates;
    std::vector<fed::WarningEvent> warnings;
    std::vector<StatusRow> statuses;
    fed::IncentiveAccounts credits;
    std::optional<ledger::Ledger> chain;  // dlt mode only
    std::string chain_ndjson;             // empty in conventional mode

    std::string traces_csv() const {
        csv::Table t({"tx_id", "device_pseudonym", "n_endorsers", "t_send",
                      "t_commit_confirm", "e2e_s"});
        for (const auto& r : traces) {
            t.cell(r.tx_id)
                .cell(r.device_pseudonym)
                .cell(r.n_endorsers)
                .cell(r.t_send)
                .cell(r.t_commit_confirm)
                .cell(r.e2e_s);
            t.end_row();
        }
        return t.str();
    }

    std::string epidemic_csv() const {
        csv::Table t({"t_days", "region_id", "S", "E", "I", "R"});
        for (const auto& r : epidemic) {
            t.cell(r.t_days).cell(r.region_id).cell(r.S).cell(r.E).cell(r.I).cell(r.R);
            t.end_row();
        }
        return t.str();
    }

    std::string aggregates_csv() const {
        csv::Table t({"region_id", "window_start_s", "window_end_s", "n_reports",
                      "n_fever_reported", "n_fever_true", "fever_fraction"});
        for (const auto& r : aggregates) {
            t.cell(r.agg.region_id)
                .cell(r.agg.window_start)
                .cell(r.agg.window_end)
                .cell(r.agg.n_reports)
                .cell(r.agg.n_fever)
                .cell(r.n_fever_true)
                .cell(r.agg.fever_fraction);
            t.end_row();
        }
        return t.str();
    }

    std::string warnings_csv() const {
        csv::Table t({"t_raised_s", "region_id", "severity", "metric", "baseline",
                      "source_tx_ids"});
        for (const auto& w : warnings) {
            std::string sources;
            for (std::size_t i = 0; i < w.source_tx_ids.size(); ++i) {
                if (i > 0) {
                    sources.push_back(';');
                }
                sources += w.source_tx_ids[i];
            }
            t.cell(w.t_raised)
                .cell(w.region_id)
                .cell(fed::to_string(w.severity))
                .cell(w.metric)
                .cell(w.baseline)
                .cell(sources);
            t.end_row();
        }
        return t.str();
    }

    std::string credits_csv() const {
        csv::Table t({"device_pseudonym", "credits"});
        for (const auto& [pseudonym, n] : credits) {
            t.cell(pseudonym).cell(n);
            t.end_row();
        }
        return t.str();
    }

    std::string status_csv() const {
        csv::Table t({"t_s", "node_id", "level", "status"});
        for (const auto& s : statuses) {
            t.cell(s.t_s).cell(s.node_id).cell(fed::to_string(s.level))
                .cell(fed::to_string(s.status));
            t.end_row();
        }
        return t.str();
    }

    /// Writes every artifact under dir (created if needed).
    void write(const std::string& dir) const {
        namespace fs = std::filesystem;
        fs::create_directories(dir);
        const auto put = [&](const std::string& name, const std::string& content) {
            const fs::path p = fs::path(dir) / name;
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw Error("cannot open " + p.string() + " for writing");
            }
            out << content;
            if (!out) {
                throw Error("failed writing " + p.string());
            }
        };
        put("traces.csv", traces_csv());
        put("epidemic.csv", epidemic_csv());
        put("aggregates.csv", aggregates_csv());
        put("warnings.csv", warnings_csv());
        put("credits.csv", credits_csv());
        put("status.csv", status_csv());
        if (mode == scenario::RunMode::Dlt) {
            put("chain.ndjson", chain_ndjson);
        }
    }
};

namespace detail {

struct DeviceSlot {
    std::string device_id;
    std::size_t region = 0;
};

struct InFlight {
    ledger::TransactionProposal proposal;
    std::vector<ledger::Endorsement> endorsements;
    std::vector<std::string> group; // endorser contact order
    double t_send = 0.0;
    bool is_aggregate = false;
};

/// One deterministic scenario execution. All randomness comes from four
/// purpose-bound streams derived from the master seed, so adding draws to one
/// consumer never shifts another.
class Simulation {
  public:
    explicit Simulation(scenario::ScenarioConfig cfg)
        : cfg_(std::move(cfg)),
          secret_(cfg_.privacy_secret()),
          delays_(derive_stream_seed(cfg_.seed, "delays")),
          symptoms_(derive_stream_seed(cfg_.seed, "symptoms")),
          select_(derive_stream_seed(cfg_.seed, "select")),
          noise_(derive_stream_seed(cfg_.seed, "noise")),
          tree_(fed::FederationTree::build(cfg_.effective_groups())),
          baseline_(cfg_.symptoms.healthy_fever_rate()) {
        cfg_.validate();
        window_s_ = cfg_.aggregation_window_s;
        const double t_last = static_cast<double>(cfg_.n_messages - 1) * cfg_.message_period_s;
        t_end_ = (std::floor(t_last / window_s_) + 1.0) * window_s_;
        setup_epidemic();
        if (cfg_.mode == scenario::RunMode::Dlt) {
            setup_ledger();
        }
        buffers_.resize(cfg_.regions.size());
        for (std::size_t r = 0; r < cfg_.regions.size(); ++r) {
            for (std::uint64_t d = 0; d < cfg_.regions[r].n_devices; ++d) {
                devices_.push_back(
                    {"dev-" + cfg_.regions[r].region_id + "-" + std::to_string(d), r});
            }
        }
    }

    RunOutputs run() {
        schedule_initial_events();
        emit_epidemic_rows();
        while (!queue_.empty()) {
            const des::Event e = queue_.next();
            dispatch(e);
        }
        finish();
        audit();
        RunOutputs out;
        out.mode = cfg_.mode;
        out.traces = std::move(traces_);
        out.epidemic = std::move(epidemic_rows_);
        out.aggregates = std::move(aggregate_rows_);
        out.warnings = std::move(warnings_);
        out.statuses = std::move(status_rows_);
        out.credits = std::move(credits_);
        if (ledger_) {
            out.chain_ndjson = chainio::export_chain(*ledger_);
            out.chain = std::move(ledger_);
        }
        return out;
    }

  private:
    void setup_epidemic() {
        state_.t = 0.0;
        for (const auto& rc : cfg_.regions) {
            epi::RegionCompartments c;
            c.region_id = rc.region_id;
            c.E = rc.initial_exposed;
            c.I = rc.initial_infectious;
            c.S = rc.population - rc.initial_exposed - rc.initial_infectious;
            c.R = 0.0;
            state_.regions.push_back(std::move(c));
            region_index_[rc.region_id] = state_.regions.size() - 1;
        }
        if (cfg_.mobility.empty()) {
            state_.mobility = epi::MobilityMatrix::zero(cfg_.regions.size());
        } else {
            state_.mobility = epi::MobilityMatrix{cfg_.mobility};
        }
        pending_seeds_ = cfg_.seed_infections;
        std::stable_sort(pending_seeds_.begin(), pending_seeds_.end(),
                         [](const auto& a, const auto& b) { return a.t_days < b.t_days; });
        apply_seeds(0.0);
    }

    void setup_ledger() {
        ledger::PeerRegistry registry;
        for (std::uint64_t i = 0; i < cfg_.n_peers; ++i) {
            KeyPair kp =
                generate_keypair(derive_stream_seed(cfg_.seed, "peer-" + std::to_string(i)));
            peer_ids_.push_back(kp.peer_id);
            registry[kp.peer_id] = kp.public_key;
            peers_.push_back(std::move(kp));
        }
        ledger::EndorsementPolicy policy{static_cast<std::size_t>(cfg_.n_endorsers)};
        ledger_.emplace(policy, std::move(registry));
        last_cut_ = ledger_->tip();
    }

    // Tie policy at equal times, fixed by init scheduling order: epidemic
    // state advances first, then windows close, then devices transmit, then
    // any same-time transaction-path events.
    void schedule_initial_events() {
        const double dt_s = cfg_.epidemic.dt * 86400.0;
        for (std::uint64_t k = 1; static_cast<double>(k) * dt_s <= t_end_ + 1e-9; ++k) {
            queue_.schedule(static_cast<double>(k) * dt_s, des::EventKind::EpidemicStep, {});
        }
        for (const auto& s : pending_seeds_) {
            des::EventPayload p;
            p.flagged = true; // seed injection, no integration
            queue_.schedule(s.t_days * 86400.0, des::EventKind::EpidemicStep, p);
        }
        for (std::uint64_t k = 1; static_cast<double>(k) * window_s_ <= t_end_ + 1e-9; ++k) {
            queue_.schedule(static_cast<double>(k) * window_s_,
                            des::EventKind::AggregationWindowClose, {});
        }
        for (std::size_t d = 0; d < devices_.size(); ++d) {
            des::EventPayload p;
            p.device_index = d;
            p.message_index = 0;
            queue_.schedule(0.0, des::EventKind::DeviceTransmit, p);
        }
    }

    void dispatch(const des::Event& e) {
        switch (e.kind) {
        case des::EventKind::DeviceTransmit: on_transmit(e); break;
        case des::EventKind::EndorseArrive: on_endorse_arrive(e); break;
        case des::EventKind::EndorseReturn: on_endorse_return(e); break;
        case des::EventKind::OrdererArrive: on_orderer_arrive(e); break;
        case des::EventKind::BlockCut: on_block_cut(e); break;
        case des::EventKind::ValidateDone: on_validate_done(e); break;
        case des::EventKind::ConfirmArrive: on_confirm_arrive(e); break;
        case des::EventKind::AggregationWindowClose: on_window_close(e); break;
        case des::EventKind::EpidemicStep: on_epidemic_step(e); break;
        }
    }

    std::uint64_t epoch_of(double t) const {
        return static_cast<std::uint64_t>(std::floor(t / window_s_));
    }

    void on_transmit(const des::Event& e) {
        const auto& dev = devices_[e.payload.device_index];
        const double t = e.t;
        const telemetry::DeviceReading reading =
            telemetry::sample_reading(dev.device_id, state_.regions[dev.region], t,
                                      cfg_.symptoms, epoch_of(t), secret_, symptoms_);
        buffers_[dev.region].push_back(reading);
        ++messages_sent_;

        if (cfg_.mode == scenario::RunMode::Conventional) {
            // Device -> edge server -> device, no ledger in the path.
            const double up = net::sample(cfg_.latency.uplink, delays_);
            const double proc = net::sample(cfg_.latency.edge_proc, delays_);
            const double down = net::sample(cfg_.latency.downlink, delays_);
            const std::size_t handle = inflight_.size();
            InFlight fl;
            fl.proposal = ledger::TransactionProposal::make(reading.device_pseudonym,
                                                            reading.serialize(), t);
            fl.t_send = t;
            inflight_.push_back(std::move(fl));
            des::EventPayload p;
            p.handle = handle;
            queue_.schedule(t + up + proc + down, des::EventKind::ConfirmArrive, p);
        } else {
            const std::size_t handle = inflight_.size();
            InFlight fl;
            fl.proposal = ledger::TransactionProposal::make(reading.device_pseudonym,
                                                            reading.serialize(), t);
            fl.group = ledger::select_endorsers(
                peer_ids_, static_cast<std::size_t>(cfg_.n_endorsers), select_);
            fl.t_send = t;
            inflight_.push_back(std::move(fl));
            tx_handle_[inflight_.back().proposal.tx_id] = handle;
            // Half-duplex radio: endorsements are collected one peer at a
            // time, each a full uplink + processing + downlink round trip.
            des::EventPayload p;
            p.handle = handle;
            p.leg = 0;
            queue_.schedule(t + net::sample(cfg_.latency.uplink, delays_),
                            des::EventKind::EndorseArrive, p);
        }

        if (e.payload.message_index + 1 < cfg_.n_messages) {
            des::EventPayload p;
            p.device_index = e.payload.device_index;
            p.message_index = e.payload.message_index + 1;
            queue_.schedule(t + cfg_.message_period_s, des::EventKind::DeviceTransmit, p);
        }
    }

    void on_endorse_arrive(const des::Event& e) {
        des::EventPayload p = e.payload;
        queue_.schedule(e.t + net::sample(cfg_.latency.endorse_proc, delays_),
                        des::EventKind::EndorseReturn, p);
    }

    void on_endorse_return(const des::Event& e) {
        InFlight& fl = inflight_[e.payload.handle];
        const std::string& peer_id = fl.group[e.payload.leg];
        fl.endorsements.push_back(
            ledger::endorse(fl.proposal, peer_by_id(peer_id), *ledger_));
        const double down = net::sample(cfg_.latency.downlink, delays_);
        const double up = net::sample(cfg_.latency.uplink, delays_);
        des::EventPayload p;
        p.handle = e.payload.handle;
        if (e.payload.leg + 1 < fl.group.size()) {
            p.leg = e.payload.leg + 1;
            queue_.schedule(e.t + down + up, des::EventKind::EndorseArrive, p);
        } else {
            queue_.schedule(e.t + down + up, des::EventKind::OrdererArrive, p);
        }
    }

    void on_orderer_arrive(const des::Event& e) {
        // Per-transaction ordering work, then the proposal joins the batch.
        des::EventPayload p;
        p.handle = e.payload.handle;
        p.flagged = true; // join (not a timeout check)
        queue_.schedule(e.t + net::sample(cfg_.latency.order_proc, delays_),
                        des::EventKind::BlockCut, p);
    }

    void on_block_cut(const des::Event& e) {
        if (e.payload.flagged) {
            const InFlight& fl = inflight_[e.payload.handle];
            pending_.push_back({fl.proposal, fl.endorsements});
        }
        auto block = ledger::cut_block(pending_, last_cut_, e.t, cfg_.cut_policy);
        if (block) {
            pending_.clear();
            last_cut_ = *block;
            validation_queue_.push_back(std::move(*block));
            if (!validator_busy_) {
                start_validation(e.t);
            }
        } else if (!pending_.empty() && cfg_.cut_policy.max_wait_s > 0.0) {
            double oldest = pending_.front().proposal.created_at;
            for (const auto& tx : pending_) {
                oldest = std::min(oldest, tx.proposal.created_at);
            }
            queue_.schedule(oldest + cfg_.cut_policy.max_wait_s, des::EventKind::BlockCut,
                            {});
        }
    }

    void start_validation(double now) {
        validator_busy_ = true;
        queue_.schedule(now + net::sample(cfg_.latency.validate_proc, delays_),
                        des::EventKind::ValidateDone, {});
    }

    void on_validate_done(const des::Event& e) {
        ledger::Block block = std::move(validation_queue_.front());
        validation_queue_.pop_front();
        const ledger::CommitResult result = ledger_->validate_and_commit(block);
        fed::credit_incentive(credits_, result, block);
        std::set<Digest> accepted(result.accepted_tx_ids.begin(),
                                  result.accepted_tx_ids.end());
        for (const auto& tx : block.txs) {
            const std::size_t handle = tx_handle_.at(tx.proposal.tx_id);
            const InFlight& fl = inflight_[handle];
            if (fl.is_aggregate) {
                if (accepted.count(tx.proposal.tx_id) > 0) {
                    detect_on_aggregate(
                        telemetry::RegionAggregate::deserialize(tx.proposal.payload),
                        {hex_encode(tx.proposal.tx_id)}, e.t);
                }
            } else {
                des::EventPayload p;
                p.handle = handle;
                queue_.schedule(e.t + net::sample(cfg_.latency.downlink, delays_),
                                des::EventKind::ConfirmArrive, p);
            }
        }
        if (!validation_queue_.empty()) {
            start_validation(e.t);
        } else {
            validator_busy_ = false;
        }
    }

    void on_confirm_arrive(const des::Event& e) {
        const InFlight& fl = inflight_[e.payload.handle];
        TransactionTrace tr;
        tr.tx_id = hex_encode(fl.proposal.tx_id);
        tr.device_pseudonym = fl.proposal.device_pseudonym;
        tr.n_endorsers =
            cfg_.mode == scenario::RunMode::Dlt ? cfg_.n_endorsers : 0;
        tr.t_send = fl.t_send;
        tr.t_commit_confirm = e.t;
        tr.e2e_s = e.t - fl.t_send;
        traces_.push_back(std::move(tr));
    }

    void on_window_close(const des::Event& e) {
        const double w_end = e.t;
        const double w_start = w_end - window_s_;
        // Status snapshot first: it reflects warnings raised since the last
        // close, i.e. detections on the previous window's aggregates.
        snapshot_status(w_end);
        for (std::size_t r = 0; r < state_.regions.size(); ++r) {
            auto& buffer = buffers_[r];
            const std::uint64_t true_fever =
                telemetry::count_fever(buffer, cfg_.symptoms.fever_threshold_c);
            telemetry::RegionAggregate agg = telemetry::aggregate_region(
                buffer, cfg_.symptoms, cfg_.regions[r].region_id, w_start, w_end,
                cfg_.privacy.noise_scale, noise_);
            buffer.clear();
            aggregate_rows_.push_back({agg, true_fever});
            if (agg.empty_window()) {
                continue;
            }
            if (cfg_.mode == scenario::RunMode::Conventional) {
                detect_on_aggregate(agg, {}, w_end);
            } else if (agg.n_reports >= cfg_.detector.min_reports) {
                // Windows under the detector's evidence floor are suppressed
                // downstream anyway; they stay off-chain (small windows are
                // also the easiest to deanonymize).
                submit_aggregate(agg, w_end);
            }
        }
    }

    // The edge publishes its windowed aggregate over the wired backhaul:
    // endorsements are gathered off-radio at the close instant, and the
    // transaction proceeds straight to ordering.
    void submit_aggregate(const telemetry::RegionAggregate& agg, double now) {
        const std::size_t handle = inflight_.size();
        InFlight fl;
        fl.proposal = ledger::TransactionProposal::make("edge-" + agg.region_id,
                                                        agg.serialize(), now);
        fl.group = ledger::select_endorsers(
            peer_ids_, static_cast<std::size_t>(cfg_.n_endorsers), select_);
        for (const auto& peer_id : fl.group) {
            fl.endorsements.push_back(
                ledger::endorse(fl.proposal, peer_by_id(peer_id), *ledger_));
        }
        fl.t_send = now;
        fl.is_aggregate = true;
        inflight_.push_back(std::move(fl));
        tx_handle_[inflight_.back().proposal.tx_id] = handle;
        des::EventPayload p;
        p.handle = handle;
        queue_.schedule(now, des::EventKind::OrdererArrive, p);
    }

    void detect_on_aggregate(const telemetry::RegionAggregate& agg,
                             std::vector<std::string> source_tx_ids, double t_raised) {
        auto warning = fed::detect_anomaly(agg, baseline_, cfg_.detector,
                                           std::move(source_tx_ids), t_raised);
        if (warning) {
            warnings_.push_back(*warning);
            fresh_warnings_.push_back(std::move(*warning));
        }
    }

    void snapshot_status(double t) {
        const auto status = fed::escalate(fresh_warnings_, tree_, cfg_.escalation);
        fresh_warnings_.clear();
        for (const auto& [node_id, st] : status) {
            status_rows_.push_back({t, node_id, tree_.node(node_id).level, st});
        }
    }

    void on_epidemic_step(const des::Event& e) {
        if (e.payload.flagged) {
            state_.t = e.t / 86400.0;
            apply_seeds(state_.t);
        } else {
            state_ = epi::step(state_, cfg_.epidemic);
        }
        emit_epidemic_rows();
    }

    // Moves seeded cases from S to I in their regions, exactly once, at the
    // first epidemic event at or after the configured time.
    void apply_seeds(double t_days) {
        while (next_seed_ < pending_seeds_.size() &&
               pending_seeds_[next_seed_].t_days <= t_days + 1e-12) {
            const auto& s = pending_seeds_[next_seed_];
            auto& c = state_.regions[region_index_.at(s.region_id)];
            const double moved = std::min(s.count, c.S);
            c.S -= moved;
            c.I += moved;
            ++next_seed_;
        }
    }

    void emit_epidemic_rows() {
        for (const auto& c : state_.regions) {
            epidemic_rows_.push_back({state_.t, c.region_id, c.S, c.E, c.I, c.R});
        }
    }

    const KeyPair& peer_by_id(const std::string& peer_id) const {
        for (const auto& kp : peers_) {
            if (kp.peer_id == peer_id) {
                return kp;
            }
        }
        throw Error("unknown peer " + peer_id);
    }

    void finish() {
        // Warnings raised after the last close (the final window's
        // aggregates) still need a status row.
        snapshot_status(queue_.now());
    }

    void audit() {
        const std::uint64_t expected_messages =
            static_cast<std::uint64_t>(devices_.size()) * cfg_.n_messages;
        if (messages_sent_ != expected_messages || traces_.size() != expected_messages) {
            throw AuditError("trace count " + std::to_string(traces_.size()) +
                             " does not match transmitted messages " +
                             std::to_string(expected_messages));
        }
        for (const auto& tr : traces_) {
            if (!(tr.e2e_s > 0.0)) {
                throw AuditError("non-positive e2e latency for tx " + tr.tx_id);
            }
        }
        if (cfg_.mode == scenario::RunMode::Conventional) {
            return;
        }
        if (!ledger::verify_chain(*ledger_)) {
            throw AuditError("chain verification failed at end of run");
        }
        if (!pending_.empty() || !validation_queue_.empty()) {
            throw AuditError("transactions left unordered at end of run");
        }
        // Credits must equal accepted-transaction counts recomputed from the
        // chain itself.
        fed::IncentiveAccounts recomputed;
        const auto flags = chainio::replay_flags(*ledger_);
        const auto& chain = ledger_->chain();
        for (std::size_t i = 0; i < chain.size(); ++i) {
            for (std::size_t t = 0; t < chain[i].txs.size(); ++t) {
                if (flags[i][t]) {
                    recomputed[chain[i].txs[t].proposal.device_pseudonym] += 1;
                }
            }
        }
        if (recomputed != credits_) {
            throw AuditError("incentive credits do not reconcile with the chain");
        }
        for (const auto& w : warnings_) {
            for (const auto& hex_id : w.source_tx_ids) {
                if (!ledger_->is_committed(digest_from_hex(hex_id))) {
                    throw AuditError("warning source tx " + hex_id + " is not committed");
                }
            }
        }
    }

    scenario::ScenarioConfig cfg_;
    Bytes secret_;
    Rng delays_;
    Rng symptoms_;
    Rng select_;
    Rng noise_;
    fed::FederationTree tree_;
    double baseline_ = 0.0;
    double window_s_ = 0.0;
    double t_end_ = 0.0;

    epi::MetapopulationState state_;
    std::map<std::string, std::size_t> region_index_;
    std::vector<scenario::SeedInfection> pending_seeds_;
    std::size_t next_seed_ = 0;

    std::vector<KeyPair> peers_;
    std::vector<std::string> peer_ids_;
    std::optional<ledger::Ledger> ledger_;
    ledger::Block last_cut_;

    std::vector<DeviceSlot> devices_;
    std::vector<std::vector<telemetry::DeviceReading>> buffers_;
    std::vector<InFlight> inflight_;
    std::map<Digest, std::size_t> tx_handle_;
    std::vector<ledger::EndorsedTransaction> pending_;
    std::deque<ledger::Block> validation_queue_;
    bool validator_busy_ = false;

    des::EventQueue queue_;
    std::uint64_t messages_sent_ = 0;

    std::vector<TransactionTrace> traces_;
    std::vector<EpidemicRow> epidemic_rows_;
    std::vector<AggregateRow> aggregate_rows_;
    std::vector<fed::WarningEvent> warnings_;
    std::vector<fed::WarningEvent> fresh_warnings_;
    std::vector<StatusRow> status_rows_;
    fed::IncentiveAccounts credits_;
};

} // namespace detail

inline RunOutputs run_scenario(const scenario::ScenarioConfig& cfg) {
    detail::Simulation sim(cfg);
    return sim.run();
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares; a single point fits a flat line through itself.
inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty()) {
        throw Error("fit_line needs matching nonempty samples");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

struct SweepRow {
    std::uint64_t n_endorsers = 0;
    std::uint64_t n_txs = 0;
    double mean_e2e_s = 0.0;
    double sd_e2e_s = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    double slope_s_per_peer = 0.0;
    double intercept_s = 0.0;

    std::string csv() const {
        csv::Table t({"n_endorsers", "n_txs", "mean_e2e_s", "sd_e2e_s",
                      "slope_s_per_peer", "intercept_s"});
        for (const auto& r : rows) {
            t.cell(r.n_endorsers)
                .cell(r.n_txs)
                .cell(r.mean_e2e_s)
                .cell(r.sd_e2e_s)
                .cell(slope_s_per_peer)
                .cell(intercept_s);
            t.end_row();
        }
        return t.str();
    }
};

struct SweepResult {
    SweepTable table;
    std::vector<RunOutputs> runs; // one per endorser count, same order
};

/// Runs the scenario once per endorser count with the same base seed (same
/// epidemic and symptom trajectory; only the endorsement path differs) and
/// fits mean end-to-end latency against the endorser count.
inline SweepResult latency_sweep(const scenario::ScenarioConfig& base,
                                 const std::vector<std::uint64_t>& endorser_range) {
    if (endorser_range.empty()) {
        throw ConfigError("endorsers", "sweep range must be nonempty");
    }
    std::uint64_t total_devices = 0;
    for (const auto& r : base.regions) {
        total_devices += r.n_devices;
    }
    if (total_devices * base.n_messages < 1000) {
        throw ConfigError("n_messages",
                          "sweep needs >= 1000 transactions per point; got " +
                              std::to_string(total_devices * base.n_messages));
    }
    SweepResult result;
    std::vector<double> xs, ys;
    for (const std::uint64_t n : endorser_range) {
        if (n < 1) {
            throw ConfigError("endorsers", "endorser counts must be >= 1");
        }
        scenario::ScenarioConfig cfg = base;
        cfg.mode = scenario::RunMode::Dlt;
        cfg.n_endorsers = n;
        if (cfg.n_peers < n) {
            throw ConfigError("n_peers", "must be >= every swept endorser count");
        }
        RunOutputs out = run_scenario(cfg);
        double sum = 0.0;
        for (const auto& tr : out.traces) {
            sum += tr.e2e_s;
        }
        const double mean = sum / static_cast<double>(out.traces.size());
        double ss = 0.0;
        for (const auto& tr : out.traces) {
            ss += (tr.e2e_s - mean) * (tr.e2e_s - mean);
        }
        const double sd = out.traces.size() > 1
                              ? std::sqrt(ss / static_cast<double>(out.traces.size() - 1))
                              : 0.0;
        result.table.rows.push_back(
            {n, static_cast<std::uint64_t>(out.traces.size()), mean, sd});
        xs.push_back(static_cast<double>(n));
        ys.push_back(mean);
        result.runs.push_back(std::move(out));
    }
    const LineFit fit = fit_line(xs, ys);
    result.table.slope_s_per_peer = fit.slope;
    result.table.intercept_s = fit.intercept;
    return result;
}

} // namespace fedwarn::sim
