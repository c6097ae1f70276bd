#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedwarn/bytes.hpp"
#include "fedwarn/rng.hpp"
#include "fedwarn/epidemic.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/federation.hpp"
#include "fedwarn/ledger.hpp"
#include "fedwarn/netmodel.hpp"
#include "fedwarn/telemetry.hpp"

namespace fedwarn::scenario {

enum class RunMode { Dlt, Conventional };

inline std::string to_string(RunMode m) {
    return m == RunMode::Dlt ? "dlt" : "conventional";
}

inline RunMode parse_mode(const std::string& s, const std::string& path) {
    if (s == "dlt") {
        return RunMode::Dlt;
    }
    if (s == "conventional") {
        return RunMode::Conventional;
    }
    throw ConfigError(path, "mode must be \"dlt\" or \"conventional\", got \"" + s + "\"");
}

struct RegionConfig {
    std::string region_id;
    double population = 0.0;
    double initial_exposed = 0.0;
    double initial_infectious = 0.0;
    std::uint64_t n_devices = 0;
};

// A one-off infection injection at a given simulation day.
struct SeedInfection {
    double t_days = 0.0;
    std::string region_id;
    double count = 0.0;
};

struct PrivacyConfig {
    double noise_scale = 1.0;
    std::string secret; // empty → derived from the run seed
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    RunMode mode = RunMode::Dlt;
    std::uint64_t n_endorsers = 2;
    std::uint64_t n_peers = 4;
    double message_period_s = 60.0;
    std::uint64_t n_messages = 1000;
    double aggregation_window_s = 600.0;

    std::vector<RegionConfig> regions;
    std::vector<std::vector<double>> mobility; // empty → zero matrix
    epi::EpidemicParams epidemic;              // dt in days
    telemetry::SymptomModel symptoms;
    net::LatencyModel latency = net::LatencyModel::defaults();
    fed::DetectorConfig detector;
    std::vector<std::vector<std::string>> regional_groups; // empty → one group of all
    fed::EscalationConfig escalation;
    ledger::CutPolicy cut_policy;
    PrivacyConfig privacy;
    std::vector<SeedInfection> seed_infections;

    void validate() const {
        if (regions.empty()) {
            throw ConfigError("regions", "at least one region required");
        }
        std::set<std::string> ids;
        for (std::size_t i = 0; i < regions.size(); ++i) {
            const auto& r = regions[i];
            const std::string path = "regions[" + std::to_string(i) + "]";
            if (r.region_id.empty()) {
                throw ConfigError(path + ".region_id", "must be nonempty");
            }
            if (!ids.insert(r.region_id).second) {
                throw ConfigError(path + ".region_id", "duplicate region " + r.region_id);
            }
            if (!(r.population > 0.0)) {
                throw ConfigError(path + ".population", "must be > 0");
            }
            if (r.initial_exposed < 0.0 || r.initial_infectious < 0.0) {
                throw ConfigError(path, "initial compartments must be >= 0");
            }
            if (r.initial_exposed + r.initial_infectious > r.population) {
                throw ConfigError(path, "initial exposed + infectious exceed population");
            }
        }
        if (mode == RunMode::Dlt) {
            if (n_endorsers < 1) {
                throw ConfigError("n_endorsers", "must be >= 1 in dlt mode");
            }
            if (n_peers < n_endorsers) {
                throw ConfigError("n_peers", "must be >= n_endorsers");
            }
        }
        if (!(message_period_s > 0.0)) {
            throw ConfigError("message_period_s", "must be > 0");
        }
        if (n_messages < 1) {
            throw ConfigError("n_messages", "must be >= 1");
        }
        if (!(aggregation_window_s > 0.0)) {
            throw ConfigError("aggregation_window_s", "must be > 0");
        }
        if (!mobility.empty()) {
            epi::MobilityMatrix mm{mobility};
            if (mm.m.size() != regions.size()) {
                throw ConfigError("mobility", "matrix order must equal number of regions");
            }
            mm.validate("mobility", epidemic.dt);
        }
        epidemic.validate("epidemic");
        symptoms.validate("symptoms");
        latency.validate("latency");
        detector.validate("detector");
        escalation.validate("federation");
        cut_policy.validate("cut_policy");
        if (privacy.noise_scale < 0.0) {
            throw ConfigError("privacy.noise_scale", "must be >= 0");
        }
        const double t_last = static_cast<double>(n_messages - 1) * message_period_s;
        const double horizon_s =
            (std::floor(t_last / aggregation_window_s) + 1.0) * aggregation_window_s;
        for (std::size_t i = 0; i < seed_infections.size(); ++i) {
            const auto& s = seed_infections[i];
            const std::string path = "seed_infections[" + std::to_string(i) + "]";
            if (s.t_days < 0.0) {
                throw ConfigError(path + ".t_days", "must be >= 0");
            }
            if (s.count < 0.0) {
                throw ConfigError(path + ".count", "must be >= 0");
            }
            if (s.t_days * 86400.0 > horizon_s) {
                throw ConfigError(path + ".t_days", "beyond the simulation horizon of " +
                                                        std::to_string(horizon_s) + " s");
            }
            if (ids.count(s.region_id) == 0) {
                throw ConfigError(path + ".region_id", "unknown region " + s.region_id);
            }
        }
        for (const auto& group : regional_groups) {
            for (const auto& region : group) {
                if (ids.count(region) == 0) {
                    throw ConfigError("federation.regional_groups",
                                      "unknown region " + region);
                }
            }
        }
    }

    // Groups as configured, or every region under one regional node.
    std::vector<std::vector<std::string>> effective_groups() const {
        if (!regional_groups.empty()) {
            return regional_groups;
        }
        std::vector<std::string> all;
        all.reserve(regions.size());
        for (const auto& r : regions) {
            all.push_back(r.region_id);
        }
        return {all};
    }

    Bytes privacy_secret() const {
        if (!privacy.secret.empty()) {
            return to_bytes(privacy.secret);
        }
        // Default secret derived from the seed: runs stay reproducible
        // without forcing a key into every scenario file.
        std::uint64_t s = derive_stream_seed(seed, "privacy-secret");
        Bytes out;
        out.reserve(32);
        for (int i = 0; i < 4; ++i) {
            put_u64_be(out, splitmix64(s));
        }
        return out;
    }
};

namespace detail {

using nlohmann::json;

// Strict field reader: every consumed key is recorded, and after parsing an
// object the caller rejects anything left over. Typos in scenario files fail
// loudly instead of silently falling back to defaults.
class ObjectReader {
  public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    bool has(const std::string& key) {
        if (j_.contains(key)) {
            seen_.insert(key);
            return true;
        }
        return false;
    }

    const json& at(const std::string& key) {
        if (!j_.contains(key)) {
            throw ConfigError(path_ + "." + key, "missing required key");
        }
        seen_.insert(key);
        return j_.at(key);
    }

    std::string child_path(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (seen_.count(it.key()) == 0) {
                throw ConfigError(path_ + "." + it.key(), "unknown key");
            }
        }
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline double get_double(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    return v.get<double>();
}

inline std::uint64_t get_u64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) {
        throw ConfigError(path, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) {
        throw ConfigError(path, "expected a boolean");
    }
    return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return v.get<std::string>();
}

inline net::DelayDistribution parse_delay(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    net::DelayDistribution d;
    const std::string kind = get_string(r.at("kind"), r.child_path("kind"));
    if (kind == "constant") {
        d = net::DelayDistribution::constant(get_double(r.at("value"), r.child_path("value")));
    } else if (kind == "uniform") {
        d = net::DelayDistribution::uniform(get_double(r.at("lo"), r.child_path("lo")),
                                            get_double(r.at("hi"), r.child_path("hi")));
    } else if (kind == "shifted_exponential") {
        d = net::DelayDistribution::shifted_exponential(
            get_double(r.at("shift"), r.child_path("shift")),
            get_double(r.at("mean"), r.child_path("mean")));
    } else {
        throw ConfigError(path + ".kind",
                          "must be constant, uniform, or shifted_exponential");
    }
    r.finish();
    d.validate(path);
    return d;
}

inline void parse_latency(const json& j, const std::string& path, net::LatencyModel& m) {
    ObjectReader r(j, path);
    struct Slot {
        const char* key;
        net::DelayDistribution* dist;
    };
    const Slot slots[] = {
        {"uplink", &m.uplink},         {"downlink", &m.downlink},
        {"endorse_proc", &m.endorse_proc}, {"order_proc", &m.order_proc},
        {"validate_proc", &m.validate_proc}, {"edge_proc", &m.edge_proc},
    };
    for (const auto& s : slots) {
        if (r.has(s.key)) {
            *s.dist = parse_delay(r.at(s.key), r.child_path(s.key));
        }
    }
    r.finish();
}

inline void parse_epidemic(const json& j, const std::string& path, epi::EpidemicParams& p) {
    ObjectReader r(j, path);
    if (r.has("beta")) p.beta = get_double(r.at("beta"), r.child_path("beta"));
    if (r.has("sigma")) p.sigma = get_double(r.at("sigma"), r.child_path("sigma"));
    if (r.has("gamma")) p.gamma = get_double(r.at("gamma"), r.child_path("gamma"));
    if (r.has("dt_days")) p.dt = get_double(r.at("dt_days"), r.child_path("dt_days"));
    if (r.has("sir_mode")) p.sir_mode = get_bool(r.at("sir_mode"), r.child_path("sir_mode"));
    r.finish();
}

inline void parse_symptoms(const json& j, const std::string& path,
                           telemetry::SymptomModel& m) {
    ObjectReader r(j, path);
    struct Slot {
        const char* key;
        double* value;
    };
    const Slot slots[] = {
        {"healthy_temp_mean", &m.healthy_temp_mean},
        {"healthy_temp_sd", &m.healthy_temp_sd},
        {"infected_temp_mean", &m.infected_temp_mean},
        {"infected_temp_sd", &m.infected_temp_sd},
        {"healthy_spo2_mean", &m.healthy_spo2_mean},
        {"healthy_spo2_sd", &m.healthy_spo2_sd},
        {"infected_spo2_mean", &m.infected_spo2_mean},
        {"infected_spo2_sd", &m.infected_spo2_sd},
        {"healthy_hr_mean", &m.healthy_hr_mean},
        {"healthy_hr_sd", &m.healthy_hr_sd},
        {"infected_hr_mean", &m.infected_hr_mean},
        {"infected_hr_sd", &m.infected_hr_sd},
        {"symptomatic_fraction", &m.symptomatic_fraction},
        {"fever_threshold_c", &m.fever_threshold_c},
    };
    for (const auto& s : slots) {
        if (r.has(s.key)) {
            *s.value = get_double(r.at(s.key), r.child_path(s.key));
        }
    }
    r.finish();
}

inline RegionConfig parse_region(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    RegionConfig rc;
    rc.region_id = get_string(r.at("region_id"), r.child_path("region_id"));
    rc.population = get_double(r.at("population"), r.child_path("population"));
    if (r.has("initial_exposed")) {
        rc.initial_exposed = get_double(r.at("initial_exposed"),
                                        r.child_path("initial_exposed"));
    }
    if (r.has("initial_infectious")) {
        rc.initial_infectious = get_double(r.at("initial_infectious"),
                                           r.child_path("initial_infectious"));
    }
    rc.n_devices = get_u64(r.at("n_devices"), r.child_path("n_devices"));
    r.finish();
    return rc;
}

inline ScenarioConfig parse(const json& j) {
    ObjectReader r(j, "scenario");
    ScenarioConfig cfg;
    if (r.has("seed")) cfg.seed = get_u64(r.at("seed"), "scenario.seed");
    if (r.has("mode")) {
        cfg.mode = parse_mode(get_string(r.at("mode"), "scenario.mode"), "scenario.mode");
    }
    if (r.has("n_endorsers")) {
        cfg.n_endorsers = get_u64(r.at("n_endorsers"), "scenario.n_endorsers");
    }
    if (r.has("n_peers")) cfg.n_peers = get_u64(r.at("n_peers"), "scenario.n_peers");
    if (r.has("message_period_s")) {
        cfg.message_period_s = get_double(r.at("message_period_s"),
                                          "scenario.message_period_s");
    }
    if (r.has("n_messages")) {
        cfg.n_messages = get_u64(r.at("n_messages"), "scenario.n_messages");
    }
    if (r.has("aggregation_window_s")) {
        cfg.aggregation_window_s = get_double(r.at("aggregation_window_s"),
                                              "scenario.aggregation_window_s");
    }
    {
        const json& regions = r.at("regions");
        if (!regions.is_array() || regions.empty()) {
            throw ConfigError("regions", "expected a nonempty array");
        }
        for (std::size_t i = 0; i < regions.size(); ++i) {
            cfg.regions.push_back(
                parse_region(regions[i], "regions[" + std::to_string(i) + "]"));
        }
    }
    if (r.has("mobility")) {
        const json& mob = r.at("mobility");
        if (!mob.is_array()) {
            throw ConfigError("mobility", "expected an array of rows");
        }
        for (std::size_t i = 0; i < mob.size(); ++i) {
            const json& row = mob[i];
            const std::string rp = "mobility[" + std::to_string(i) + "]";
            if (!row.is_array()) {
                throw ConfigError(rp, "expected an array");
            }
            std::vector<double> vals;
            for (std::size_t k = 0; k < row.size(); ++k) {
                vals.push_back(get_double(row[k], rp + "[" + std::to_string(k) + "]"));
            }
            cfg.mobility.push_back(std::move(vals));
        }
    }
    if (r.has("epidemic")) parse_epidemic(r.at("epidemic"), "epidemic", cfg.epidemic);
    if (r.has("symptoms")) parse_symptoms(r.at("symptoms"), "symptoms", cfg.symptoms);
    if (r.has("latency")) parse_latency(r.at("latency"), "latency", cfg.latency);
    if (r.has("detector")) {
        ObjectReader d(r.at("detector"), "detector");
        if (d.has("watch_mult")) {
            cfg.detector.watch_mult = get_double(d.at("watch_mult"), "detector.watch_mult");
        }
        if (d.has("alert_mult")) {
            cfg.detector.alert_mult = get_double(d.at("alert_mult"), "detector.alert_mult");
        }
        if (d.has("min_reports")) {
            cfg.detector.min_reports = get_u64(d.at("min_reports"), "detector.min_reports");
        }
        d.finish();
    }
    if (r.has("federation")) {
        ObjectReader f(r.at("federation"), "federation");
        if (f.has("regional_k")) {
            cfg.escalation.regional_k = get_u64(f.at("regional_k"), "federation.regional_k");
        }
        if (f.has("global_k")) {
            cfg.escalation.global_k = get_u64(f.at("global_k"), "federation.global_k");
        }
        if (f.has("regional_groups")) {
            const json& groups = f.at("regional_groups");
            if (!groups.is_array()) {
                throw ConfigError("federation.regional_groups", "expected an array");
            }
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const json& group = groups[g];
                const std::string gp =
                    "federation.regional_groups[" + std::to_string(g) + "]";
                if (!group.is_array()) {
                    throw ConfigError(gp, "expected an array of region ids");
                }
                std::vector<std::string> names;
                for (std::size_t k = 0; k < group.size(); ++k) {
                    names.push_back(
                        get_string(group[k], gp + "[" + std::to_string(k) + "]"));
                }
                cfg.regional_groups.push_back(std::move(names));
            }
        }
        f.finish();
    }
    if (r.has("cut_policy")) {
        ObjectReader c(r.at("cut_policy"), "cut_policy");
        if (c.has("max_txs")) {
            cfg.cut_policy.max_txs = get_u64(c.at("max_txs"), "cut_policy.max_txs");
        }
        if (c.has("max_wait_s")) {
            cfg.cut_policy.max_wait_s = get_double(c.at("max_wait_s"),
                                                   "cut_policy.max_wait_s");
        }
        c.finish();
    }
    if (r.has("privacy")) {
        ObjectReader p(r.at("privacy"), "privacy");
        if (p.has("noise_scale")) {
            cfg.privacy.noise_scale = get_double(p.at("noise_scale"),
                                                 "privacy.noise_scale");
        }
        if (p.has("secret")) {
            cfg.privacy.secret = get_string(p.at("secret"), "privacy.secret");
        }
        p.finish();
    }
    if (r.has("seed_infections")) {
        const json& seeds = r.at("seed_infections");
        if (!seeds.is_array()) {
            throw ConfigError("seed_infections", "expected an array");
        }
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const std::string sp = "seed_infections[" + std::to_string(i) + "]";
            ObjectReader s(seeds[i], sp);
            SeedInfection si;
            si.t_days = get_double(s.at("t_days"), sp + ".t_days");
            si.region_id = get_string(s.at("region_id"), sp + ".region_id");
            si.count = get_double(s.at("count"), sp + ".count");
            s.finish();
            cfg.seed_infections.push_back(std::move(si));
        }
    }
    r.finish();
    cfg.validate();
    return cfg;
}

} // namespace detail

inline ScenarioConfig parse_scenario(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("scenario", std::string("not valid JSON: ") + e.what());
    }
    return detail::parse(j);
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("scenario", "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

} // namespace fedwarn::scenario
