#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fedwarn/bytes.hpp"
#include "fedwarn/crypto.hpp"
#include "fedwarn/epidemic.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/rng.hpp"
#include "fedwarn/serialize.hpp"

namespace fedwarn::telemetry {

// Physiological clamps.
inline constexpr double kTempMinC = 30.0;
inline constexpr double kTempMaxC = 45.0;
inline constexpr double kSpo2MinPct = 50.0;
inline constexpr double kSpo2MaxPct = 100.0;
inline constexpr double kHrMinBpm = 20.0;
inline constexpr double kHrMaxBpm = 250.0;

struct DeviceReading {
    std::string device_pseudonym;
    std::string region_id;
    double t = 0.0; // seconds
    double temp_c = 0.0;
    double spo2_pct = 0.0;
    double hr_bpm = 0.0;

    Bytes serialize() const {
        CanonicalWriter w;
        w.field(device_pseudonym);
        w.field(region_id);
        w.field_f64(t);
        w.field_f64(temp_c);
        w.field_f64(spo2_pct);
        w.field_f64(hr_bpm);
        return w.take();
    }

    static DeviceReading deserialize(const Bytes& payload) {
        CanonicalReader r(payload);
        DeviceReading d;
        d.device_pseudonym = r.field_string();
        d.region_id = r.field_string();
        d.t = r.field_f64();
        d.temp_c = r.field_f64();
        d.spo2_pct = r.field_f64();
        d.hr_bpm = r.field_f64();
        return d;
    }
};

// Maps infection status to vital-sign distributions.
struct SymptomModel {
    double healthy_temp_mean = 36.8;
    double healthy_temp_sd = 0.4;
    double infected_temp_mean = 39.0;
    double infected_temp_sd = 0.5;
    double healthy_spo2_mean = 97.0;
    double healthy_spo2_sd = 1.0;
    double infected_spo2_mean = 93.0;
    double infected_spo2_sd = 2.0;
    double healthy_hr_mean = 72.0;
    double healthy_hr_sd = 9.0;
    double infected_hr_mean = 95.0;
    double infected_hr_sd = 12.0;
    double symptomatic_fraction = 0.8;
    double fever_threshold_c = 38.0;

    void validate(const std::string& path) const {
        if (infected_temp_mean <= healthy_temp_mean) {
            throw ConfigError(path, "infected_temp_mean must exceed healthy_temp_mean");
        }
        for (double sd : {healthy_temp_sd, infected_temp_sd, healthy_spo2_sd, infected_spo2_sd,
                          healthy_hr_sd, infected_hr_sd}) {
            if (sd <= 0.0) {
                throw ConfigError(path, "standard deviations must be > 0");
            }
        }
        if (symptomatic_fraction < 0.0 || symptomatic_fraction > 1.0) {
            throw ConfigError(path + ".symptomatic_fraction", "must be in [0, 1]");
        }
    }

    // Analytic probability that a healthy reading crosses the fever
    // threshold; the detector baseline.
    double healthy_fever_rate() const {
        const double z = (fever_threshold_c - healthy_temp_mean) /
                         (healthy_temp_sd * std::sqrt(2.0));
        return 0.5 * std::erfc(z);
    }
};

struct RegionAggregate {
    std::string region_id;
    double window_start = 0.0; // seconds
    double window_end = 0.0;   // seconds
    std::uint64_t n_reports = 0;
    std::uint64_t n_fever = 0;       // possibly noise-obfuscated
    double fever_fraction = 0.0;     // n_fever / n_reports, 0 when empty

    bool empty_window() const { return n_reports == 0; }

    Bytes serialize() const {
        CanonicalWriter w;
        w.field(region_id);
        w.field_f64(window_start);
        w.field_f64(window_end);
        w.field_u64(n_reports);
        w.field_u64(n_fever);
        return w.take();
    }

    static RegionAggregate deserialize(const Bytes& payload) {
        CanonicalReader r(payload);
        RegionAggregate a;
        a.region_id = r.field_string();
        a.window_start = r.field_f64();
        a.window_end = r.field_f64();
        a.n_reports = r.field_u64();
        a.n_fever = r.field_u64();
        a.fever_fraction = a.n_reports > 0
                               ? static_cast<double>(a.n_fever) /
                                     static_cast<double>(a.n_reports)
                               : 0.0;
        return a;
    }
};

/// Keyed, epoch-rotated pseudonym: HMAC-SHA256(secret, device_id || epoch),
/// hex-encoded. Same inputs always map to the same pseudonym; pseudonyms are
/// unlinkable across epochs without the secret.
inline std::string pseudonymize(const std::string& device_id, std::uint64_t epoch,
                                const Bytes& secret) {
    if (secret.empty()) {
        throw ConfigError("privacy.secret", "pseudonymization secret must be nonempty");
    }
    CanonicalWriter w;
    w.field(device_id);
    w.field_u64(epoch);
    return hex_encode(hmac_sha256(secret, w.bytes()));
}

inline double clamp(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

/// One reading for one device: infection sampled at the region's current
/// prevalence, vitals from the matching distributions, clamped to
/// physiological ranges.
inline DeviceReading sample_reading(const std::string& device_id,
                                    const epi::RegionCompartments& region, double t_s,
                                    const SymptomModel& model, std::uint64_t epoch,
                                    const Bytes& secret, Rng& rng) {
    const double p = region.population() > 0.0 ? epi::prevalence(region) : 0.0;
    const bool infected = rng.bernoulli(p);
    const bool symptomatic = infected && rng.bernoulli(model.symptomatic_fraction);
    DeviceReading r;
    r.device_pseudonym = pseudonymize(device_id, epoch, secret);
    r.region_id = region.region_id;
    r.t = t_s;
    if (symptomatic) {
        r.temp_c = rng.normal(model.infected_temp_mean, model.infected_temp_sd);
        r.spo2_pct = rng.normal(model.infected_spo2_mean, model.infected_spo2_sd);
        r.hr_bpm = rng.normal(model.infected_hr_mean, model.infected_hr_sd);
    } else {
        r.temp_c = rng.normal(model.healthy_temp_mean, model.healthy_temp_sd);
        r.spo2_pct = rng.normal(model.healthy_spo2_mean, model.healthy_spo2_sd);
        r.hr_bpm = rng.normal(model.healthy_hr_mean, model.healthy_hr_sd);
    }
    r.temp_c = clamp(r.temp_c, kTempMinC, kTempMaxC);
    r.spo2_pct = clamp(r.spo2_pct, kSpo2MinPct, kSpo2MaxPct);
    r.hr_bpm = clamp(r.hr_bpm, kHrMinBpm, kHrMaxBpm);
    return r;
}

/// Batch generation over a device list, one independent infection draw each.
inline std::vector<DeviceReading> generate_readings(const epi::RegionCompartments& region,
                                                    const std::vector<std::string>& devices,
                                                    const SymptomModel& model,
                                                    std::uint64_t epoch, const Bytes& secret,
                                                    double t_s, Rng& rng) {
    std::vector<DeviceReading> out;
    out.reserve(devices.size());
    for (const auto& id : devices) {
        out.push_back(sample_reading(id, region, t_s, model, epoch, secret, rng));
    }
    return out;
}

/// Laplace obfuscation of a count: round(count + Laplace(0, scale)), clamped
/// to >= 0. Scale 0 is the identity and consumes no randomness.
inline std::uint64_t obfuscate_count(std::uint64_t true_count, double scale, Rng& rng) {
    if (scale < 0.0) {
        throw ConfigError("privacy.noise_scale", "noise scale must be >= 0");
    }
    if (scale == 0.0) {
        return true_count;
    }
    const double noised = static_cast<double>(true_count) + rng.laplace(scale);
    const double rounded = std::round(noised);
    return rounded <= 0.0 ? 0 : static_cast<std::uint64_t>(rounded);
}

inline std::uint64_t count_fever(const std::vector<DeviceReading>& readings,
                                 double fever_threshold_c) {
    std::uint64_t n = 0;
    for (const auto& r : readings) {
        if (r.temp_c >= fever_threshold_c) {
            ++n;
        }
    }
    return n;
}

/// Windowed per-region summary with the obfuscated fever count. Callers pass
/// readings already filtered to one region and one window. An empty window
/// yields the n_reports = 0 marker aggregate.
inline RegionAggregate aggregate_region(const std::vector<DeviceReading>& readings,
                                        const SymptomModel& model, const std::string& region_id,
                                        double window_start, double window_end,
                                        double noise_scale, Rng& rng) {
    RegionAggregate agg;
    agg.region_id = region_id;
    agg.window_start = window_start;
    agg.window_end = window_end;
    agg.n_reports = readings.size();
    if (agg.n_reports == 0) {
        return agg;
    }
    const std::uint64_t true_fever = count_fever(readings, model.fever_threshold_c);
    agg.n_fever = std::min(obfuscate_count(true_fever, noise_scale, rng), agg.n_reports);
    agg.fever_fraction =
        static_cast<double>(agg.n_fever) / static_cast<double>(agg.n_reports);
    return agg;
}

} // namespace fedwarn::telemetry
