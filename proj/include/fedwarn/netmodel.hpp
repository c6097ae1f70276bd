#pragma once

#include <string>

#include "fedwarn/errors.hpp"
#include "fedwarn/rng.hpp"

namespace fedwarn::net {

enum class DelayKind { Constant, Uniform, ShiftedExponential };

// Parametric nonnegative delay distribution, seconds.
struct DelayDistribution {
    DelayKind kind = DelayKind::Constant;
    double value = 0.0;  // constant
    double low = 0.0;    // uniform
    double high = 0.0;   // uniform
    double offset = 0.0; // shifted-exponential
    double mean = 0.0;   // shifted-exponential (mean of the exponential part)

    static DelayDistribution constant(double v) {
        DelayDistribution d;
        d.kind = DelayKind::Constant;
        d.value = v;
        return d;
    }

    static DelayDistribution uniform(double lo, double hi) {
        DelayDistribution d;
        d.kind = DelayKind::Uniform;
        d.low = lo;
        d.high = hi;
        return d;
    }

    static DelayDistribution shifted_exponential(double offset, double mean) {
        DelayDistribution d;
        d.kind = DelayKind::ShiftedExponential;
        d.offset = offset;
        d.mean = mean;
        return d;
    }

    void validate(const std::string& path) const {
        switch (kind) {
        case DelayKind::Constant:
            if (value < 0.0) {
                throw ConfigError(path + ".value", "constant delay must be >= 0");
            }
            break;
        case DelayKind::Uniform:
            if (low < 0.0 || high < low) {
                throw ConfigError(path, "uniform delay requires 0 <= low <= high");
            }
            break;
        case DelayKind::ShiftedExponential:
            if (offset < 0.0 || mean < 0.0) {
                throw ConfigError(path, "shifted-exponential requires offset >= 0 and mean >= 0");
            }
            break;
        }
    }

    double expected() const {
        switch (kind) {
        case DelayKind::Constant:
            return value;
        case DelayKind::Uniform:
            return 0.5 * (low + high);
        case DelayKind::ShiftedExponential:
            return offset + mean;
        }
        return 0.0;
    }
};

inline double sample(const DelayDistribution& dist, Rng& rng) {
    switch (dist.kind) {
    case DelayKind::Constant:
        return dist.value;
    case DelayKind::Uniform:
        return rng.uniform(dist.low, dist.high);
    case DelayKind::ShiftedExponential:
        return dist.offset + rng.exponential(dist.mean);
    }
    return 0.0;
}

// Delay model for one access link plus ledger processing stages. The device
// radio is half-duplex and narrowband: endorsement exchanges are serialized,
// one uplink/response round trip per endorsing peer.
struct LatencyModel {
    DelayDistribution uplink;
    DelayDistribution downlink;
    DelayDistribution endorse_proc;  // per-peer signing/check time
    DelayDistribution order_proc;
    DelayDistribution validate_proc; // block validation time
    DelayDistribution edge_proc;     // conventional-path server time

    void validate(const std::string& path) const {
        uplink.validate(path + ".uplink");
        downlink.validate(path + ".downlink");
        endorse_proc.validate(path + ".endorse_proc");
        order_proc.validate(path + ".order_proc");
        validate_proc.validate(path + ".validate_proc");
        edge_proc.validate(path + ".edge_proc");
    }

    // Calibrated so the endorsement round trip costs 0.25 s per peer.
    static LatencyModel defaults() {
        LatencyModel m;
        m.uplink = DelayDistribution::constant(0.09);
        m.downlink = DelayDistribution::constant(0.06);
        m.endorse_proc = DelayDistribution::constant(0.10);
        m.order_proc = DelayDistribution::constant(0.05);
        m.validate_proc = DelayDistribution::constant(0.10);
        m.edge_proc = DelayDistribution::constant(0.05);
        return m;
    }
};

/// Closed-form expected end-to-end latency of the ledger path with n
/// endorsing peers under the serialized-radio model:
///   n * (E[up] + E[endorse_proc] + E[down])   endorsement round trips
/// + E[up] + E[order_proc]                     submission and ordering
/// + E[validate_proc] + E[down]                validation and confirmation.
/// Serves as the analytic oracle for the discrete-event measurements.
inline double expected_dlt_e2e(const LatencyModel& m, int n_endorsers) {
    if (n_endorsers < 1) {
        throw PolicyError("expected_dlt_e2e requires n_endorsers >= 1");
    }
    const double round_trip =
        m.uplink.expected() + m.endorse_proc.expected() + m.downlink.expected();
    return static_cast<double>(n_endorsers) * round_trip + m.uplink.expected() +
           m.order_proc.expected() + m.validate_proc.expected() + m.downlink.expected();
}

/// Conventional path: uplink report, server store, downlink ack.
inline double expected_conventional_e2e(const LatencyModel& m) {
    return m.uplink.expected() + m.edge_proc.expected() + m.downlink.expected();
}

} // namespace fedwarn::net
