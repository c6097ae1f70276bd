#pragma once

#include <stdexcept>
#include <string>

namespace fedwarn {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Endorsement policy cannot be satisfied (k = 0 or k > pool size).
struct PolicyError : Error {
    using Error::Error;
};

// Proposal's tx_id is already committed.
struct DuplicateTransaction : Error {
    using Error::Error;
};

// Stored tx_id does not match the recomputed content hash.
struct MalformedProposal : Error {
    using Error::Error;
};

// Block height or prev_hash does not extend the current tip.
struct ChainMismatch : Error {
    using Error::Error;
};

// Event scheduled before the current simulation time.
struct CausalityViolation : Error {
    using Error::Error;
};

// Region has zero population where a ratio is required.
struct DegenerateRegion : Error {
    using Error::Error;
};

// Warning references a region that is not in the federation tree.
struct UnknownRegion : Error {
    using Error::Error;
};

// Scenario configuration violates a module invariant. Carries the field path.
struct ConfigError : Error {
    std::string field;
    ConfigError(std::string field_path, const std::string& msg)
        : Error(field_path + ": " + msg), field(std::move(field_path)) {}
};

// End-of-run audit or internal cross-check failed.
struct AuditError : Error {
    using Error::Error;
};

} // namespace fedwarn
