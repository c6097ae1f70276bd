#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedwarn/bytes.hpp"
#include "fedwarn/crypto.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/rng.hpp"
#include "fedwarn/serialize.hpp"

namespace fedwarn::ledger {

struct TransactionProposal {
    Digest tx_id{};
    std::string device_pseudonym;
    Bytes payload;
    double created_at = 0.0; // simulation seconds

    // tx_id is the content hash of (device_pseudonym, payload, created_at).
    static Digest compute_tx_id(const std::string& device_pseudonym, const Bytes& payload,
                                double created_at) {
        CanonicalWriter w;
        w.field(device_pseudonym);
        w.field(payload);
        w.field_f64(created_at);
        return sha256(w.bytes());
    }

    static TransactionProposal make(std::string device_pseudonym, Bytes payload,
                                    double created_at) {
        TransactionProposal p;
        p.device_pseudonym = std::move(device_pseudonym);
        p.payload = std::move(payload);
        p.created_at = created_at;
        p.tx_id = compute_tx_id(p.device_pseudonym, p.payload, p.created_at);
        return p;
    }

    bool id_matches() const {
        return tx_id == compute_tx_id(device_pseudonym, payload, created_at);
    }

    // The bytes endorsers sign: full proposal in declared field order.
    Bytes proposal_bytes() const {
        CanonicalWriter w;
        w.field(tx_id);
        w.field(device_pseudonym);
        w.field(payload);
        w.field_f64(created_at);
        return w.take();
    }
};

struct Endorsement {
    Digest tx_id{};
    std::string peer_id;
    Bytes signature;
};

struct EndorsedTransaction {
    TransactionProposal proposal;
    std::vector<Endorsement> endorsements;
};

struct Block {
    std::uint64_t height = 0;
    Digest prev_hash{};
    std::vector<EndorsedTransaction> txs;
    Digest block_hash{};
    double cut_at = 0.0;
};

struct EndorsementPolicy {
    std::size_t k = 1; // required count of valid endorsements
};

struct CutPolicy {
    std::size_t max_txs = 1;
    double max_wait_s = 0.0;

    void validate(const std::string& path) const {
        if (max_txs < 1) {
            throw ConfigError(path + ".max_txs", "must be >= 1");
        }
        if (max_wait_s < 0.0) {
            throw ConfigError(path + ".max_wait_s", "must be >= 0");
        }
    }
};

struct CommitResult {
    std::vector<Digest> accepted_tx_ids;
    std::vector<Digest> rejected_tx_ids;
};

inline Bytes endorsement_bytes(const Endorsement& e) {
    CanonicalWriter w;
    w.field(e.tx_id);
    w.field(e.peer_id);
    w.field(e.signature);
    return w.take();
}

// Block hash covers every stored field (height, prev_hash, cut_at, full
// transaction bodies with endorsements), so any single-bit mutation of the
// stored block is hash-detectable. The genesis preimage additionally binds
// the signature-scheme label.
inline Digest compute_block_hash(const Block& b, std::string_view scheme_label) {
    CanonicalWriter w;
    w.field_u64(b.height);
    w.field(b.prev_hash);
    w.field_f64(b.cut_at);
    w.field_u64(b.txs.size());
    for (const auto& tx : b.txs) {
        w.field(tx.proposal.proposal_bytes());
        w.field_u64(tx.endorsements.size());
        for (const auto& e : tx.endorsements) {
            w.field(endorsement_bytes(e));
        }
    }
    if (b.height == 0) {
        w.field(scheme_label);
    }
    return sha256(w.bytes());
}

using PeerRegistry = std::map<std::string, Bytes>; // peer_id -> public key

/// Single-writer permissioned ledger: hash-chained blocks over a committed-id
/// set and a per-pseudonym world state. Mutation happens only through
/// validate_and_commit; everything else reads.
class Ledger {
public:
    Ledger(EndorsementPolicy policy, PeerRegistry registry,
           std::string scheme_label = kSignatureScheme)
        : policy_(policy), registry_(std::move(registry)), scheme_(std::move(scheme_label)) {
        Block genesis;
        genesis.height = 0;
        genesis.prev_hash = zero_digest();
        genesis.cut_at = 0.0;
        genesis.block_hash = compute_block_hash(genesis, scheme_);
        chain_.push_back(std::move(genesis));
    }

    // Reconstructs a ledger from existing blocks (chain import). Blocks are
    // taken as-is; run verify_chain afterwards.
    Ledger(EndorsementPolicy policy, PeerRegistry registry, std::string scheme_label,
           std::vector<Block> blocks)
        : policy_(policy), registry_(std::move(registry)), scheme_(std::move(scheme_label)) {
        chain_ = std::move(blocks);
        for (std::size_t i = 1; i < chain_.size(); ++i) {
            replay_commit(chain_[i]);
        }
    }

    const std::vector<Block>& chain() const { return chain_; }
    const Block& tip() const { return chain_.back(); }
    const EndorsementPolicy& policy() const { return policy_; }
    const PeerRegistry& peer_registry() const { return registry_; }
    const std::string& scheme() const { return scheme_; }
    bool is_committed(const Digest& tx_id) const { return committed_ids_.count(tx_id) != 0; }
    const std::set<Digest>& committed_ids() const { return committed_ids_; }
    const std::map<std::string, Bytes>& world_state() const { return world_state_; }

    bool tx_valid(const TransactionProposal& p, const std::vector<Endorsement>& es) const {
        return p.id_matches() && !is_committed(p.tx_id) &&
               count_valid_endorsements(p, es) >= policy_.k;
    }

    // Valid endorsements = correct signature over the proposal bytes from a
    // registered peer, each peer counted once.
    std::size_t count_valid_endorsements(const TransactionProposal& p,
                                         const std::vector<Endorsement>& es) const {
        const Bytes msg = p.proposal_bytes();
        std::set<std::string> seen;
        for (const auto& e : es) {
            if (e.tx_id != p.tx_id || seen.count(e.peer_id)) {
                continue;
            }
            auto it = registry_.find(e.peer_id);
            if (it == registry_.end()) {
                continue;
            }
            if (verify_signature(e.signature, msg, it->second)) {
                seen.insert(e.peer_id);
            }
        }
        return seen.size();
    }

    /// Appends a block to the tip. Each transaction is re-validated; invalid
    /// ones stay in the block but are reported rejected and do not touch
    /// world state. Throws ChainMismatch if the block does not extend the tip.
    CommitResult validate_and_commit(const Block& block) {
        if (block.height != chain_.size()) {
            throw ChainMismatch("block height " + std::to_string(block.height) +
                                " does not extend chain of length " +
                                std::to_string(chain_.size()));
        }
        if (block.prev_hash != tip().block_hash) {
            throw ChainMismatch("block prev_hash does not match chain tip");
        }
        if (block.txs.empty()) {
            throw ChainMismatch("non-genesis block has no transactions");
        }
        if (block.block_hash != compute_block_hash(block, scheme_)) {
            throw ChainMismatch("stored block hash does not match content");
        }
        for (std::size_t i = 1; i < block.txs.size(); ++i) {
            if (block.txs[i].proposal.created_at < block.txs[i - 1].proposal.created_at) {
                throw ChainMismatch("block transactions not in chronological order");
            }
        }
        chain_.push_back(block);
        return replay_commit(chain_.back());
    }

private:
    CommitResult replay_commit(const Block& block) {
        CommitResult result;
        for (const auto& tx : block.txs) {
            if (tx_valid(tx.proposal, tx.endorsements)) {
                committed_ids_.insert(tx.proposal.tx_id);
                world_state_[tx.proposal.device_pseudonym] = tx.proposal.payload;
                result.accepted_tx_ids.push_back(tx.proposal.tx_id);
            } else {
                result.rejected_tx_ids.push_back(tx.proposal.tx_id);
            }
        }
        return result;
    }

    EndorsementPolicy policy_;
    PeerRegistry registry_;
    std::string scheme_;
    std::vector<Block> chain_;
    std::set<Digest> committed_ids_;
    std::map<std::string, Bytes> world_state_;
};

/// Uniform draw of k distinct peers, Fisher-Yates over a copy. The returned
/// order is the contact order used by the device.
inline std::vector<std::string> select_endorsers(const std::vector<std::string>& peers,
                                                 std::size_t k, Rng& rng) {
    if (k == 0 || k > peers.size()) {
        throw PolicyError("endorser count k=" + std::to_string(k) + " not in [1, " +
                          std::to_string(peers.size()) + "]");
    }
    std::vector<std::string> pool = peers;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

/// Signs the proposal without applying any state change. The ledger is only
/// consulted for the duplicate check and the registry.
inline Endorsement endorse(const TransactionProposal& proposal, const KeyPair& peer,
                           const Ledger& ledger) {
    if (!proposal.id_matches()) {
        throw MalformedProposal("proposal tx_id does not match content hash");
    }
    if (ledger.is_committed(proposal.tx_id)) {
        throw DuplicateTransaction("tx " + hex_encode(proposal.tx_id) + " already committed");
    }
    if (ledger.peer_registry().find(peer.peer_id) == ledger.peer_registry().end()) {
        throw PolicyError("endorsing peer " + peer.peer_id + " is not registered");
    }
    Endorsement e;
    e.tx_id = proposal.tx_id;
    e.peer_id = peer.peer_id;
    e.signature = sign_message(proposal.proposal_bytes(), peer);
    return e;
}

inline bool verify_endorsements(const TransactionProposal& proposal,
                                const std::vector<Endorsement>& endorsements,
                                const Ledger& ledger) {
    return ledger.count_valid_endorsements(proposal, endorsements) >= ledger.policy().k;
}

/// Orders pending transactions into a block once either cut threshold is
/// reached: |pending| >= max_txs, or the oldest pending proposal has waited
/// max_wait_s. Returns nothing when neither holds.
inline std::optional<Block> cut_block(const std::vector<EndorsedTransaction>& pending,
                                      const Block& prev, double now, const CutPolicy& policy) {
    if (pending.empty()) {
        return std::nullopt;
    }
    double oldest = pending.front().proposal.created_at;
    for (const auto& tx : pending) {
        oldest = std::min(oldest, tx.proposal.created_at);
    }
    // The 1 ns slack keeps a timeout check scheduled at exactly
    // oldest + max_wait_s from missing the cut to float rounding.
    if (pending.size() < policy.max_txs && (now - oldest) < policy.max_wait_s - 1e-9) {
        return std::nullopt;
    }
    Block b;
    b.height = prev.height + 1;
    b.prev_hash = prev.block_hash;
    b.txs = pending;
    std::stable_sort(b.txs.begin(), b.txs.end(),
                     [](const EndorsedTransaction& a, const EndorsedTransaction& c) {
                         if (a.proposal.created_at != c.proposal.created_at) {
                             return a.proposal.created_at < c.proposal.created_at;
                         }
                         return a.proposal.tx_id < c.proposal.tx_id;
                     });
    b.cut_at = now;
    // Scheme label only enters the genesis preimage; height here is >= 1.
    b.block_hash = compute_block_hash(b, kSignatureScheme);
    return b;
}

/// Full chain audit. Pass 1 re-derives every hash and structural invariant;
/// pass 2 replays transaction validity (policy, signatures, duplicates) and
/// cross-checks the ledger's committed set and world state. Returns false on
/// the first violation.
inline bool verify_chain(const Ledger& ledger) {
    const auto& chain = ledger.chain();
    if (chain.empty()) {
        return false;
    }
    // Pass 1: structure and hashes. Cheap, catches any bit-level tampering.
    const Block& genesis = chain.front();
    if (genesis.height != 0 || genesis.prev_hash != zero_digest() || !genesis.txs.empty()) {
        return false;
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Block& b = chain[i];
        if (b.height != i) {
            return false;
        }
        if (i > 0) {
            if (b.prev_hash != chain[i - 1].block_hash) {
                return false;
            }
            if (b.txs.empty()) {
                return false;
            }
        }
        for (std::size_t t = 1; t < b.txs.size(); ++t) {
            if (b.txs[t].proposal.created_at < b.txs[t - 1].proposal.created_at) {
                return false;
            }
        }
        if (b.block_hash != compute_block_hash(b, ledger.scheme())) {
            return false;
        }
    }
    // Pass 2: replay validity. Rejected transactions may sit in blocks; a
    // tx_id may only be *accepted* once.
    std::set<Digest> committed;
    std::map<std::string, Bytes> world;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        for (const auto& tx : chain[i].txs) {
            const bool valid = tx.proposal.id_matches() &&
                               committed.count(tx.proposal.tx_id) == 0 &&
                               ledger.count_valid_endorsements(tx.proposal, tx.endorsements) >=
                                   ledger.policy().k;
            if (valid) {
                committed.insert(tx.proposal.tx_id);
                world[tx.proposal.device_pseudonym] = tx.proposal.payload;
            }
        }
    }
    return committed == ledger.committed_ids() && world == ledger.world_state();
}

} // namespace fedwarn::ledger
