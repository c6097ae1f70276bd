#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedwarn/bytes.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/ledger.hpp"

namespace fedwarn::chainio {

// Per-block, per-transaction accepted flags recomputed by replay; the same
// rule validate_and_commit applies (policy satisfied, id intact, first
// accepted occurrence wins).
inline std::vector<std::vector<bool>> replay_flags(const ledger::Ledger& lg) {
    std::vector<std::vector<bool>> flags;
    std::set<Digest> committed;
    const auto& chain = lg.chain();
    flags.reserve(chain.size());
    for (const auto& block : chain) {
        std::vector<bool> row;
        row.reserve(block.txs.size());
        for (const auto& tx : block.txs) {
            const bool valid =
                tx.proposal.id_matches() && committed.count(tx.proposal.tx_id) == 0 &&
                lg.count_valid_endorsements(tx.proposal, tx.endorsements) >= lg.policy().k;
            if (valid) {
                committed.insert(tx.proposal.tx_id);
            }
            row.push_back(valid);
        }
        flags.push_back(std::move(row));
    }
    return flags;
}

/// NDJSON chain export: a header record carrying everything verification
/// needs (scheme, policy, peer registry), then one record per block with
/// full transaction bodies. Hashes, keys, payloads, signatures are hex.
inline std::string export_chain(const ledger::Ledger& lg) {
    using nlohmann::json;
    std::string out;
    {
        json header;
        header["type"] = "header";
        header["scheme"] = lg.scheme();
        header["endorsement_k"] = lg.policy().k;
        json peers = json::array();
        for (const auto& [peer_id, pubkey] : lg.peer_registry()) {
            peers.push_back({{"peer_id", peer_id}, {"public_key", hex_encode(pubkey)}});
        }
        header["peers"] = std::move(peers);
        out += header.dump();
        out += '\n';
    }
    const auto flags = replay_flags(lg);
    for (std::size_t i = 0; i < lg.chain().size(); ++i) {
        const auto& b = lg.chain()[i];
        json rec;
        rec["type"] = "block";
        rec["height"] = b.height;
        rec["prev_hash"] = hex_encode(b.prev_hash);
        rec["block_hash"] = hex_encode(b.block_hash);
        rec["cut_at"] = b.cut_at;
        json ids = json::array();
        for (const auto& tx : b.txs) {
            ids.push_back(hex_encode(tx.proposal.tx_id));
        }
        rec["tx_ids"] = std::move(ids);
        json txs = json::array();
        for (std::size_t t = 0; t < b.txs.size(); ++t) {
            const auto& tx = b.txs[t];
            json jtx;
            jtx["tx_id"] = hex_encode(tx.proposal.tx_id);
            jtx["device_pseudonym"] = tx.proposal.device_pseudonym;
            jtx["payload"] = hex_encode(tx.proposal.payload);
            jtx["created_at"] = tx.proposal.created_at;
            json ends = json::array();
            for (const auto& e : tx.endorsements) {
                ends.push_back({{"tx_id", hex_encode(e.tx_id)},
                                {"peer_id", e.peer_id},
                                {"signature", hex_encode(e.signature)}});
            }
            jtx["endorsements"] = std::move(ends);
            jtx["accepted"] = flags[i][t];
            txs.push_back(std::move(jtx));
        }
        rec["txs"] = std::move(txs);
        out += rec.dump();
        out += '\n';
    }
    return out;
}

struct ChainDocument {
    std::string scheme;
    std::size_t endorsement_k = 0;
    ledger::PeerRegistry peers;
    std::vector<ledger::Block> blocks;
    std::vector<std::vector<bool>> accepted; // flags as stored in the file

    // Rebuilds a ledger (replays commitment state from the blocks).
    ledger::Ledger to_ledger() const {
        return ledger::Ledger(ledger::EndorsementPolicy{endorsement_k}, peers, scheme,
                              blocks);
    }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ConfigError(where, std::string("missing key ") + key);
    }
    return j.at(key);
}

inline Digest read_digest(const json& v, const std::string& where) {
    if (!v.is_string()) {
        throw ConfigError(where, "expected hex string");
    }
    return digest_from_hex(v.get<std::string>());
}

inline Bytes read_hex(const json& v, const std::string& where) {
    if (!v.is_string()) {
        throw ConfigError(where, "expected hex string");
    }
    return hex_decode(v.get<std::string>());
}

} // namespace detail

inline ChainDocument import_chain(const std::string& text) {
    using nlohmann::json;
    ChainDocument doc;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) {
                continue;
            }
            const std::string where = "chain line " + std::to_string(lineno);
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded()) {
                throw ConfigError(where, "not valid JSON");
            }
            const std::string type =
                detail::require(rec, "type", where).get<std::string>();
            if (type == "header") {
                if (have_header) {
                    throw ConfigError(where, "duplicate header record");
                }
                have_header = true;
                doc.scheme = detail::require(rec, "scheme", where).get<std::string>();
                doc.endorsement_k =
                    detail::require(rec, "endorsement_k", where).get<std::size_t>();
                for (const auto& p : detail::require(rec, "peers", where)) {
                    doc.peers[detail::require(p, "peer_id", where).get<std::string>()] =
                        detail::read_hex(detail::require(p, "public_key", where), where);
                }
            } else if (type == "block") {
                if (!have_header) {
                    throw ConfigError(where, "block record before header");
                }
                ledger::Block b;
                b.height = detail::require(rec, "height", where).get<std::uint64_t>();
                b.prev_hash =
                    detail::read_digest(detail::require(rec, "prev_hash", where), where);
                b.block_hash =
                    detail::read_digest(detail::require(rec, "block_hash", where), where);
                b.cut_at = detail::require(rec, "cut_at", where).get<double>();
                std::vector<bool> row;
                for (const auto& jtx : detail::require(rec, "txs", where)) {
                    ledger::EndorsedTransaction tx;
                    tx.proposal.tx_id =
                        detail::read_digest(detail::require(jtx, "tx_id", where), where);
                    tx.proposal.device_pseudonym =
                        detail::require(jtx, "device_pseudonym", where).get<std::string>();
                    tx.proposal.payload =
                        detail::read_hex(detail::require(jtx, "payload", where), where);
                    tx.proposal.created_at =
                        detail::require(jtx, "created_at", where).get<double>();
                    for (const auto& je : detail::require(jtx, "endorsements", where)) {
                        ledger::Endorsement e;
                        e.tx_id =
                            detail::read_digest(detail::require(je, "tx_id", where), where);
                        e.peer_id = detail::require(je, "peer_id", where).get<std::string>();
                        e.signature =
                            detail::read_hex(detail::require(je, "signature", where), where);
                        tx.endorsements.push_back(std::move(e));
                    }
                    row.push_back(detail::require(jtx, "accepted", where).get<bool>());
                    b.txs.push_back(std::move(tx));
                }
                const auto& ids = detail::require(rec, "tx_ids", where);
                if (ids.size() != b.txs.size()) {
                    throw ConfigError(where, "tx_ids does not match transaction bodies");
                }
                for (std::size_t t = 0; t < b.txs.size(); ++t) {
                    if (detail::read_digest(ids[t], where) != b.txs[t].proposal.tx_id) {
                        throw ConfigError(where, "tx_ids does not match transaction bodies");
                    }
                }
                doc.accepted.push_back(std::move(row));
                doc.blocks.push_back(std::move(b));
            } else {
                throw ConfigError(where, "unknown record type " + type);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("chain line " + std::to_string(lineno),
                          std::string("malformed record: ") + e.what());
    }
    if (!have_header) {
        throw ConfigError("chain", "no header record");
    }
    if (doc.blocks.empty()) {
        throw ConfigError("chain", "no block records");
    }
    return doc;
}

inline ChainDocument load_chain(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("chain", "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return import_chain(ss.str());
}

/// Full offline audit of an imported chain: cryptographic verify_chain plus
/// a cross-check that the stored accepted flags match replay.
inline bool verify_document(const ChainDocument& doc) {
    ledger::Ledger lg = doc.to_ledger();
    if (!ledger::verify_chain(lg)) {
        return false;
    }
    return replay_flags(lg) == doc.accepted;
}

} // namespace fedwarn::chainio
