#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedwarn/errors.hpp"
#include "fedwarn/ledger.hpp"
#include "fedwarn/telemetry.hpp"

namespace fedwarn::fed {

enum class NodeLevel { Edge, Regional, Global };

inline std::string to_string(NodeLevel l) {
    switch (l) {
        case NodeLevel::Edge: return "edge";
        case NodeLevel::Regional: return "regional";
        case NodeLevel::Global: return "global";
    }
    return "?";
}

enum class NodeStatus { Normal, Elevated, Emergency };

inline std::string to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Normal: return "normal";
        case NodeStatus::Elevated: return "elevated";
        case NodeStatus::Emergency: return "emergency";
    }
    return "?";
}

enum class Severity { Watch, Alert };

inline std::string to_string(Severity s) {
    return s == Severity::Watch ? "watch" : "alert";
}

struct FederationNode {
    std::string node_id;
    NodeLevel level = NodeLevel::Edge;
    std::vector<std::string> children;   // node ids, empty for edges
    std::vector<std::string> region_ids; // regions covered (edges: own regions)
};

/// The warning hierarchy: one global root, regional nodes beneath it, edge
/// nodes at the leaves. Each region belongs to exactly one edge node.
class FederationTree {
  public:
    FederationTree() = default;

    explicit FederationTree(std::vector<FederationNode> nodes) {
        for (auto& n : nodes) {
            if (nodes_.count(n.node_id) > 0) {
                throw ConfigError("federation", "duplicate node id " + n.node_id);
            }
            nodes_.emplace(n.node_id, std::move(n));
        }
        validate();
    }

    const std::map<std::string, FederationNode>& nodes() const { return nodes_; }

    const FederationNode& node(const std::string& id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) {
            throw ConfigError("federation", "unknown node id " + id);
        }
        return it->second;
    }

    const std::string& root() const { return root_; }

    // Edge node covering a region; UnknownRegion if no node covers it.
    const std::string& edge_for_region(const std::string& region_id) const {
        auto it = region_to_edge_.find(region_id);
        if (it == region_to_edge_.end()) {
            throw UnknownRegion("no edge node covers region " + region_id);
        }
        return it->second;
    }

    bool covers_region(const std::string& region_id) const {
        return region_to_edge_.count(region_id) > 0;
    }

    /// Default shape: regions partitioned into groups, one edge per region,
    /// one regional node per group, one global root.
    static FederationTree build(const std::vector<std::vector<std::string>>& regional_groups) {
        if (regional_groups.empty()) {
            throw ConfigError("federation.regional_groups", "at least one group required");
        }
        std::vector<FederationNode> nodes;
        FederationNode global;
        global.node_id = "global";
        global.level = NodeLevel::Global;
        for (std::size_t g = 0; g < regional_groups.size(); ++g) {
            const auto& group = regional_groups[g];
            if (group.empty()) {
                throw ConfigError("federation.regional_groups", "empty group");
            }
            FederationNode regional;
            regional.node_id = "regional-" + std::to_string(g);
            regional.level = NodeLevel::Regional;
            for (const auto& region : group) {
                FederationNode edge;
                edge.node_id = "edge-" + region;
                edge.level = NodeLevel::Edge;
                edge.region_ids = {region};
                regional.children.push_back(edge.node_id);
                regional.region_ids.push_back(region);
                global.region_ids.push_back(region);
                nodes.push_back(std::move(edge));
            }
            global.children.push_back(regional.node_id);
            nodes.push_back(std::move(regional));
        }
        nodes.push_back(std::move(global));
        return FederationTree(std::move(nodes));
    }

  private:
    void validate() {
        std::map<std::string, int> parent_count;
        for (const auto& [id, n] : nodes_) {
            for (const auto& child : n.children) {
                auto it = nodes_.find(child);
                if (it == nodes_.end()) {
                    throw ConfigError("federation", "node " + id +
                                                        " references missing child " + child);
                }
                const NodeLevel want = n.level == NodeLevel::Global ? NodeLevel::Regional
                                                                    : NodeLevel::Edge;
                if (n.level == NodeLevel::Edge || it->second.level != want) {
                    throw ConfigError("federation", "node " + id + " has child " + child +
                                                        " of the wrong level");
                }
                parent_count[child] += 1;
            }
            if (n.level == NodeLevel::Edge) {
                if (!n.children.empty()) {
                    throw ConfigError("federation", "edge node " + id + " must be a leaf");
                }
                for (const auto& region : n.region_ids) {
                    auto [it, inserted] = region_to_edge_.emplace(region, id);
                    if (!inserted) {
                        throw ConfigError("federation", "region " + region +
                                                            " covered by two edge nodes");
                    }
                }
            }
        }
        root_.clear();
        for (const auto& [id, n] : nodes_) {
            const int parents = parent_count.count(id) ? parent_count.at(id) : 0;
            if (n.level == NodeLevel::Global) {
                if (parents != 0) {
                    throw ConfigError("federation", "global node " + id + " has a parent");
                }
                if (!root_.empty()) {
                    throw ConfigError("federation", "more than one global node");
                }
                root_ = id;
            } else if (parents != 1) {
                throw ConfigError("federation",
                                  "node " + id + " must have exactly one parent, has " +
                                      std::to_string(parents));
            }
        }
        if (root_.empty()) {
            throw ConfigError("federation", "no global node");
        }
        if (region_to_edge_.empty()) {
            throw ConfigError("federation", "tree covers no regions");
        }
    }

    std::map<std::string, FederationNode> nodes_;
    std::map<std::string, std::string> region_to_edge_;
    std::string root_;
};

struct WarningEvent {
    std::string region_id;
    double t_raised = 0.0; // seconds
    double metric = 0.0;   // observed fever fraction
    double baseline = 0.0; // expected healthy fraction
    Severity severity = Severity::Watch;
    std::vector<std::string> source_tx_ids;
};

struct DetectorConfig {
    double watch_mult = 5.0;
    double alert_mult = 20.0;
    std::uint64_t min_reports = 10;

    void validate(const std::string& path) const {
        if (!(watch_mult > 0.0) || !(alert_mult > 0.0)) {
            throw ConfigError(path, "threshold multipliers must be > 0");
        }
        if (!(watch_mult < alert_mult)) {
            throw ConfigError(path, "watch_mult must be < alert_mult");
        }
        if (min_reports < 1) {
            throw ConfigError(path + ".min_reports", "must be >= 1");
        }
    }
};

/// Multiplicative-threshold anomaly detector over one committed aggregate.
/// Windows with too few reports are suppressed; otherwise the reported
/// fraction is compared against baseline multiples.
inline std::optional<WarningEvent> detect_anomaly(const telemetry::RegionAggregate& agg,
                                                  double baseline, const DetectorConfig& cfg,
                                                  std::vector<std::string> source_tx_ids,
                                                  double t_raised) {
    cfg.validate("detector");
    if (baseline <= 0.0) {
        throw ConfigError("detector.baseline", "baseline must be > 0");
    }
    if (agg.n_reports < cfg.min_reports) {
        return std::nullopt;
    }
    WarningEvent w;
    w.region_id = agg.region_id;
    w.t_raised = t_raised;
    w.metric = agg.fever_fraction;
    w.baseline = baseline;
    w.source_tx_ids = std::move(source_tx_ids);
    if (agg.fever_fraction >= baseline * cfg.alert_mult) {
        w.severity = Severity::Alert;
        return w;
    }
    if (agg.fever_fraction >= baseline * cfg.watch_mult) {
        w.severity = Severity::Watch;
        return w;
    }
    return std::nullopt;
}

struct EscalationConfig {
    std::uint64_t regional_k = 2;
    std::uint64_t global_k = 1;

    void validate(const std::string& path) const {
        if (regional_k < 1) {
            throw ConfigError(path + ".regional_k", "must be >= 1");
        }
        if (global_k < 1) {
            throw ConfigError(path + ".global_k", "must be >= 1");
        }
    }
};

/// Folds warnings up the tree. Edges: one watch makes them elevated, one
/// alert makes them emergency. Interior nodes need a quorum of children at
/// a level to adopt it; reaching the higher quorum implies the lower one.
inline std::map<std::string, NodeStatus> escalate(const std::vector<WarningEvent>& warnings,
                                                  const FederationTree& tree,
                                                  const EscalationConfig& cfg) {
    cfg.validate("federation");
    std::map<std::string, NodeStatus> status;
    for (const auto& [id, n] : tree.nodes()) {
        status[id] = NodeStatus::Normal;
    }
    for (const auto& w : warnings) {
        const auto& edge_id = tree.edge_for_region(w.region_id); // throws UnknownRegion
        auto& s = status[edge_id];
        const NodeStatus raised =
            w.severity == Severity::Alert ? NodeStatus::Emergency : NodeStatus::Elevated;
        if (raised > s) {
            s = raised;
        }
    }
    // Children are always below their parents, so one leaves-upward sweep
    // per level suffices; iterate regional then global.
    for (NodeLevel level : {NodeLevel::Regional, NodeLevel::Global}) {
        const std::uint64_t k = level == NodeLevel::Regional ? cfg.regional_k : cfg.global_k;
        for (const auto& [id, n] : tree.nodes()) {
            if (n.level != level) {
                continue;
            }
            std::uint64_t elevated_or_worse = 0;
            std::uint64_t emergency = 0;
            for (const auto& child : n.children) {
                const NodeStatus cs = status.at(child);
                if (cs >= NodeStatus::Elevated) {
                    ++elevated_or_worse;
                }
                if (cs == NodeStatus::Emergency) {
                    ++emergency;
                }
            }
            if (emergency >= k) {
                status[id] = NodeStatus::Emergency;
            } else if (elevated_or_worse >= k) {
                status[id] = NodeStatus::Elevated;
            }
        }
    }
    return status;
}

using IncentiveAccounts = std::map<std::string, std::uint64_t>;

/// +1 credit to the submitting pseudonym of every accepted transaction in
/// the block; rejected transactions earn nothing.
inline void credit_incentive(IncentiveAccounts& accounts,
                             const ledger::CommitResult& result, const ledger::Block& block) {
    std::set<Digest> accepted(result.accepted_tx_ids.begin(), result.accepted_tx_ids.end());
    for (const auto& tx : block.txs) {
        if (accepted.count(tx.proposal.tx_id) > 0) {
            accounts[tx.proposal.device_pseudonym] += 1;
        }
    }
}

} // namespace fedwarn::fed
