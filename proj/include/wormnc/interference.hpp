#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wormnc/platform.hpp"

namespace wormnc {

/// A contiguous section of a flow's path, identified by (flow, start, len).
struct Subpath {
    int flow = -1;  // flow index within the Config
    int start = 0;  // index of the first node within the flow's path
    int len = 0;

    friend bool operator==(const Subpath&, const Subpath&) = default;
};

std::span<const NodeId> subpath_nodes(const Config& config, const Subpath& sub);

/// Smallest number of consecutive buffers from path index `i` that hold one
/// packet of the flow; truncated to the remaining node count when the path
/// ends first.
int spread_index(const Flow& flow, std::size_t i, const NocModel& model);

/// Last node of `pk` (by pk order) shared with `pl`; nullopt when disjoint.
std::optional<NodeId> divergence(std::span<const NodeId> pk, std::span<const NodeId> pl);

/// First node along `pf` shared with `pi`; nullopt when disjoint.
std::optional<NodeId> convergence(std::span<const NodeId> pi, std::span<const NodeId> pf);

/// Nodes of flow `k` strictly after its divergence from `ref`, spread-index
/// long, truncated at the path end. nullopt when the paths are disjoint or
/// k's path ends at the divergence node.
std::optional<Subpath> subpath_relative(const Config& config, int k, std::span<const NodeId> ref);

struct DirectBlocker {
    int flow;      // flow index
    int cv_index;  // index in the blocker's own path of the first shared node
    int dv_index;  // index in the blocker's own path of the last shared node
};

/// All flows other than `f` whose path intersects `restrict`, ascending by
/// flow index.
std::vector<DirectBlocker> db_set(const Config& config, int f, std::span<const NodeId> restrict_nodes);

/// Flow-index partition of all other flows by VC priority relative to `f`.
struct PriorityView {
    std::vector<int> hp, sp, lp, shp, slp;
};

PriorityView priority_view(const Config& config, int f);

/// Priority relation helpers (rank comparison; lower rank = higher priority).
bool is_hp(const Config& config, int other, int f);
bool is_sp(const Config& config, int other, int f);
bool is_lp(const Config& config, int other, int f);

}  // namespace wormnc
