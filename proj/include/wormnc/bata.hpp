#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wormnc/curves.hpp"
#include "wormnc/interference.hpp"

namespace wormnc {

struct IBPair {
    int flow;  // flow index
    Subpath sub;

    friend bool operator==(const IBPair&, const IBPair&) = default;
};

using IBSet = std::vector<IBPair>;

struct IBStats {
    std::int64_t iterations = 0;  // worklist pops
};

/// Fixed-point indirect-blocking set: seed the worklist with the subpaths of
/// same-priority direct blockers over `restrict_nodes`, then transitively add
/// every same-priority flow stalled past a worklist subpath. Flows whose only
/// interaction with `f` is direct never enter the result.
IBSet bata_ib_set(const Config& config, int f, std::span<const NodeId> restrict_nodes,
                  const std::vector<int>& to_ignore = {}, IBStats* stats = nullptr);

/// Burst of a flow at the input of path[prefix_len], i.e. propagated through
/// the first prefix_len nodes of its path (prefix_len == 0: initial burst).
using BurstProvider = std::function<Rat(int flow, int prefix_len)>;

/// Burst provider that always returns the initial burst (no propagation).
BurstProvider initial_burst_provider(const Config& config);

/// Service curve granted by a flow's VC over one of its subpaths: residual
/// rate against higher-priority crossers, per-node latency plus flit-level
/// blocking by lower-priority traffic, and one serialized burst term per
/// higher-priority direct blocker of the subpath.
ServiceCurve vc_service_curve(const Config& config, int k, const Subpath& sub,
                              const BurstProvider& burst_at);

/// Indirect-blocking latency: for each pair, the pair flow's burst propagated
/// to the subpath entry over the VC-service curve of the subpath.
Rat bata_indirect_latency(const Config& config, int f, const IBSet& ib, const BurstProvider& burst_at);

}  // namespace wormnc
