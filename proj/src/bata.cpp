#include "wormnc/bata.hpp"

#include <deque>
#include <set>

#include "wormnc/errors.hpp"

namespace wormnc {

IBSet bata_ib_set(const Config& config, int f, std::span<const NodeId> restrict_nodes,
                  const std::vector<int>& to_ignore, IBStats* stats) {
    IBSet result;
    std::deque<IBPair> worklist;
    std::set<std::pair<int, int>> seen;  // (flow, subpath start)

    auto ignored = [&](int flow) {
        return std::find(to_ignore.begin(), to_ignore.end(), flow) != to_ignore.end();
    };

    // Seed with same-priority direct blockers over the restricted section;
    // their subpaths are tracked but stay out of the result set.
    std::span<const NodeId> full_path = config.path_of(static_cast<std::size_t>(f));
    for (const DirectBlocker& db : db_set(config, f, restrict_nodes)) {
        if (!is_sp(config, db.flow, f) || ignored(db.flow)) continue;
        if (auto sub = subpath_relative(config, db.flow, full_path)) {
            if (seen.emplace(sub->flow, sub->start).second)
                worklist.push_back(IBPair{db.flow, *sub});
        }
    }

    while (!worklist.empty()) {
        IBPair cur = worklist.front();
        worklist.pop_front();
        if (stats) ++stats->iterations;
        std::span<const NodeId> nodes = subpath_nodes(config, cur.sub);
        for (const DirectBlocker& db : db_set(config, cur.flow, nodes)) {
            if (db.flow == f || !is_sp(config, db.flow, cur.flow)) continue;
            auto sub = subpath_relative(config, db.flow, nodes);
            if (!sub) continue;
            if (!seen.emplace(sub->flow, sub->start).second) continue;
            IBPair pair{db.flow, *sub};
            result.push_back(pair);
            worklist.push_back(pair);
        }
    }
    return result;
}

BurstProvider initial_burst_provider(const Config& config) {
    return [&config](int flow, int) { return config.flows[static_cast<std::size_t>(flow)].sigma; };
}

ServiceCurve vc_service_curve(const Config& config, int k, const Subpath& sub,
                              const BurstProvider& burst_at) {
    std::span<const NodeId> nodes = subpath_nodes(config, sub);
    std::vector<PmooNode> pnodes;
    pnodes.reserve(nodes.size());
    for (const NodeId& n : nodes) {
        const NodeParams& p = config.noc.params(n);
        bool lp_crosses = false;
        for (int other : config.flows_at(n))
            if (is_lp(config, other, k)) lp_crosses = true;
        Rat flit_block = lp_crosses ? Rat(config.noc.flit_size) / p.rate : Rat(0);
        pnodes.push_back(PmooNode{p.rate, p.latency, flit_block, flit_block});
    }

    std::vector<PmooInterferer> interferers;
    for (const DirectBlocker& db : db_set(config, k, nodes)) {
        bool hp = is_hp(config, db.flow, k);
        // A same-VC flow whose path ends inside the subpath never gets a
        // blocking pair of its own (nothing past its divergence to stall on),
        // yet its packets still serialize with the subpath's flow here, so it
        // is charged like a direct interferer of the subpath.
        bool terminating_sp = is_sp(config, db.flow, k) &&
                              !subpath_relative(config, db.flow, nodes).has_value();
        if (!hp && !terminating_sp) continue;
        PmooInterferer it;
        const Flow& other = config.flows[static_cast<std::size_t>(db.flow)];
        it.rho = other.rho;
        // Convergence with k's whole path fixes where the burst is paid.
        auto cv = convergence(other.path, config.path_of(static_cast<std::size_t>(k)));
        int cv_index = cv ? config.path_index(static_cast<std::size_t>(db.flow), *cv) : db.cv_index;
        it.burst_at_convergence = burst_at(db.flow, cv_index);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (config.path_index(static_cast<std::size_t>(db.flow), nodes[i]) >= 0)
                it.shared_nodes.push_back(i);
        interferers.push_back(std::move(it));
    }
    try {
        return pmoo_left_over(pnodes, interferers);
    } catch (UnstableSystem& e) {
        throw UnstableSystem(node_to_string(nodes[0]) + " subpath", e.residual, e.what());
    }
}

Rat bata_indirect_latency(const Config& config, [[maybe_unused]] int f, const IBSet& ib,
                          const BurstProvider& burst_at) {
    Rat total(0);
    for (const IBPair& pair : ib) {
        ServiceCurve beta = vc_service_curve(config, pair.flow, pair.sub, burst_at);
        Rat burst = burst_at(pair.flow, pair.sub.start);
        total += burst / beta.rate + beta.latency;
    }
    return total;
}

}  // namespace wormnc
