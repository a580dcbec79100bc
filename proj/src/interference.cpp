#include "wormnc/interference.hpp"

#include <algorithm>

#include "wormnc/errors.hpp"

namespace wormnc {

std::span<const NodeId> subpath_nodes(const Config& config, const Subpath& sub) {
    const auto& path = config.flows[static_cast<std::size_t>(sub.flow)].path;
    return std::span<const NodeId>(path).subspan(static_cast<std::size_t>(sub.start),
                                                 static_cast<std::size_t>(sub.len));
}

int spread_index(const Flow& flow, std::size_t i, const NocModel& model) {
    if (i >= flow.path.size()) return 0;
    std::int64_t acc = 0;
    int l = 0;
    for (std::size_t j = i; j < flow.path.size(); ++j) {
        acc += model.params(flow.path[j]).buffer;
        ++l;
        if (acc >= flow.length) return l;
    }
    return l;  // path ends first: count of remaining nodes
}

namespace {

bool contains(std::span<const NodeId> nodes, const NodeId& n) {
    return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

}  // namespace

std::optional<NodeId> divergence(std::span<const NodeId> pk, std::span<const NodeId> pl) {
    for (auto it = pk.rbegin(); it != pk.rend(); ++it)
        if (contains(pl, *it)) return *it;
    return std::nullopt;
}

std::optional<NodeId> convergence(std::span<const NodeId> pi, std::span<const NodeId> pf) {
    for (const NodeId& n : pf)
        if (contains(pi, n)) return n;
    return std::nullopt;
}

std::optional<Subpath> subpath_relative(const Config& config, int k, std::span<const NodeId> ref) {
    const Flow& flow = config.flows[static_cast<std::size_t>(k)];
    int last = -1;
    for (int i = static_cast<int>(flow.path.size()) - 1; i >= 0; --i) {
        if (contains(ref, flow.path[static_cast<std::size_t>(i)])) {
            last = i;
            break;
        }
    }
    if (last < 0) return std::nullopt;  // disjoint
    std::size_t start = static_cast<std::size_t>(last) + 1;
    if (start >= flow.path.size()) return std::nullopt;  // path ends at the divergence node
    int len = spread_index(flow, start, config.noc);
    return Subpath{k, static_cast<int>(start), len};
}

std::vector<DirectBlocker> db_set(const Config& config, int f, std::span<const NodeId> restrict_nodes) {
    std::vector<DirectBlocker> out;
    for (std::size_t i = 0; i < config.flows.size(); ++i) {
        if (static_cast<int>(i) == f) continue;
        int cv = -1, dv = -1;
        const auto& path = config.flows[i].path;
        for (int j = 0; j < static_cast<int>(path.size()); ++j) {
            if (contains(restrict_nodes, path[static_cast<std::size_t>(j)])) {
                if (cv < 0) cv = j;
                dv = j;
            }
        }
        if (cv >= 0) out.push_back(DirectBlocker{static_cast<int>(i), cv, dv});
    }
    return out;
}

bool is_hp(const Config& config, int other, int f) {
    return config.vc_rank(config.flows[static_cast<std::size_t>(other)].vc) <
           config.vc_rank(config.flows[static_cast<std::size_t>(f)].vc);
}

bool is_sp(const Config& config, int other, int f) {
    return other != f && config.flows[static_cast<std::size_t>(other)].vc ==
                              config.flows[static_cast<std::size_t>(f)].vc;
}

bool is_lp(const Config& config, int other, int f) {
    return config.vc_rank(config.flows[static_cast<std::size_t>(other)].vc) >
           config.vc_rank(config.flows[static_cast<std::size_t>(f)].vc);
}

PriorityView priority_view(const Config& config, int f) {
    PriorityView v;
    for (std::size_t i = 0; i < config.flows.size(); ++i) {
        int o = static_cast<int>(i);
        if (o == f) continue;
        if (is_hp(config, o, f)) {
            v.hp.push_back(o);
            v.shp.push_back(o);
        } else if (is_sp(config, o, f)) {
            v.sp.push_back(o);
            v.shp.push_back(o);
            v.slp.push_back(o);
        } else {
            v.lp.push_back(o);
            v.slp.push_back(o);
        }
    }
    return v;
}

}  // namespace wormnc
