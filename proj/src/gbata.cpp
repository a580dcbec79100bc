#include "wormnc/gbata.hpp"

#include <algorithm>
#include <sstream>

namespace wormnc {

int IBGraph::find(int fkey, const Subpath& path) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].fkey == fkey && vertices[i].path == path) return static_cast<int>(i);
    return -1;
}

std::vector<VertexCandidate> get_next_vertices(const Config& config, const IBGraph& graph,
                                               const std::vector<int>& frontier) {
    std::vector<VertexCandidate> out;
    for (int vi : frontier) {
        const Vertex& v = graph.vertices[static_cast<std::size_t>(vi)];
        std::span<const NodeId> ref = subpath_nodes(config, v.path);
        for (std::size_t k = 0; k < config.flows.size(); ++k) {
            int kf = static_cast<int>(k);
            // Backpressure propagates within a VC only; the vertex's own flow
            // participates, which is what models consecutive queued packets.
            if (kf != v.fkey && !is_sp(config, kf, v.fkey)) continue;
            if (auto sub = subpath_relative(config, kf, ref))
                out.push_back(VertexCandidate{kf, *sub, vi});
        }
    }
    return out;
}

namespace {

void link(IBGraph& g, int child, int parent) {
    Vertex& c = g.vertices[static_cast<std::size_t>(child)];
    Vertex& p = g.vertices[static_cast<std::size_t>(parent)];
    if (std::find(c.dependencies.begin(), c.dependencies.end(), parent) == c.dependencies.end())
        c.dependencies.push_back(parent);
    if (std::find(p.dependents.begin(), p.dependents.end(), child) == p.dependents.end())
        p.dependents.push_back(child);
}

IBGraph construct(const Config& config, int f, int root_len) {
    IBGraph g;
    g.vertices.push_back(Vertex{f, Subpath{f, 0, root_len}, {}, {}});

    std::vector<int> frontier{0};
    auto candidates = get_next_vertices(config, g, frontier);
    ++g.next_vertices_calls;
    while (!candidates.empty()) {
        std::vector<int> inserted;
        for (const VertexCandidate& c : candidates) {
            int existing = g.find(c.fkey, c.path);
            if (existing < 0) {
                g.vertices.push_back(Vertex{c.fkey, c.path, {}, {}});
                existing = static_cast<int>(g.vertices.size()) - 1;
                inserted.push_back(existing);
            }
            link(g, existing, c.parent);
        }
        candidates = get_next_vertices(config, g, inserted);
        ++g.next_vertices_calls;
    }
    return g;
}

}  // namespace

IBGraph construct_ib_graph(const Config& config, int f) {
    return construct(config, f, static_cast<int>(config.flows[static_cast<std::size_t>(f)].path.size()));
}

IBGraph construct_ib_graph_over(const Config& config, int f, int prefix_len) {
    return construct(config, f, prefix_len);
}

IBSet extract_ib_set(const IBGraph& graph, const Config& config, int f) {
    std::vector<bool> direct(config.flows.size(), false);
    for (const DirectBlocker& db : db_set(config, f, config.path_of(static_cast<std::size_t>(f))))
        direct[static_cast<std::size_t>(db.flow)] = true;

    IBSet out;
    for (std::size_t i = 1; i < graph.vertices.size(); ++i) {  // skip the root
        const Vertex& v = graph.vertices[i];
        if (v.fkey == f || direct[static_cast<std::size_t>(v.fkey)]) continue;
        out.push_back(IBPair{v.fkey, v.path});
    }
    return out;
}

Rat gbata_indirect_latency(const Config& config, [[maybe_unused]] int f, const IBSet& ib) {
    BurstProvider initial = initial_burst_provider(config);
    Rat total(0);
    for (const IBPair& pair : ib) {
        ServiceCurve beta = vc_service_curve(config, pair.flow, pair.sub, initial);
        const Flow& k = config.flows[static_cast<std::size_t>(pair.flow)];
        Rat one_packet = Rat(k.length) + k.jitter * k.rho;  // single packet, b = 1
        total += one_packet / beta.rate + beta.latency;
    }
    return total;
}

std::string to_dot(const IBGraph& graph, const Config& config) {
    auto label = [&](const Vertex& v) {
        std::ostringstream os;
        os << config.flows[static_cast<std::size_t>(v.fkey)].id << ":" << v.path.start << "+"
           << v.path.len;
        return os.str();
    };
    std::ostringstream os;
    os << "digraph interference {\n";
    for (const Vertex& v : graph.vertices) os << "  \"" << label(v) << "\";\n";
    for (const Vertex& v : graph.vertices)
        for (int dep : v.dependencies)
            os << "  \"" << label(v) << "\" -> \""
               << label(graph.vertices[static_cast<std::size_t>(dep)]) << "\";\n";
    os << "}\n";
    return os.str();
}

}  // namespace wormnc
