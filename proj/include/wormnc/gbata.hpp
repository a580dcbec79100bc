#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wormnc/bata.hpp"
#include "wormnc/interference.hpp"

namespace wormnc {

/// Dependency-graph vertex: a flow together with one of its subpaths. Edges
/// mirror each other: u in v.dependencies iff v in u.dependents.
struct Vertex {
    int fkey;      // flow index
    Subpath path;  // the root vertex carries the analyzed path itself
    std::vector<int> dependencies;  // vertices this one was computed from
    std::vector<int> dependents;    // vertices computed from this one
};

struct IBGraph {
    std::vector<Vertex> vertices;  // vertices[0] is the root
    std::int64_t next_vertices_calls = 0;

    int find(int fkey, const Subpath& path) const;
};

/// Candidate emitted by one expansion step, before duplicate merging.
struct VertexCandidate {
    int fkey;
    Subpath path;
    int parent;  // vertex index the candidate was computed from
};

/// One frontier expansion: for every frontier vertex and every flow of the
/// same VC (the vertex's own flow included, which is what chains consecutive
/// packets), emit the relative subpath when it is non-empty.
std::vector<VertexCandidate> get_next_vertices(const Config& config, const IBGraph& graph,
                                               const std::vector<int>& frontier);

/// Breadth-first closure over `get_next_vertices`, merging duplicate
/// (flow, subpath) vertices and expanding only newly inserted ones.
IBGraph construct_ib_graph(const Config& config, int f);

/// Variant rooted at a path prefix, used by the end-to-end recursion.
IBGraph construct_ib_graph_over(const Config& config, int f, int prefix_len);

/// Pairs (flow, subpath) of all vertices whose flow neither is `f` nor
/// directly blocks `f` anywhere on f's whole path.
IBSet extract_ib_set(const IBGraph& graph, const Config& config, int f);

/// Indirect-blocking latency with single-packet entry bursts (L_k + J_k*rho_k)
/// and no upstream curve propagation.
Rat gbata_indirect_latency(const Config& config, int f, const IBSet& ib);

/// DOT rendering; vertices are labeled "flowId:startIdx+len" and dependency
/// edges point from dependent to dependency.
std::string to_dot(const IBGraph& graph, const Config& config);

}  // namespace wormnc
