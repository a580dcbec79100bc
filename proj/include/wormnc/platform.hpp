#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wormnc/rational.hpp"

namespace wormnc {

enum class Port : std::uint8_t { North = 0, South = 1, East = 2, West = 3, Local = 4 };

char port_char(Port p);
std::optional<Port> port_from_string(const std::string& s);

/// A node is a router-output pair; the grid's y axis grows northward.
struct NodeId {
    int x = 0;
    int y = 0;
    Port port = Port::Local;

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string node_to_string(const NodeId& n);

struct Coord {
    int x = 0;
    int y = 0;
    friend auto operator<=>(const Coord&, const Coord&) = default;
};

struct NodeParams {
    Rat rate{1};         // R^r, flits/cycle, > 0
    Rat latency{1};      // T^r, cycles, >= 0
    std::int64_t buffer = 1;  // B^r, flits per VC, >= 1
};

struct NocModel {
    int width = 0;
    int height = 0;
    NodeParams defaults;
    std::vector<std::pair<NodeId, NodeParams>> overrides;
    std::int64_t flit_size = 1;  // S_flit, flits
    int vc_count = 1;

    bool in_grid(const Coord& c) const { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; }
    bool in_grid(const NodeId& n) const { return in_grid(Coord{n.x, n.y}); }
    const NodeParams& params(const NodeId& n) const;

    std::size_t node_count() const { return static_cast<std::size_t>(width) * height * 5; }
    std::uint32_t node_key(const NodeId& n) const {
        return static_cast<std::uint32_t>((n.y * width + n.x) * 5 + static_cast<int>(n.port));
    }
};

struct Flow {
    int id = 0;
    Coord src;
    Coord dst;
    std::int64_t length = 1;   // L_f, flits
    Rat period{1};             // P_f, cycles
    std::int64_t burst = 1;    // b_f, packets per burst
    Rat jitter{0};             // J_f, cycles
    int vc = 0;
    std::vector<NodeId> path;  // router-outputs from source output to (dst, Local)

    Rat rho;    // L_f / P_f
    Rat sigma;  // b_f * L_f + J_f * rho_f

    void derive_curve_params();
};

/// Deterministic XY route: full X traversal (East/West), then Y (North/South),
/// terminated by the destination router's Local output. Throws OutOfGrid.
std::vector<NodeId> xy_route(const NocModel& model, Coord src, Coord dst);

struct ValidationIssue {
    enum class Kind {
        Grid,
        Path,
        OverUtilized,
        Reconvergence,
        DuplicateId,
        Degenerate,
        VcIndex,
        Priorities,
        Params,
    };
    Kind kind;
    std::string message;
};

class Config {
  public:
    NocModel noc;
    std::vector<Flow> flows;
    std::vector<int> priority_order;  // VC indices in decreasing priority

    /// Rebuild the derived lookup tables; must be called after any mutation.
    void build_caches();

    int flow_index(int flow_id) const;
    const Flow& flow_by_id(int flow_id) const { return flows[static_cast<std::size_t>(flow_index(flow_id))]; }

    /// Priority rank of a VC (0 = highest). Lower rank preempts higher rank.
    int vc_rank(int vc) const { return vc_rank_.at(static_cast<std::size_t>(vc)); }

    /// Index of `node` within flow `fi`'s path, or -1.
    int path_index(std::size_t fi, const NodeId& node) const;

    /// Flow indices crossing `node`, ascending.
    const std::vector<int>& flows_at(const NodeId& node) const;

    std::span<const NodeId> path_of(std::size_t fi) const { return flows[fi].path; }

  private:
    std::vector<int> vc_rank_;
    std::unordered_map<int, int> id_to_index_;
    std::vector<std::unordered_map<std::uint32_t, int>> node_index_;  // per flow
    std::vector<std::vector<int>> flows_at_node_;                     // per node key
    std::vector<int> empty_;
};

/// Collect every model violation: out-of-grid or discontinuous paths,
/// link over-utilization, re-convergent flow pairs, bad identifiers.
std::vector<ValidationIssue> validate(const Config& config);

/// Sum of node latencies along the flow's path.
Rat base_latency(const Flow& flow, const NocModel& model);

/// JSON configuration document (see README for the schema).
Config config_from_json_text(const std::string& text);
Config load_config(const std::string& path);
std::string config_to_json_text(const Config& config);
void save_config(const Config& config, const std::string& path);

}  // namespace wormnc
