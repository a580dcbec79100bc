#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wormnc/bata.hpp"
#include "wormnc/gbata.hpp"
#include "wormnc/platform.hpp"

namespace wormnc {

enum class Method { Bata, Gbata };

std::string method_name(Method m);

/// Decomposed end-to-end service curve of a flow over a path prefix.
/// n_e2e / n_iter are logical subtree counts: what a memoization-free
/// evaluation would have performed, so they are deterministic regardless of
/// cache state or scheduling.
struct E2EComponents {
    Rat rate;
    Rat t_path, t_hp, t_sp, t_lp, t_ib;
    std::int64_t n_e2e = 0;
    std::int64_t n_iter = 0;
    std::int64_t own_ib_size = 0;         // IB pairs of this prefix analysis
    std::int64_t own_graph_vertices = 0;  // built graph size (G-BATA only)

    Rat latency() const { return t_path + t_hp + t_sp + t_lp + t_ib; }
    ServiceCurve curve() const { return ServiceCurve(rate, latency()); }
};

struct Instrumentation {
    std::int64_t n_e2e = 0;
    std::int64_t n_iter = 0;
    double dt_total = 0;  // seconds
    double dt_ib = 0;
    double dt_e2e = 0;
};

struct BoundRow {
    int flow_id = 0;
    Method method = Method::Gbata;
    Rat t_path, t_hp, t_sp, t_lp, t_ib, rate, delay;
    Rat period;
    bool cpq_safe = false;
    bool schedulable = false;
    std::int64_t i_db = 0;
    std::int64_t i_ib = 0;
    std::int64_t graph_vertices = 0;
    Instrumentation instr;
    std::optional<std::string> error;
};

struct AnalysisReport {
    Method method = Method::Gbata;
    std::vector<BoundRow> rows;
    double avg_db_index = 0;
    double avg_ib_index = 0;
    Instrumentation totals;
};

struct DirectBlockingResult {
    Rat t_hp, t_sp, t_lp, rate;
};

class Analyzer {
  public:
    /// The configuration must outlive the analyzer and stay unmodified.
    /// `strict_tlp` switches the standalone lower-priority blocking term from
    /// flit-level preemption to full same-priority packet lengths.
    Analyzer(const Config& config, Method method, bool strict_tlp = false);

    E2EComponents end_to_end_service_curve(int flow, int prefix_len);

    /// Burst of the flow at the input of path[prefix_len] (prefix_len == 0
    /// yields the initial burst).
    Rat propagated_burst(int flow, int prefix_len);

    DirectBlockingResult direct_blocking_latency(int flow);

    BoundRow analyze_flow(int flow_index);
    AnalysisReport analyze_all(int jobs = 1);

    const Config& config() const { return config_; }
    Method method() const { return method_; }

  private:
    struct Scratch;
    E2EComponents e2e(int flow, int prefix_len, Scratch& scratch);
    Rat burst_at(int flow, int prefix_len, std::uint64_t from_key, bool ib_edge, Scratch& scratch,
                 E2EComponents& accum);
    void build_break_tables();
    int first_convergence_index(int blocker, std::span<const NodeId> prefix) const;

    const Config& config_;
    Method method_;
    bool strict_tlp_;
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, E2EComponents> cache_;
    // Burst-propagation edges that sit inside a dependency cycle; such
    // dependencies are evaluated with initial bursts (see build_break_tables).
    std::set<std::pair<std::uint64_t, std::uint64_t>> broken_db_;
    std::set<std::pair<std::uint64_t, std::uint64_t>> broken_ib_;
};

std::vector<bool> schedulability_check(const AnalysisReport& report, const Config& config);

}  // namespace wormnc
