#include "wormnc/analyzer.hpp"

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include "wormnc/errors.hpp"

namespace wormnc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t cache_key(int flow, int prefix_len) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(flow)) << 32) |
           static_cast<std::uint32_t>(prefix_len);
}

}  // namespace

std::string method_name(Method m) { return m == Method::Bata ? "bata" : "gbata"; }

struct Analyzer::Scratch {
    std::set<std::uint64_t> in_progress;
    double ib_seconds = 0;
};

// The recursive burst propagation follows a dependency digraph over
// (flow, prefix) keys. Pairwise feed-forward routing keeps shared segments
// contiguous but does not make this digraph acyclic, so dependencies that sit
// inside a strongly connected component are evaluated with the flow's initial
// burst instead of a propagated one (the self-influence exclusion of the
// fixed-point formulation). Direct-blocking edges are resolved first and
// identically for both methods; the extra propagation edges of the
// fixed-point indirect analysis are broken on top of the surviving ones.
void Analyzer::build_break_tables() {
    std::vector<std::uint64_t> keys;
    for (std::size_t fi = 0; fi < config_.flows.size(); ++fi)
        for (std::size_t p = 1; p <= config_.flows[fi].path.size(); ++p)
            keys.push_back(cache_key(static_cast<int>(fi), static_cast<int>(p)));

    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> db_succ;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> ib_succ;
    for (std::uint64_t key : keys) {
        int flow = static_cast<int>(key >> 32);
        int prefix_len = static_cast<int>(key & 0xffffffffu);
        std::span<const NodeId> prefix =
            config_.path_of(static_cast<std::size_t>(flow)).first(static_cast<std::size_t>(prefix_len));

        auto& dsucc = db_succ[key];
        for (const DirectBlocker& db : db_set(config_, flow, prefix)) {
            if (is_lp(config_, db.flow, flow)) continue;
            int cv = first_convergence_index(db.flow, prefix);
            if (cv > 0) dsucc.push_back(cache_key(db.flow, cv));
        }

        if (method_ == Method::Bata) {
            auto& isucc = ib_succ[key];
            auto vc_curve_edges = [&](int owner, const Subpath& sub) {
                std::span<const NodeId> sub_nodes = subpath_nodes(config_, sub);
                for (const DirectBlocker& db : db_set(config_, owner, sub_nodes)) {
                    bool hp = is_hp(config_, db.flow, owner);
                    bool terminating_sp =
                        is_sp(config_, db.flow, owner) &&
                        !subpath_relative(config_, db.flow, sub_nodes).has_value();
                    if (!hp && !terminating_sp) continue;
                    auto cv = convergence(config_.path_of(static_cast<std::size_t>(db.flow)),
                                          config_.path_of(static_cast<std::size_t>(owner)));
                    int cvi = cv ? config_.path_index(static_cast<std::size_t>(db.flow), *cv)
                                 : db.cv_index;
                    if (cvi > 0) isucc.push_back(cache_key(db.flow, cvi));
                }
            };
            for (const IBPair& pair : bata_ib_set(config_, flow, prefix)) {
                if (pair.sub.start > 0) isucc.push_back(cache_key(pair.flow, pair.sub.start));
                vc_curve_edges(pair.flow, pair.sub);
            }
            // suspension charges of direct blockers' tracked subpaths
            for (const DirectBlocker& db : db_set(config_, flow, prefix)) {
                if (!is_sp(config_, db.flow, flow)) continue;
                if (auto sub = subpath_relative(
                        config_, db.flow, config_.path_of(static_cast<std::size_t>(flow))))
                    vc_curve_edges(db.flow, *sub);
            }
        }
    }

    // Iterative Tarjan SCC.
    auto tarjan = [&keys](const auto& succ_of) {
        std::unordered_map<std::uint64_t, int> index, low, comp;
        std::vector<std::uint64_t> stack;
        std::unordered_map<std::uint64_t, bool> on_stack;
        int next_index = 0, next_comp = 0;

        struct Frame {
            std::uint64_t key;
            std::size_t child = 0;
        };
        for (std::uint64_t root : keys) {
            if (index.count(root)) continue;
            std::vector<Frame> call{{root, 0}};
            index[root] = low[root] = next_index++;
            stack.push_back(root);
            on_stack[root] = true;
            while (!call.empty()) {
                Frame& fr = call.back();
                const auto& succ = succ_of(fr.key);
                if (fr.child < succ.size()) {
                    std::uint64_t child = succ[fr.child++];
                    if (!index.count(child)) {
                        index[child] = low[child] = next_index++;
                        stack.push_back(child);
                        on_stack[child] = true;
                        call.push_back(Frame{child, 0});
                    } else if (on_stack[child]) {
                        low[fr.key] = std::min(low[fr.key], index[child]);
                    }
                } else {
                    if (low[fr.key] == index[fr.key]) {
                        for (;;) {
                            std::uint64_t w = stack.back();
                            stack.pop_back();
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if (w == fr.key) break;
                        }
                        ++next_comp;
                    }
                    std::uint64_t done = fr.key;
                    call.pop_back();
                    if (!call.empty())
                        low[call.back().key] = std::min(low[call.back().key], low[done]);
                }
            }
        }
        return comp;
    };

    static const std::vector<std::uint64_t> kNone;
    auto db_only = [&](std::uint64_t k) -> const std::vector<std::uint64_t>& {
        auto it = db_succ.find(k);
        return it == db_succ.end() ? kNone : it->second;
    };
    auto comp_db = tarjan(db_only);
    for (auto& [key, succ] : db_succ)
        for (std::uint64_t child : succ)
            if (comp_db.at(key) == comp_db.at(child)) broken_db_.insert({key, child});

    if (method_ == Method::Bata) {
        std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> combined;
        for (std::uint64_t key : keys) {
            auto& out = combined[key];
            for (std::uint64_t child : db_only(key))
                if (!broken_db_.count({key, child})) out.push_back(child);
            auto it = ib_succ.find(key);
            if (it != ib_succ.end()) out.insert(out.end(), it->second.begin(), it->second.end());
        }
        auto lookup = [&](std::uint64_t k) -> const std::vector<std::uint64_t>& {
            auto it = combined.find(k);
            return it == combined.end() ? kNone : it->second;
        };
        auto comp_full = tarjan(lookup);
        for (auto& [key, succ] : ib_succ)
            for (std::uint64_t child : succ)
                if (comp_full.at(key) == comp_full.at(child)) broken_ib_.insert({key, child});
    }
}

int Analyzer::first_convergence_index(int blocker, std::span<const NodeId> prefix) const {
    for (const NodeId& n : prefix) {
        int idx = config_.path_index(static_cast<std::size_t>(blocker), n);
        if (idx >= 0) return idx;
    }
    return -1;
}

Analyzer::Analyzer(const Config& config, Method method, bool strict_tlp)
    : config_(config), method_(method), strict_tlp_(strict_tlp) {
    build_break_tables();
}

Rat Analyzer::burst_at(int flow, int prefix_len, std::uint64_t from_key, bool ib_edge,
                       Scratch& scratch, E2EComponents& accum) {
    const Flow& f = config_.flows[static_cast<std::size_t>(flow)];
    if (prefix_len <= 0) return f.sigma;
    std::uint64_t key = cache_key(flow, prefix_len);
    const auto& broken = ib_edge ? broken_ib_ : broken_db_;
    if (broken.count({from_key, key})) return f.sigma;  // circular dependency, entry burst
    E2EComponents sub = e2e(flow, prefix_len, scratch);
    accum.n_e2e += sub.n_e2e;
    accum.n_iter += sub.n_iter;
    return output_curve(ArrivalCurve(f.sigma, f.rho), sub.curve()).sigma;
}

E2EComponents Analyzer::e2e(int flow, int prefix_len, Scratch& scratch) {
    std::uint64_t key = cache_key(flow, prefix_len);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    if (!scratch.in_progress.insert(key).second)
        throw InternalError("service-curve recursion re-entered flow " +
                            std::to_string(config_.flows[static_cast<std::size_t>(flow)].id) +
                            " prefix " + std::to_string(prefix_len));

    const Flow& foi = config_.flows[static_cast<std::size_t>(flow)];
    std::span<const NodeId> prefix = std::span<const NodeId>(foi.path).first(static_cast<std::size_t>(prefix_len));
    if (prefix.empty()) throw InternalError("service curve over an empty prefix");

    E2EComponents comp;
    comp.n_e2e = 1;

    // Residual rate against same-or-higher priority crossers, and base latency.
    bool first = true;
    for (const NodeId& n : prefix) {
        const NodeParams& p = config_.noc.params(n);
        Rat residual = p.rate;
        for (int other : config_.flows_at(n))
            if (other != flow && !is_lp(config_, other, flow))
                residual -= config_.flows[static_cast<std::size_t>(other)].rho;
        if (residual <= 0)
            throw UnstableSystem(node_to_string(n), rat_to_double(residual),
                                 "no residual service left for flow " + std::to_string(foi.id) +
                                     " at node " + node_to_string(n));
        if (first || residual < comp.rate) comp.rate = residual;
        first = false;
        comp.t_path += p.latency;
    }
    if (foi.rho > comp.rate)
        throw UnstableSystem(node_to_string(prefix[0]), rat_to_double(comp.rate),
                             "flow " + std::to_string(foi.id) + " demands rate " +
                                 rat_to_string(foi.rho) + " but its residual service is " +
                                 rat_to_string(comp.rate));

    // Per-node serialization length: largest same-priority packet crossing the
    // node, or one flit of lower-priority preemption.
    auto slp_length = [&](const NodeId& n) {
        Rat len(0);
        for (int other : config_.flows_at(n)) {
            if (other == flow) continue;
            if (is_sp(config_, other, flow))
                len = std::max(len, Rat(config_.flows[static_cast<std::size_t>(other)].length));
            else if (is_lp(config_, other, flow))
                len = std::max(len, Rat(config_.noc.flit_size));
        }
        return len;
    };
    auto lp_crosses = [&](const NodeId& n) {
        for (int other : config_.flows_at(n))
            if (is_lp(config_, other, flow)) return true;
        return false;
    };

    comp.t_hp = comp.t_sp = comp.t_lp = comp.t_ib = Rat(0);
    for (const DirectBlocker& db : db_set(config_, flow, prefix)) {
        bool hp = is_hp(config_, db.flow, flow);
        bool sp = is_sp(config_, db.flow, flow);
        if (!hp && !sp) continue;  // lower-priority flows only preempt at flit level
        const Flow& other = config_.flows[static_cast<std::size_t>(db.flow)];
        // First shared node along the prefix; the blocker's burst is paid there.
        int cv_index = first_convergence_index(db.flow, prefix);
        Rat serialization(0);
        for (const NodeId& n : prefix) {
            if (config_.path_index(static_cast<std::size_t>(db.flow), n) < 0) continue;
            const NodeParams& p = config_.noc.params(n);
            serialization += p.latency + slp_length(n) / p.rate;
        }
        Rat burst = burst_at(db.flow, cv_index, key, /*ib_edge=*/false, scratch, comp);
        Rat term = (burst + other.rho * serialization) / comp.rate;
        (hp ? comp.t_hp : comp.t_sp) += term;
    }

    for (const NodeId& n : prefix) {
        const NodeParams& p = config_.noc.params(n);
        if (strict_tlp_)
            comp.t_lp += slp_length(n) / p.rate;
        else if (lp_crosses(n))
            comp.t_lp += Rat(config_.noc.flit_size) / p.rate;
    }

    // Indirect blocking over this prefix. On top of the blocking-pair sum,
    // every subpath that was walked but not priced (the tracked subpaths of
    // direct blockers, and the flow's own queued packets on prefix analyses)
    // gets a suspension charge: the interference part of its VC-service
    // curve. Without it, a direct blocker stalled there by higher-priority
    // traffic or by a flow terminating inside the subpath would delay the
    // analyzed flow for free.
    // The fixed-point method propagates every burst it prices; the graph
    // method keeps its no-upstream-computation discipline and prices with
    // initial bursts.
    BurstProvider provider =
        method_ == Method::Bata
            ? BurstProvider([&](int k, int idx) {
                  return burst_at(k, idx, key, /*ib_edge=*/true, scratch, comp);
              })
            : initial_burst_provider(config_);
    auto suspension = [&](int j, const Subpath& sub) -> Rat {
        ServiceCurve beta = vc_service_curve(config_, j, sub, provider);
        Rat base(0);
        for (const NodeId& n : subpath_nodes(config_, sub)) {
            const NodeParams& p = config_.noc.params(n);
            base += p.latency;
            for (int other : config_.flows_at(n))
                if (is_lp(config_, other, j)) {
                    base += Rat(config_.noc.flit_size) / p.rate;
                    break;
                }
        }
        return beta.latency - base;
    };

    if (method_ == Method::Bata) {
        Clock::time_point t0 = Clock::now();
        IBStats stats;
        IBSet ib = bata_ib_set(config_, flow, prefix, {}, &stats);
        scratch.ib_seconds += seconds_since(t0);
        comp.n_iter += stats.iterations;
        comp.own_ib_size = static_cast<std::int64_t>(ib.size());
        comp.t_ib = bata_indirect_latency(config_, flow, ib, provider);
        for (const DirectBlocker& db : db_set(config_, flow, prefix)) {
            if (!is_sp(config_, db.flow, flow)) continue;
            if (auto sub = subpath_relative(config_, db.flow, foi.path))
                comp.t_ib += suspension(db.flow, *sub);
        }
    } else {
        Clock::time_point t0 = Clock::now();
        IBGraph graph = construct_ib_graph_over(config_, flow, prefix_len);
        scratch.ib_seconds += seconds_since(t0);
        comp.n_iter += graph.next_vertices_calls;
        comp.own_graph_vertices = static_cast<std::int64_t>(graph.vertices.size());
        IBSet ib = extract_ib_set(graph, config_, flow);
        comp.own_ib_size = static_cast<std::int64_t>(ib.size());
        comp.t_ib = gbata_indirect_latency(config_, flow, ib);
        std::vector<bool> direct(config_.flows.size(), false);
        for (const DirectBlocker& db : db_set(config_, flow, config_.path_of(static_cast<std::size_t>(flow))))
            direct[static_cast<std::size_t>(db.flow)] = true;
        for (std::size_t vi = 1; vi < graph.vertices.size(); ++vi) {
            const Vertex& v = graph.vertices[vi];
            if (v.fkey != flow && !direct[static_cast<std::size_t>(v.fkey)]) continue;
            comp.t_ib += suspension(v.fkey, v.path);
        }
    }

    scratch.in_progress.erase(key);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace(key, comp);
    }
    return comp;
}

E2EComponents Analyzer::end_to_end_service_curve(int flow, int prefix_len) {
    Scratch scratch;
    return e2e(flow, prefix_len, scratch);
}

Rat Analyzer::propagated_burst(int flow, int prefix_len) {
    const Flow& f = config_.flows[static_cast<std::size_t>(flow)];
    if (prefix_len <= 0) return f.sigma;
    E2EComponents sub = end_to_end_service_curve(flow, prefix_len);
    return output_curve(ArrivalCurve(f.sigma, f.rho), sub.curve()).sigma;
}

DirectBlockingResult Analyzer::direct_blocking_latency(int flow) {
    E2EComponents c = end_to_end_service_curve(
        flow, static_cast<int>(config_.flows[static_cast<std::size_t>(flow)].path.size()));
    return DirectBlockingResult{c.t_hp, c.t_sp, c.t_lp, c.rate};
}

BoundRow Analyzer::analyze_flow(int flow_index) {
    const Flow& f = config_.flows[static_cast<std::size_t>(flow_index)];
    BoundRow row;
    row.flow_id = f.id;
    row.method = method_;
    row.period = f.period;
    row.cpq_safe = method_ == Method::Gbata;
    row.i_db = static_cast<std::int64_t>(db_set(config_, flow_index, f.path).size());

    Clock::time_point t0 = Clock::now();
    Scratch scratch;
    try {
        E2EComponents c = e2e(flow_index, static_cast<int>(f.path.size()), scratch);
        row.t_path = c.t_path;
        row.t_hp = c.t_hp;
        row.t_sp = c.t_sp;
        row.t_lp = c.t_lp;
        row.t_ib = c.t_ib;
        row.rate = c.rate;
        row.delay = f.sigma / c.rate + c.t_hp + c.t_sp + c.t_lp + c.t_ib + c.t_path;
        row.schedulable = row.delay <= f.period;
        row.i_ib = c.own_ib_size;
        row.graph_vertices = c.own_graph_vertices;
        row.instr.n_e2e = c.n_e2e;
        row.instr.n_iter = c.n_iter;
        double total = seconds_since(t0);
        row.instr.dt_total = total;
        row.instr.dt_ib = scratch.ib_seconds;
        row.instr.dt_e2e = total > scratch.ib_seconds ? total - scratch.ib_seconds : 0.0;
    } catch (const UnstableSystem& e) {
        row.error = std::string("unstable: ") + e.what();
        row.instr.dt_total = seconds_since(t0);
    }
    return row;
}

AnalysisReport Analyzer::analyze_all(int jobs) {
    AnalysisReport report;
    report.method = method_;
    report.rows.resize(config_.flows.size());
    if (config_.flows.empty()) return report;

    int n = static_cast<int>(config_.flows.size());
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) report.rows[static_cast<std::size_t>(i)] = analyze_flow(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&]() {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    report.rows[static_cast<std::size_t>(i)] = analyze_flow(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    double db_sum = 0, ib_sum = 0;
    for (const BoundRow& row : report.rows) {
        db_sum += static_cast<double>(row.i_db);
        ib_sum += static_cast<double>(row.i_ib);
        report.totals.n_e2e += row.instr.n_e2e;
        report.totals.n_iter += row.instr.n_iter;
        report.totals.dt_total += row.instr.dt_total;
        report.totals.dt_ib += row.instr.dt_ib;
        report.totals.dt_e2e += row.instr.dt_e2e;
    }
    report.avg_db_index = db_sum / static_cast<double>(n);
    report.avg_ib_index = ib_sum / static_cast<double>(n);
    return report;
}

std::vector<bool> schedulability_check(const AnalysisReport& report, const Config& config) {
    std::vector<bool> out;
    out.reserve(report.rows.size());
    for (const BoundRow& row : report.rows) {
        const Flow& f = config.flow_by_id(row.flow_id);
        out.push_back(!row.error && row.delay <= f.period);
    }
    return out;
}

}  // namespace wormnc
