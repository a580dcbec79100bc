#include "wormnc/wormsim.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <fstream>
#include <limits>
#include <thread>
#include <unordered_map>

#include "wormnc/errors.hpp"
#include "wormnc/rng.hpp"

namespace wormnc {

const char* sim_event_name(SimEvent e) {
    switch (e) {
        case SimEvent::Inject: return "inject";
        case SimEvent::Arrive: return "arrive";
        case SimEvent::Forward: return "forward";
        case SimEvent::Deliver: return "deliver";
        case SimEvent::Alloc: return "alloc";
        case SimEvent::Release: return "release";
        case SimEvent::Stall: return "stall";
        case SimEvent::Wait: return "wait";
    }
    return "?";
}

namespace {

constexpr int kInputLocal = 4;

struct Flit {
    int flow;
    int seq;
    int idx;
    int hop;
    bool head;
    bool tail;
};

struct Queue {
    std::deque<Flit> flits;
    int inflight = 0;  // forwarded upstream, not yet arrived
};

struct VcState {
    bool active = false;
    int alloc_flow = -1;
    int alloc_seq = -1;
    int alloc_queue = -1;
    int alloc_input = -1;
    int rr = kInputLocal;                     // last granted input port
    std::vector<std::pair<int, int>> inputs;  // (input port, queue index), sorted by port
};

struct Server {
    NodeId node;
    std::int64_t num = 1, den = 1, cap = 1, credit = 0;  // rate R = num/den
    std::int64_t latency = 1;
    Rat latency_rat{1};
    std::vector<VcState> vcs;  // indexed by vc id
};

int input_from_port(Port out) {
    switch (out) {
        case Port::North: return static_cast<int>(Port::South);
        case Port::South: return static_cast<int>(Port::North);
        case Port::East: return static_cast<int>(Port::West);
        case Port::West: return static_cast<int>(Port::East);
        case Port::Local: return kInputLocal;
    }
    return kInputLocal;
}

struct HopInfo {
    int server = -1;
    int queue = -1;
    int next_queue = -1;  // -1 at the last hop
    std::int64_t next_capacity = 0;
};

std::int64_t to_int64(const Rat& r, const char* what) {
    if (r.get_den() != 1 || !r.get_num().fits_slong_p())
        throw ConfigError(std::string("simulator requires integer ") + what + ", got " +
                          rat_to_string(r));
    return r.get_num().get_si();
}

struct Release {
    std::int64_t time;
    int seq;
};

}  // namespace

SimResult simulate(const Config& config, const TrafficSchedule& schedule,
                   std::vector<TraceEvent>* trace) {
    const std::size_t nflows = config.flows.size();
    SimResult result;
    result.flows.resize(nflows);
    if (nflows == 0) return result;

    std::int64_t max_period = 1;
    for (const Flow& f : config.flows)
        max_period = std::max(max_period, to_int64(f.period, "periods"));
    const std::int64_t horizon = schedule.horizon > 0 ? schedule.horizon : 6 * max_period;

    std::vector<std::int64_t> offsets = schedule.offsets;
    if (offsets.empty()) {
        Rng rng(schedule.seed);
        offsets.resize(nflows);
        for (std::size_t i = 0; i < nflows; ++i)
            offsets[i] = static_cast<std::int64_t>(
                rng.below(static_cast<std::uint64_t>(to_int64(config.flows[i].period, "periods"))));
    }
    if (offsets.size() != nflows) throw ConfigError("offset list length does not match flow count");
    result.offsets_used = offsets;

    // Servers exist per active router-output; buffers per (router, input, VC),
    // shared across outputs, which is what head-of-line backpressure needs.
    std::unordered_map<std::uint32_t, int> server_of_node;
    std::vector<Server> servers;
    std::unordered_map<std::uint64_t, int> queue_of;
    std::vector<Queue> queues;
    std::vector<NodeId> queue_pos;  // router coordinates + input port, for traces

    auto ensure_server = [&](const NodeId& n) {
        auto [it, inserted] = server_of_node.emplace(config.noc.node_key(n), static_cast<int>(servers.size()));
        if (inserted) {
            Server s;
            s.node = n;
            const NodeParams& p = config.noc.params(n);
            if (!p.rate.get_num().fits_slong_p() || !p.rate.get_den().fits_slong_p())
                throw ConfigError("simulator cannot represent the rate at " + node_to_string(n));
            s.num = p.rate.get_num().get_si();
            s.den = p.rate.get_den().get_si();
            s.cap = std::max(s.num, s.den);
            s.credit = s.cap;
            s.latency = to_int64(p.latency, "node latencies");
            s.latency_rat = p.latency;
            if (s.latency < 1)
                throw ConfigError("simulator requires node latencies >= 1 cycle at " + node_to_string(n));
            s.vcs.resize(static_cast<std::size_t>(config.noc.vc_count));
            servers.push_back(std::move(s));
        }
        return it->second;
    };
    // Network-side buffers are shared per (router, input, VC); the local
    // injection port is not a shared resource in the timing model, so each
    // flow gets its own injection lane (labelled past the four mesh inputs).
    auto ensure_queue = [&](int x, int y, int input, int vc) {
        std::uint64_t key = ((static_cast<std::uint64_t>(y * config.noc.width + x)) << 32) |
                            (static_cast<std::uint64_t>(input) << 8) |
                            static_cast<std::uint64_t>(vc);
        auto [it, inserted] = queue_of.emplace(key, static_cast<int>(queues.size()));
        if (inserted) {
            queues.emplace_back();
            queue_pos.push_back(NodeId{x, y, input < 5 ? static_cast<Port>(input) : Port::Local});
        }
        return it->second;
    };

    std::vector<std::vector<HopInfo>> hops(nflows);
    for (std::size_t fi = 0; fi < nflows; ++fi) {
        const Flow& f = config.flows[fi];
        if (f.path.empty()) throw ConfigError("flow " + std::to_string(f.id) + " is not routed");
        hops[fi].resize(f.path.size());
        for (std::size_t h = 0; h < f.path.size(); ++h) {
            const NodeId& n = f.path[h];
            int input = h == 0 ? kInputLocal + static_cast<int>(fi)
                               : input_from_port(f.path[h - 1].port);
            int server = ensure_server(n);
            int queue = ensure_queue(n.x, n.y, input, f.vc);
            hops[fi][h].server = server;
            hops[fi][h].queue = queue;
            auto& vcstate = servers[static_cast<std::size_t>(server)].vcs[static_cast<std::size_t>(f.vc)];
            if (std::none_of(vcstate.inputs.begin(), vcstate.inputs.end(),
                             [&](const auto& pr) { return pr.second == queue; }))
                vcstate.inputs.emplace_back(input, queue);
        }
        for (std::size_t h = 0; h + 1 < f.path.size(); ++h) {
            hops[fi][h].next_queue = hops[fi][h + 1].queue;
            hops[fi][h].next_capacity = config.noc.params(f.path[h + 1]).buffer;
        }
    }
    for (Server& s : servers)
        for (VcState& vs : s.vcs) std::sort(vs.inputs.begin(), vs.inputs.end());

    // Downstream-first processing order (reverse topological order of the
    // hop-successor relation): a flit that leaves a buffer frees it for the
    // upstream node within the same cycle, so a B=1 pipeline sustains full rate.
    std::vector<int> order;
    {
        std::vector<std::vector<int>> succ(servers.size());
        std::vector<int> indeg(servers.size(), 0);
        for (std::size_t fi = 0; fi < nflows; ++fi)
            for (std::size_t h = 0; h + 1 < hops[fi].size(); ++h) {
                int u = hops[fi][h].server, v = hops[fi][h + 1].server;
                auto& edges = succ[static_cast<std::size_t>(u)];
                if (std::find(edges.begin(), edges.end(), v) == edges.end()) {
                    edges.push_back(v);
                    ++indeg[static_cast<std::size_t>(v)];
                }
            }
        std::deque<int> ready;
        for (std::size_t i = 0; i < servers.size(); ++i)
            if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
        std::vector<bool> placed(servers.size(), false);
        while (!ready.empty()) {
            int u = ready.front();
            ready.pop_front();
            order.push_back(u);
            placed[static_cast<std::size_t>(u)] = true;
            for (int v : succ[static_cast<std::size_t>(u)])
                if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
        }
        for (std::size_t i = 0; i < servers.size(); ++i)
            if (!placed[i]) order.push_back(static_cast<int>(i));  // cycle fallback, stable
        std::reverse(order.begin(), order.end());
    }

    // Releases: the first activation carries the whole burst back-to-back,
    // later activations one packet per period; that is the maximal pattern
    // inside the flow's leaky-bucket envelope.
    std::vector<std::vector<Release>> releases(nflows);
    std::vector<std::vector<std::int64_t>> release_time(nflows);
    Rng jitter_rng(schedule.seed ^ 0x5bf0f1edULL);
    for (std::size_t fi = 0; fi < nflows; ++fi) {
        const Flow& f = config.flows[fi];
        std::int64_t period = to_int64(f.period, "periods");
        std::int64_t jitter = to_int64(f.jitter, "jitters");
        int seq = 0;
        std::int64_t prev = 0;
        for (std::int64_t k = 0;; ++k) {
            std::int64_t rt = offsets[fi] + k * period;
            if (rt >= horizon) break;
            if (jitter > 0) rt += jitter_rng.range(0, jitter);
            rt = std::max(rt, prev);
            prev = rt;
            int count = k == 0 ? static_cast<int>(f.burst) : 1;
            for (int c = 0; c < count; ++c) {
                releases[fi].push_back(Release{rt, seq});
                release_time[fi].push_back(rt);
                ++seq;
            }
        }
        result.flows[fi].packets_released = seq;
        result.flows[fi].delays.assign(static_cast<std::size_t>(seq), Rat(0));
    }

    std::vector<std::size_t> next_release(nflows, 0);
    std::vector<int> inject_idx(nflows, -1);
    std::unordered_map<std::int64_t, std::vector<std::pair<int, Flit>>> arrivals;

    // Detection window: ten times the total pipeline depth, widened by the
    // slowest credit-refill interval so fractional rates cannot look idle.
    std::int64_t sum_latency = 0;
    std::int64_t slowest_interval = 1;
    for (const Server& s : servers) {
        sum_latency += s.latency;
        slowest_interval = std::max(slowest_interval, (s.den + s.num - 1) / s.num);
    }
    const std::int64_t idle_window = 10 * (sum_latency + slowest_interval);

    std::int64_t undelivered = 0;
    for (std::size_t fi = 0; fi < nflows; ++fi) undelivered += result.flows[fi].packets_released;
    std::int64_t flits_in_network = 0;
    std::int64_t total_releases_left = undelivered;

    auto emit = [&](std::int64_t cycle, const NodeId& node, int vc, int flow_idx, SimEvent e) {
        if (trace)
            trace->push_back(TraceEvent{cycle, node, vc,
                                        config.flows[static_cast<std::size_t>(flow_idx)].id, e});
    };

    std::vector<int> rank_order(static_cast<std::size_t>(config.noc.vc_count));
    {
        std::vector<std::pair<int, int>> ranked;
        for (int vc = 0; vc < config.noc.vc_count; ++vc) ranked.emplace_back(config.vc_rank(vc), vc);
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t i = 0; i < ranked.size(); ++i) rank_order[i] = ranked[i].second;
    }

    std::int64_t t = 0;
    std::int64_t idle_cycles = 0;
    while (true) {
        bool moved = false;

        if (auto it = arrivals.find(t); it != arrivals.end()) {
            for (auto& [qi, flit] : it->second) {
                Queue& q = queues[static_cast<std::size_t>(qi)];
                q.flits.push_back(flit);
                q.inflight -= 1;
                emit(t, queue_pos[static_cast<std::size_t>(qi)],
                     config.flows[static_cast<std::size_t>(flit.flow)].vc, flit.flow, SimEvent::Arrive);
                moved = true;
            }
            arrivals.erase(it);
        }

        // Injection: one flit per flow per cycle into the flow's own lane;
        // packets enter whole-packet-at-a-time, so lanes stay contiguous.
        for (std::size_t fi = 0; fi < nflows; ++fi) {
            if (next_release[fi] >= releases[fi].size()) continue;
            const Release& rel = releases[fi][next_release[fi]];
            if (rel.time > t) continue;
            const Flow& f = config.flows[fi];
            Queue& q0 = queues[static_cast<std::size_t>(hops[fi][0].queue)];
            if (inject_idx[fi] < 0) inject_idx[fi] = 0;
            std::int64_t capacity = config.noc.params(f.path[0]).buffer;
            if (static_cast<std::int64_t>(q0.flits.size()) + q0.inflight >= capacity) continue;
            Flit flit{static_cast<int>(fi), rel.seq, inject_idx[fi], 0, inject_idx[fi] == 0,
                      inject_idx[fi] == static_cast<int>(f.length) - 1};
            q0.flits.push_back(flit);
            result.flows[fi].flits_injected += 1;
            ++flits_in_network;
            emit(t, f.path[0], f.vc, static_cast<int>(fi), SimEvent::Inject);
            moved = true;
            if (++inject_idx[fi] >= static_cast<int>(f.length)) {
                inject_idx[fi] = -1;
                ++next_release[fi];
                --total_releases_left;
            }
        }

        for (int si : order) {
            Server& s = servers[static_cast<std::size_t>(si)];
            s.credit = std::min(s.credit + s.num, s.cap);
            while (s.credit >= s.den) {
                bool forwarded = false;
                for (int vc : rank_order) {
                    VcState& vs = s.vcs[static_cast<std::size_t>(vc)];
                    if (vs.inputs.empty()) continue;

                    if (!vs.active) {
                        int n = static_cast<int>(vs.inputs.size());
                        int start = 0;
                        for (int i = 0; i < n; ++i)
                            if (vs.inputs[static_cast<std::size_t>(i)].first == vs.rr) {
                                start = i + 1;
                                break;
                            }
                        for (int k = 0; k < n; ++k) {
                            const auto& [input, qi] = vs.inputs[static_cast<std::size_t>((start + k) % n)];
                            const Queue& q = queues[static_cast<std::size_t>(qi)];
                            if (q.flits.empty()) continue;
                            const Flit& front = q.flits.front();
                            if (!front.head) continue;
                            if (hops[static_cast<std::size_t>(front.flow)][static_cast<std::size_t>(front.hop)].server != si)
                                continue;  // routed through another output
                            vs.active = true;
                            vs.alloc_flow = front.flow;
                            vs.alloc_seq = front.seq;
                            vs.alloc_queue = qi;
                            vs.alloc_input = input;
                            emit(t, s.node, vc, front.flow, SimEvent::Alloc);
                            break;
                        }
                    }
                    if (!vs.active) continue;

                    Queue& q = queues[static_cast<std::size_t>(vs.alloc_queue)];
                    if (q.flits.empty() || q.flits.front().flow != vs.alloc_flow ||
                        q.flits.front().seq != vs.alloc_seq)
                        continue;  // next flit still upstream; lower VCs bypass
                    Flit flit = q.flits.front();
                    const HopInfo& hop = hops[static_cast<std::size_t>(flit.flow)][static_cast<std::size_t>(flit.hop)];
                    if (hop.next_queue >= 0) {
                        Queue& tq = queues[static_cast<std::size_t>(hop.next_queue)];
                        if (static_cast<std::int64_t>(tq.flits.size()) + tq.inflight >= hop.next_capacity) {
                            emit(t, s.node, vc, flit.flow, SimEvent::Stall);
                            continue;  // backpressure; lower VCs bypass
                        }
                    }
                    q.flits.pop_front();
                    emit(t, s.node, vc, flit.flow, SimEvent::Forward);
                    FlowSimStats& st = result.flows[static_cast<std::size_t>(flit.flow)];
                    if (hop.next_queue < 0) {
                        st.flits_delivered += 1;
                        --flits_in_network;
                        if (flit.tail) {
                            // tail transmission completes after latency + 1/R
                            Rat delivered = Rat(static_cast<long>(t)) + s.latency_rat +
                                            Rat(static_cast<long>(s.den), static_cast<long>(s.num));
                            delivered.canonicalize();
                            Rat delay = delivered -
                                        Rat(static_cast<long>(
                                            release_time[static_cast<std::size_t>(flit.flow)]
                                                        [static_cast<std::size_t>(flit.seq)]));
                            st.delays[static_cast<std::size_t>(flit.seq)] = delay;
                            if (delay > st.max_delay) st.max_delay = delay;
                            st.packets_delivered += 1;
                            --undelivered;
                            emit(t, s.node, vc, flit.flow, SimEvent::Deliver);
                        }
                    } else {
                        Queue& tq = queues[static_cast<std::size_t>(hop.next_queue)];
                        tq.inflight += 1;
                        Flit nf = flit;
                        nf.hop += 1;
                        arrivals[t + s.latency].emplace_back(hop.next_queue, nf);
                    }
                    if (flit.tail) {
                        vs.active = false;
                        vs.rr = vs.alloc_input;
                        vs.alloc_flow = vs.alloc_seq = vs.alloc_queue = vs.alloc_input = -1;
                        emit(t, s.node, vc, flit.flow, SimEvent::Release);
                    }
                    forwarded = true;
                    moved = true;
                    break;
                }
                if (!forwarded) break;
                s.credit -= s.den;
            }

            if (trace) {
                // Heads waiting for this output while another packet holds it.
                for (int vc : rank_order) {
                    const VcState& vs = s.vcs[static_cast<std::size_t>(vc)];
                    for (const auto& [input, qi] : vs.inputs) {
                        const Queue& q = queues[static_cast<std::size_t>(qi)];
                        if (q.flits.empty()) continue;
                        const Flit& front = q.flits.front();
                        if (!front.head) continue;
                        if (hops[static_cast<std::size_t>(front.flow)][static_cast<std::size_t>(front.hop)].server != si)
                            continue;
                        if (vs.active && (front.flow != vs.alloc_flow || front.seq != vs.alloc_seq))
                            emit(t, s.node, vc, front.flow, SimEvent::Wait);
                    }
                }
            }
        }

        if (total_releases_left == 0 && undelivered == 0) {
            result.cycles_run = t;
            break;
        }

        bool injecting = std::any_of(inject_idx.begin(), inject_idx.end(),
                                     [](int v) { return v >= 0; });
        if (!moved && flits_in_network == 0 && !injecting) {
            // Quiet gap: jump to the next release.
            std::int64_t nxt = std::numeric_limits<std::int64_t>::max();
            for (std::size_t fi = 0; fi < nflows; ++fi)
                if (next_release[fi] < releases[fi].size())
                    nxt = std::min(nxt, releases[fi][next_release[fi]].time);
            if (nxt == std::numeric_limits<std::int64_t>::max())
                throw InternalError("simulation stuck with no pending work");
            idle_cycles = 0;
            t = std::max(t + 1, nxt);
            continue;
        }

        idle_cycles = moved ? 0 : idle_cycles + 1;
        if (idle_cycles > idle_window)
            throw DeadlockDetected("no flit moved for " + std::to_string(idle_window) +
                                   " cycles at cycle " + std::to_string(t) + " with " +
                                   std::to_string(undelivered) + " packets pending");
        ++t;
    }

    return result;
}

namespace {

std::int64_t auto_horizon(const Config& config) {
    std::int64_t max_period = 1;
    for (const Flow& f : config.flows)
        max_period = std::max(max_period, to_int64(f.period, "periods"));
    return 6 * max_period;
}

}  // namespace

TightnessResult tightness_sweep(const Config& config, const std::vector<Rat>& bounds,
                                const TightnessOptions& options) {
    const std::size_t nflows = config.flows.size();
    if (bounds.size() != nflows)
        throw ConfigError("bounds list length does not match flow count");

    TightnessResult res;
    res.bound = bounds;
    res.max_delay.assign(nflows, Rat(0));
    res.tau.assign(nflows, 0.0);
    if (nflows == 0 || options.runs <= 0) return res;

    std::int64_t horizon = options.horizon > 0 ? options.horizon : auto_horizon(config);

    std::vector<std::vector<Rat>> per_run(static_cast<std::size_t>(options.runs));
    std::vector<std::string> run_errors(static_cast<std::size_t>(options.runs));
    int jobs = std::max(1, std::min(options.jobs, options.runs));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int r = next.fetch_add(1); r < options.runs; r = next.fetch_add(1)) {
            TrafficSchedule sched;
            sched.seed = Rng::mix(options.seed, static_cast<std::uint64_t>(r));
            sched.horizon = horizon;
            try {
                SimResult sim = simulate(config, sched);
                std::vector<Rat> maxima(nflows, Rat(0));
                for (std::size_t fi = 0; fi < nflows; ++fi) maxima[fi] = sim.flows[fi].max_delay;
                per_run[static_cast<std::size_t>(r)] = std::move(maxima);
            } catch (const Error& e) {
                run_errors[static_cast<std::size_t>(r)] = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int r = 0; r < options.runs; ++r) {
        if (!run_errors[static_cast<std::size_t>(r)].empty())
            throw Error("run " + std::to_string(r) + ": " + run_errors[static_cast<std::size_t>(r)]);
        const auto& maxima = per_run[static_cast<std::size_t>(r)];
        for (std::size_t fi = 0; fi < nflows; ++fi) {
            if (maxima[fi] > bounds[fi])
                throw SafetyViolation(
                    config.flows[fi].id, Rng::mix(options.seed, static_cast<std::uint64_t>(r)),
                    "flow " + std::to_string(config.flows[fi].id) + " observed delay " +
                        rat_to_decimal(maxima[fi], 6) + " exceeds bound " +
                        rat_to_decimal(bounds[fi], 6) + " in run " + std::to_string(r));
            if (maxima[fi] > res.max_delay[fi]) res.max_delay[fi] = maxima[fi];
        }
    }

    double sum = 0;
    int counted = 0;
    for (std::size_t fi = 0; fi < nflows; ++fi) {
        if (bounds[fi] > 0) {
            res.tau[fi] = rat_to_double(res.max_delay[fi] / bounds[fi]);
            sum += res.tau[fi];
            ++counted;
        }
    }
    res.avg_tau = counted > 0 ? sum / counted : 0.0;
    return res;
}

void write_trace_csv(const std::vector<TraceEvent>& trace, const Config& config,
                     const std::string& path) {
    (void)config;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace file: " + path);
    out << "cycle,node,vc,flow,event\n";
    for (const TraceEvent& e : trace)
        out << e.cycle << "," << e.node.x << ":" << e.node.y << ":" << port_char(e.node.port) << ","
            << e.vc << "," << e.flow_id << "," << sim_event_name(e.event) << "\n";
}

}  // namespace wormnc
