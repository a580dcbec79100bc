#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "wormnc/analyzer.hpp"
#include "wormnc/errors.hpp"
#include "wormnc/wormsim.hpp"

using namespace wormnc;
using wormnc::testing::load_fixture;
using wormnc::testing::node;

namespace {

Config isolated_flow() {
    return config_from_json_text(R"({
      "noc": {"width": 5, "height": 1,
              "default": {"rate": 1, "latency": 1, "buffer": 1},
              "flit_size": 1, "vc_count": 1},
      "flows": [{"id": 1, "src": [0,0], "dst": [3,0], "len": 3, "period": 60, "vc": 0}]
    })");
}

}  // namespace

TEST_CASE("an isolated packet achieves exactly its pipeline bound") {
    Config cfg = isolated_flow();
    TrafficSchedule sched;
    sched.offsets = {0};
    sched.horizon = 60;  // a single activation
    SimResult res = simulate(cfg, sched);
    REQUIRE(res.flows[0].packets_delivered == 1);
    CHECK(res.flows[0].max_delay == make_rat(7));  // base latency 4 plus 3 flits

    Analyzer an(cfg, Method::Gbata);
    CHECK(an.analyze_flow(0).delay == make_rat(7));
}

TEST_CASE("a two-packet burst achieves its doubled serialization bound") {
    Config cfg = isolated_flow();
    cfg.flows[0].burst = 2;
    cfg.build_caches();
    TrafficSchedule sched;
    sched.offsets = {0};
    sched.horizon = 60;
    SimResult res = simulate(cfg, sched);
    REQUIRE(res.flows[0].packets_delivered == 2);
    CHECK(res.flows[0].max_delay == make_rat(10));
    Analyzer an(cfg, Method::Gbata);
    CHECK(an.analyze_flow(0).delay == make_rat(10));
}

TEST_CASE("zero flows simulate to an empty result") {
    Config cfg = isolated_flow();
    cfg.flows.clear();
    cfg.build_caches();
    SimResult res = simulate(cfg, TrafficSchedule{});
    CHECK(res.flows.empty());
}

TEST_CASE("identical seeds give bit-identical results") {
    Config cfg = load_fixture("cpq_chain.json");
    TrafficSchedule sched;
    sched.seed = 42;
    std::vector<TraceEvent> t1, t2;
    SimResult a = simulate(cfg, sched, &t1);
    SimResult b = simulate(cfg, sched, &t2);
    REQUIRE(a.flows.size() == b.flows.size());
    CHECK(a.offsets_used == b.offsets_used);
    CHECK(a.cycles_run == b.cycles_run);
    for (std::size_t i = 0; i < a.flows.size(); ++i) {
        CHECK(a.flows[i].delays == b.flows[i].delays);
        CHECK(a.flows[i].flits_injected == b.flows[i].flits_injected);
    }
    REQUIRE(t1.size() == t2.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1[i].cycle == t2[i].cycle);
        CHECK(t1[i].event == t2[i].event);
        CHECK(t1[i].flow_id == t2[i].flow_id);
    }
}

TEST_CASE("flits are conserved across every fixture") {
    for (const char* name :
         {"backpressure_chain.json", "backpressure_chain_gap.json", "cpq_chain.json"}) {
        CAPTURE(name);
        Config cfg = load_fixture(name);
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            TrafficSchedule sched;
            sched.seed = seed;
            SimResult res = simulate(cfg, sched);
            for (const FlowSimStats& st : res.flows) {
                CHECK(st.flits_injected == st.flits_delivered);
                CHECK(st.packets_delivered == st.packets_released);
            }
        }
    }
}

TEST_CASE("backpressure observably blocks the upstream flow") {
    // packet of flow 3 holds its first output while flow 2 spreads backwards,
    // which delays flow 1 beyond its isolated 7-cycle delay
    Config cfg = load_fixture("backpressure_chain.json");
    bool blocked = false;
    for (std::int64_t off3 = 0; off3 <= 4 && !blocked; ++off3) {
        for (std::int64_t off1 = 0; off1 <= 6 && !blocked; ++off1) {
            TrafficSchedule sched;
            sched.offsets = {off1, 0, off3};
            sched.horizon = 60;
            SimResult res = simulate(cfg, sched);
            if (res.flows[0].max_delay > make_rat(7)) blocked = true;
        }
    }
    CHECK(blocked);
}

TEST_CASE("consecutive packets let the distant flow block the head flow") {
    // flow 1 stalls at its shared output while flow 3 still holds its own
    // first output: visible in the trace as overlapping wait/alloc states
    Config cfg = load_fixture("cpq_chain.json");
    bool witnessed = false;
    for (std::int64_t off3 = 0; off3 <= 6 && !witnessed; ++off3) {
        for (std::int64_t off1 = 2; off1 <= 10 && !witnessed; ++off1) {
            TrafficSchedule sched;
            sched.offsets = {off1, 0, off3};
            sched.horizon = 60;
            std::vector<TraceEvent> trace;
            simulate(cfg, sched, &trace);

            // intervals where flow 3 holds its first output (5,1,N)
            std::vector<std::pair<std::int64_t, std::int64_t>> holds;
            std::int64_t open = -1;
            for (const TraceEvent& e : trace) {
                if (e.node == node(5, 1, Port::North) && e.flow_id == 3) {
                    if (e.event == SimEvent::Alloc) open = e.cycle;
                    if (e.event == SimEvent::Release && open >= 0) {
                        holds.emplace_back(open, e.cycle);
                        open = -1;
                    }
                }
            }
            for (const TraceEvent& e : trace) {
                if (e.event == SimEvent::Wait && e.flow_id == 1 &&
                    e.node == node(2, 0, Port::East)) {
                    for (auto [a, b] : holds)
                        if (e.cycle >= a && e.cycle <= b) witnessed = true;
                }
            }
        }
    }
    CHECK(witnessed);
}

TEST_CASE("observed delays never exceed the cpq-safe bounds on the fixtures") {
    for (const char* name :
         {"backpressure_chain.json", "backpressure_chain_gap.json", "cpq_chain.json"}) {
        CAPTURE(name);
        Config cfg = load_fixture(name);
        Analyzer an(cfg, Method::Gbata);
        AnalysisReport report = an.analyze_all();
        std::vector<Rat> bounds;
        for (const BoundRow& row : report.rows) bounds.push_back(row.delay);
        TightnessOptions opt;
        opt.runs = 50;
        opt.seed = 7;
        opt.jobs = 4;
        TightnessResult res = tightness_sweep(cfg, bounds, opt);
        for (double tau : res.tau) CHECK(tau <= 1.0);
    }
}

TEST_CASE("tightness of an isolated flow is exactly one") {
    Config cfg = isolated_flow();
    Analyzer an(cfg, Method::Gbata);
    std::vector<Rat> bounds{an.analyze_flow(0).delay};
    TightnessOptions opt;
    opt.runs = 5;
    opt.seed = 3;
    TightnessResult res = tightness_sweep(cfg, bounds, opt);
    CHECK(res.max_delay[0] == bounds[0]);
    CHECK(res.tau[0] == doctest::Approx(1.0));
}

TEST_CASE("violated bounds raise a safety error naming the flow") {
    Config cfg = isolated_flow();
    std::vector<Rat> bounds{make_rat(5)};  // below the true worst case of 7
    TightnessOptions opt;
    opt.runs = 3;
    opt.seed = 1;
    CHECK_THROWS_AS(tightness_sweep(cfg, bounds, opt), SafetyViolation);
}

TEST_CASE("fractional rates pace forwarding") {
    Config cfg = config_from_json_text(R"({
      "noc": {"width": 3, "height": 1,
              "default": {"rate": "1/2", "latency": 1, "buffer": 4},
              "flit_size": 1, "vc_count": 1},
      "flows": [{"id": 1, "src": [0,0], "dst": [2,0], "len": 2, "period": 40, "vc": 0}]
    })");
    TrafficSchedule sched;
    sched.offsets = {0};
    sched.horizon = 40;
    SimResult res = simulate(cfg, sched);
    REQUIRE(res.flows[0].packets_delivered == 1);
    // bound: sigma/R + sum T = 2/(1/2) + 3 = 7
    Analyzer an(cfg, Method::Gbata);
    Rat bound = an.analyze_flow(0).delay;
    CHECK(res.flows[0].max_delay <= bound);
    CHECK(res.flows[0].max_delay == bound);  // lone flow achieves it exactly
}

TEST_CASE("the oracle exposes the multi-VC serialization boundary") {
    // Known limitation of the analytic accounting, pinned deliberately: with
    // two VCs, higher-priority flits can preempt a same-VC blocker
    // mid-packet, and the stretched packet then holds its wormhole
    // allocation across the gaps. The serialization charge prices one
    // compact packet transmission per shared node, so a crafted offset
    // pattern pushes an observed delay a few percent past the bound. The
    // simulator is the falsification instrument and must keep catching it.
    Config cfg = load_fixture("priority_stretch_6x6.json");
    REQUIRE(validate(cfg).empty());
    Analyzer an(cfg, Method::Gbata);
    BoundRow bound = an.analyze_flow(6);  // flow 7, the low-priority victim
    REQUIRE(!bound.error);

    TrafficSchedule sched;
    sched.offsets = {120, 79, 71, 88, 0, 74, 66, 151};
    sched.horizon = 6 * 300;
    SimResult res = simulate(cfg, sched);
    CHECK(res.flows[6].max_delay > bound.delay);
    CHECK(res.flows[6].max_delay < bound.delay * make_rat(11, 10));  // a boundary, not a blowup

    std::vector<Rat> bounds;
    AnalysisReport report = an.analyze_all();
    for (const BoundRow& row : report.rows) bounds.push_back(row.delay);
    CHECK_THROWS_AS(
        [&] {
            TightnessOptions opt;
            opt.runs = 20;
            opt.seed = 95;  // run 16 of this chain draws the offending offsets
            opt.jobs = 4;
            tightness_sweep(cfg, bounds, opt);
        }(),
        SafetyViolation);
}

TEST_CASE("non-integer latencies are rejected by the simulator") {
    Config cfg = isolated_flow();
    cfg.noc.defaults.latency = make_rat(1, 2);
    cfg.build_caches();
    CHECK_THROWS_AS(simulate(cfg, TrafficSchedule{}), ConfigError);
}
