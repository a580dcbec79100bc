#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "wormnc/analyzer.hpp"
#include "wormnc/generator.hpp"
#include "wormnc/gbata.hpp"
#include "wormnc/rng.hpp"
#include "wormnc/wormsim.hpp"

using namespace wormnc;

namespace {

constexpr int kCases = 100;

Rat random_rat(Rng& rng, int max_num, int max_den) {
    return make_rat(rng.range(0, max_num), rng.range(1, max_den));
}

Config random_config(std::uint64_t seed, int flows, std::int64_t buffer = 1) {
    GeneratorSpec spec;
    spec.width = 6;
    spec.height = 6;
    spec.flow_count = flows;
    spec.length = {2, 6};
    spec.period = {60, 240};
    spec.burst = {1, 2};
    spec.buffer = buffer;
    spec.seed = seed;
    return generate(spec);
}

}  // namespace

TEST_CASE("curve algebra: two-stage output equals the composed stage") {
    Rng rng(101);
    for (int i = 0; i < kCases; ++i) {
        ArrivalCurve alpha(random_rat(rng, 20, 4), random_rat(rng, 3, 8));
        ServiceCurve b1(alpha.rho + make_rat(rng.range(1, 8), rng.range(1, 4)),
                        random_rat(rng, 10, 3));
        ServiceCurve b2(alpha.rho + make_rat(rng.range(1, 8), rng.range(1, 4)),
                        random_rat(rng, 10, 3));
        ArrivalCurve two = output_curve(output_curve(alpha, b1), b2);
        ServiceCurve composed(std::min(b1.rate, b2.rate), b1.latency + b2.latency);
        ArrivalCurve one = output_curve(alpha, composed);
        CHECK(two.sigma == one.sigma);
        CHECK(two.rho == one.rho);
    }
}

TEST_CASE("curve algebra: burst growth is monotone in every bound") {
    Rng rng(102);
    for (int i = 0; i < kCases; ++i) {
        Rat rho = random_rat(rng, 3, 8);
        ServiceCurve beta(rho + make_rat(rng.range(1, 8), rng.range(1, 4)), random_rat(rng, 10, 3));
        Rat sigma = random_rat(rng, 20, 4);
        Rat bigger = sigma + make_rat(rng.range(1, 9), rng.range(1, 3));
        ArrivalCurve small(sigma, rho), large(bigger, rho);
        CHECK(horizontal_deviation(small, beta).cycles <= horizontal_deviation(large, beta).cycles);
        CHECK(backlog_bound(small, beta) <= backlog_bound(large, beta));
        CHECK(output_curve(small, beta).sigma <= output_curve(large, beta).sigma);
    }
}

TEST_CASE("left-over service without interferers is exact") {
    Rng rng(103);
    for (int i = 0; i < kCases; ++i) {
        std::vector<PmooNode> nodes;
        Rat min_rate;
        Rat latency_sum(0);
        int n = static_cast<int>(rng.range(1, 6));
        for (int k = 0; k < n; ++k) {
            Rat rate = make_rat(rng.range(1, 8), rng.range(1, 4));
            Rat lat = random_rat(rng, 6, 2);
            nodes.push_back(PmooNode{rate, lat, make_rat(0), make_rat(0)});
            if (k == 0 || rate < min_rate) min_rate = rate;
            latency_sum += lat;
        }
        ServiceCurve beta = pmoo_left_over(nodes, {});
        CHECK(beta.rate == min_rate);
        CHECK(beta.latency == latency_sum);
    }
}

TEST_CASE("spread index is non-increasing in buffer size") {
    Rng rng(104);
    NocModel m;
    m.width = 12;
    m.height = 1;
    for (int i = 0; i < kCases; ++i) {
        Flow f;
        f.src = {0, 0};
        f.dst = {11, 0};
        f.length = rng.range(1, 40);
        f.period = make_rat(100);
        f.path = xy_route(m, f.src, f.dst);

        std::int64_t b1 = rng.range(1, 8);
        std::int64_t b2 = b1 + rng.range(1, 8);
        for (std::size_t idx = 0; idx < f.path.size(); ++idx) {
            m.defaults.buffer = b1;
            int small = spread_index(f, idx, m);
            m.defaults.buffer = b2;
            int large = spread_index(f, idx, m);
            CHECK(large <= small);
        }
        m.defaults.buffer = f.length;  // one buffer holds the packet
        CHECK(spread_index(f, 0, m) == 1);
    }
}

TEST_CASE("xy routes are deterministic and minimal") {
    Rng rng(106);
    NocModel m;
    m.width = 9;
    m.height = 7;
    for (int i = 0; i < kCases; ++i) {
        Coord src{static_cast<int>(rng.range(0, m.width - 1)),
                  static_cast<int>(rng.range(0, m.height - 1))};
        Coord dst{static_cast<int>(rng.range(0, m.width - 1)),
                  static_cast<int>(rng.range(0, m.height - 1))};
        if (src == dst) continue;
        auto path = xy_route(m, src, dst);
        CHECK(path == xy_route(m, src, dst));
        std::size_t manhattan = static_cast<std::size_t>(
            std::abs(src.x - dst.x) + std::abs(src.y - dst.y));
        CHECK(path.size() == manhattan + 1);
        CHECK(path.back() == NodeId{dst.x, dst.y, Port::Local});
    }
}

TEST_CASE("direct blocking is symmetric") {
    for (int i = 0; i < kCases; ++i) {
        Config cfg = random_config(200 + static_cast<std::uint64_t>(i), 6);
        for (std::size_t a = 0; a < cfg.flows.size(); ++a) {
            auto da = db_set(cfg, static_cast<int>(a), cfg.path_of(a));
            for (const DirectBlocker& db : da) {
                auto back = db_set(cfg, db.flow, cfg.path_of(static_cast<std::size_t>(db.flow)));
                bool found = std::any_of(back.begin(), back.end(), [&](const DirectBlocker& d) {
                    return d.flow == static_cast<int>(a);
                });
                CHECK(found);
            }
        }
    }
}

TEST_CASE("xy-routed configurations are feed-forward") {
    for (int i = 0; i < kCases; ++i) {
        Config cfg = random_config(300 + static_cast<std::uint64_t>(i), 8);
        for (const auto& issue : validate(cfg))
            CHECK(issue.kind != ValidationIssue::Kind::Reconvergence);
    }
}

TEST_CASE("relative subpaths stay contiguous and disjoint from the reference") {
    Rng rng(105);
    for (int i = 0; i < kCases; ++i) {
        Config cfg = random_config(400 + static_cast<std::uint64_t>(i), 6);
        std::size_t a = static_cast<std::size_t>(rng.below(cfg.flows.size()));
        std::size_t b = static_cast<std::size_t>(rng.below(cfg.flows.size()));
        if (a == b) continue;
        auto sub = subpath_relative(cfg, static_cast<int>(a), cfg.path_of(b));
        if (!sub) continue;
        auto nodes = subpath_nodes(cfg, *sub);
        CHECK(!nodes.empty());
        CHECK(sub->start + sub->len <= static_cast<int>(cfg.flows[a].path.size()));
        for (const NodeId& n : nodes)
            CHECK(std::find(cfg.path_of(b).begin(), cfg.path_of(b).end(), n) ==
                  cfg.path_of(b).end());
    }
}

TEST_CASE("interference graph edges stay symmetric and bounded") {
    for (int i = 0; i < kCases; ++i) {
        Config cfg = random_config(500 + static_cast<std::uint64_t>(i), 6);
        std::size_t path_sum = 0;
        for (const Flow& f : cfg.flows) path_sum += f.path.size();
        std::size_t foi = static_cast<std::uint64_t>(i) % cfg.flows.size();
        IBGraph g = construct_ib_graph(cfg, static_cast<int>(foi));
        CHECK(g.vertices.size() <= 1 + path_sum);
        for (std::size_t vi = 0; vi < g.vertices.size(); ++vi) {
            for (int dep : g.vertices[vi].dependencies) {
                const auto& dd = g.vertices[static_cast<std::size_t>(dep)].dependents;
                CHECK(std::find(dd.begin(), dd.end(), static_cast<int>(vi)) != dd.end());
            }
        }
    }
}

TEST_CASE("growing every buffer shortens or preserves discovered subpaths") {
    // Cardinality of the fixed-point set is NOT monotone in the buffer size in
    // general: a shorter reference subpath can move a blocker's divergence
    // point earlier and turn an empty relative subpath into a real one (see
    // the pinned counterexample below). What does hold is that every
    // discovered subpath is capped by the spread index, which shrinks.
    for (int i = 0; i < kCases; ++i) {
        Config small = random_config(600 + static_cast<std::uint64_t>(i), 6, 1);
        Config large = random_config(600 + static_cast<std::uint64_t>(i), 6, 4);
        // same seed and parameters, only the buffer depth differs
        for (std::size_t fi = 0; fi < small.flows.size(); ++fi) {
            for (const IBPair& pair : bata_ib_set(large, static_cast<int>(fi), large.path_of(fi))) {
                const Flow& f = large.flows[static_cast<std::size_t>(pair.flow)];
                CHECK(pair.sub.len <= spread_index(f, static_cast<std::size_t>(pair.sub.start),
                                                   large.noc));
                CHECK(spread_index(f, static_cast<std::size_t>(pair.sub.start), large.noc) <=
                      spread_index(small.flows[static_cast<std::size_t>(pair.flow)],
                                   static_cast<std::size_t>(pair.sub.start), small.noc));
            }
        }
    }

    // Pinned counterexample to strict cardinality monotonicity: a flow ending
    // inside the long subpath is invisible to it, but diverges from the short
    // one with room left to spread.
    Config small = random_config(606, 6, 1);
    Config large = random_config(606, 6, 4);
    CHECK(bata_ib_set(small, 0, small.path_of(0)).empty());
    CHECK(bata_ib_set(large, 0, large.path_of(0)).size() == 2);
}

TEST_CASE("buffer growth shrinks the blocking sets on the corridor fixture") {
    const char* dir = std::getenv("WORMNC_FIXTURE_DIR");
#ifdef WORMNC_FIXTURE_DIR
    if (!dir) dir = WORMNC_FIXTURE_DIR;
#endif
    Config base = load_config(std::string(dir ? dir : "fixtures") + "/sensitivity_6x6.json");
    std::vector<std::vector<std::size_t>> sizes_by_buffer;
    for (std::int64_t b : {1, 2, 3, 4, 8, 16, 32}) {
        Config cfg = base;
        cfg.noc.defaults.buffer = b;
        cfg.build_caches();
        std::vector<std::size_t> sizes;
        for (std::size_t fi = 0; fi < cfg.flows.size(); ++fi)
            sizes.push_back(bata_ib_set(cfg, static_cast<int>(fi), cfg.path_of(fi)).size());
        sizes_by_buffer.push_back(std::move(sizes));
    }
    for (std::size_t i = 1; i < sizes_by_buffer.size(); ++i)
        for (std::size_t fi = 0; fi < sizes_by_buffer[i].size(); ++fi)
            CHECK(sizes_by_buffer[i][fi] <= sizes_by_buffer[i - 1][fi]);
}

TEST_CASE("inflating any flow's burst or rate never shrinks a bound") {
    Rng rng(107);
    for (int i = 0; i < kCases; ++i) {
        Config base = random_config(800 + static_cast<std::uint64_t>(i), 5, 2);
        Method m = i % 2 == 0 ? Method::Bata : Method::Gbata;
        Analyzer before(base, m);
        AnalysisReport ra = before.analyze_all();

        Config bumped = base;
        std::size_t victim = static_cast<std::size_t>(rng.below(bumped.flows.size()));
        if (i % 4 < 2)
            bumped.flows[victim].burst += 1;  // larger sigma
        else
            bumped.flows[victim].period =
                bumped.flows[victim].period * make_rat(9, 10);  // larger rho
        bumped.build_caches();
        if (!validate(bumped).empty()) continue;  // rate bump broke stability
        Analyzer after(bumped, m);
        AnalysisReport rb = after.analyze_all();
        for (std::size_t fi = 0; fi < ra.rows.size(); ++fi) {
            if (ra.rows[fi].error || rb.rows[fi].error) continue;
            CHECK(rb.rows[fi].delay >= ra.rows[fi].delay);
        }
    }
}

TEST_CASE("simulation is deterministic and conserves flits") {
    for (int i = 0; i < kCases; ++i) {
        Config cfg = random_config(700 + static_cast<std::uint64_t>(i), 4, 2);
        TrafficSchedule sched;
        sched.seed = 900 + static_cast<std::uint64_t>(i);
        SimResult a = simulate(cfg, sched);
        SimResult b = simulate(cfg, sched);
        for (std::size_t fi = 0; fi < cfg.flows.size(); ++fi) {
            CHECK(a.flows[fi].delays == b.flows[fi].delays);
            CHECK(a.flows[fi].flits_injected == a.flows[fi].flits_delivered);
            CHECK(a.flows[fi].packets_released == a.flows[fi].packets_delivered);
            CHECK(a.flows[fi].flits_injected ==
                  a.flows[fi].packets_released * cfg.flows[fi].length);
        }
    }
}
