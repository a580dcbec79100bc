#include <doctest.h>

#include "support.hpp"
#include "wormnc/errors.hpp"

using namespace wormnc;
using wormnc::testing::load_fixture;
using wormnc::testing::node;

namespace {

NocModel mesh(int w, int h) {
    NocModel m;
    m.width = w;
    m.height = h;
    return m;
}

}  // namespace

TEST_CASE("xy routing goes east-west first, then north-south") {
    NocModel m = mesh(4, 4);
    auto straight = xy_route(m, {0, 0}, {2, 0});
    CHECK(straight == std::vector<NodeId>{node(0, 0, Port::East), node(1, 0, Port::East),
                                          node(2, 0, Port::Local)});

    auto vertical = xy_route(m, {0, 0}, {0, 3});
    CHECK(vertical.size() == 4);
    CHECK(vertical.front() == node(0, 0, Port::North));
    CHECK(vertical.back() == node(0, 3, Port::Local));

    auto dogleg = xy_route(m, {1, 3}, {3, 1});
    CHECK(dogleg == std::vector<NodeId>{node(1, 3, Port::East), node(2, 3, Port::East),
                                        node(3, 3, Port::South), node(3, 2, Port::South),
                                        node(3, 1, Port::Local)});

    CHECK_THROWS_AS(xy_route(m, {0, 0}, {5, 0}), OutOfGrid);
    CHECK_THROWS_AS(xy_route(m, {1, 1}, {1, 1}), ConfigError);
}

TEST_CASE("fixture configs load, route and validate") {
    for (const char* name : {"backpressure_chain.json", "backpressure_chain_gap.json",
                             "cpq_chain.json", "sensitivity_6x6.json", "exclusive_vc_4x4.json"}) {
        CAPTURE(name);
        Config cfg = load_fixture(name);
        CHECK(validate(cfg).empty());
    }

    Config chain = load_fixture("backpressure_chain.json");
    const Flow& f2 = chain.flow_by_id(2);
    CHECK(f2.path == std::vector<NodeId>{node(2, 0, Port::East), node(3, 0, Port::East),
                                         node(4, 0, Port::East), node(5, 0, Port::North),
                                         node(5, 1, Port::Local)});
    CHECK(f2.rho == make_rat(1, 20));
    CHECK(f2.sigma == make_rat(3));
    CHECK(base_latency(chain.flow_by_id(1), chain.noc) == make_rat(4));
}

TEST_CASE("derived curve parameters embed burst and jitter") {
    Flow f;
    f.length = 4;
    f.period = make_rat(100);
    f.burst = 2;
    f.jitter = make_rat(25);
    f.derive_curve_params();
    CHECK(f.rho == make_rat(1, 25));
    CHECK(f.sigma == make_rat(9));  // 2*4 + 25/25
}

TEST_CASE("validation flags over-utilization with the node name") {
    Config cfg = load_fixture("backpressure_chain.json");
    cfg.flows[0].period = make_rat(2);  // rho = 1.5 > rate 1
    cfg.build_caches();
    auto issues = validate(cfg);
    REQUIRE(!issues.empty());
    bool found = false;
    for (const auto& issue : issues)
        if (issue.kind == ValidationIssue::Kind::OverUtilized &&
            issue.message.find("(0,0,E)") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("validation flags re-convergent manual routes") {
    Config cfg;
    cfg.noc = mesh(4, 4);
    Flow a;
    a.id = 1;
    a.src = {0, 0};
    a.dst = {3, 0};
    a.path = xy_route(cfg.noc, a.src, a.dst);
    Flow b;
    b.id = 2;
    b.src = {0, 0};
    b.dst = {3, 0};
    b.path = {node(0, 0, Port::East), node(1, 0, Port::North), node(1, 1, Port::East),
              node(2, 1, Port::South), node(2, 0, Port::East), node(3, 0, Port::Local)};
    for (Flow* f : {&a, &b}) {
        f->length = 2;
        f->period = make_rat(100);
    }
    cfg.flows = {a, b};
    cfg.build_caches();
    auto issues = validate(cfg);
    bool found = false;
    for (const auto& issue : issues)
        if (issue.kind == ValidationIssue::Kind::Reconvergence) found = true;
    CHECK(found);
}

TEST_CASE("validation rejects degenerate and duplicate flows") {
    Config cfg;
    cfg.noc = mesh(3, 3);
    Flow a;
    a.id = 1;
    a.src = {0, 0};
    a.dst = {0, 0};
    a.length = 1;
    a.period = make_rat(10);
    Flow b = a;
    b.dst = {1, 0};
    b.path = xy_route(cfg.noc, b.src, b.dst);
    cfg.flows = {a, b};
    cfg.build_caches();
    auto issues = validate(cfg);
    bool degenerate = false, duplicate = false, unrouted = false;
    for (const auto& issue : issues) {
        if (issue.kind == ValidationIssue::Kind::Degenerate) degenerate = true;
        if (issue.kind == ValidationIssue::Kind::DuplicateId) duplicate = true;
        if (issue.kind == ValidationIssue::Kind::Path) unrouted = true;
    }
    CHECK(degenerate);
    CHECK(duplicate);
    CHECK(unrouted);
}

TEST_CASE("config json round-trips") {
    Config cfg = load_fixture("exclusive_vc_4x4.json");
    Config again = config_from_json_text(config_to_json_text(cfg));
    REQUIRE(again.flows.size() == cfg.flows.size());
    for (std::size_t i = 0; i < cfg.flows.size(); ++i) {
        CHECK(again.flows[i].path == cfg.flows[i].path);
        CHECK(again.flows[i].sigma == cfg.flows[i].sigma);
        CHECK(again.flows[i].vc == cfg.flows[i].vc);
    }
    CHECK(again.noc.vc_count == cfg.noc.vc_count);
}

TEST_CASE("explicit paths and overrides are honored") {
    std::string text = R"({
      "noc": {"width": 3, "height": 3,
              "default": {"rate": 1, "latency": 1, "buffer": 2},
              "overrides": [{"x": 1, "y": 0, "port": "E", "rate": "1/2", "latency": 3, "buffer": 5}],
              "flit_size": 1, "vc_count": 1},
      "flows": [{"id": 7, "src": [0,0], "dst": [2,0], "len": 2, "period": 20,
                 "path": [[0,0,"E"],[1,0,"E"],[2,0,"L"]]}]
    })";
    Config cfg = config_from_json_text(text);
    CHECK(validate(cfg).empty());
    CHECK(cfg.noc.params(node(1, 0, Port::East)).rate == make_rat(1, 2));
    CHECK(cfg.noc.params(node(1, 0, Port::East)).buffer == 5);
    CHECK(cfg.noc.params(node(0, 0, Port::East)).buffer == 2);
    CHECK(base_latency(cfg.flows[0], cfg.noc) == make_rat(5));
}
