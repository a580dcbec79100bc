#include "wormnc/generator.hpp"

#include <algorithm>

#include "wormnc/errors.hpp"
#include "wormnc/rng.hpp"

namespace wormnc {

namespace {

struct Quadrant {
    int x0, x1, y0, y1;  // inclusive core ranges
};

// Quadrant 1 is the upper-right, numbered counter-clockwise.
Quadrant quadrant(int which, int w, int h) {
    int mx = w / 2, my = h / 2;
    switch (which) {
        case 1: return {mx, w - 1, my, h - 1};
        case 2: return {0, mx - 1, my, h - 1};
        case 3: return {0, mx - 1, 0, my - 1};
        default: return {mx, w - 1, 0, my - 1};
    }
}

Coord draw_in(Rng& rng, const Quadrant& q) {
    return Coord{static_cast<int>(rng.range(q.x0, q.x1)), static_cast<int>(rng.range(q.y0, q.y1))};
}

}  // namespace

Config generate(const GeneratorSpec& spec) {
    if (spec.flow_count < 1) throw ConfigError("generator needs at least one flow");
    if (spec.width < 2 || spec.height < 2)
        throw ConfigError("generator needs at least a 2x2 mesh");

    Config cfg;
    cfg.noc.width = spec.width;
    cfg.noc.height = spec.height;
    cfg.noc.defaults.rate = spec.rate;
    cfg.noc.defaults.latency = spec.latency;
    cfg.noc.defaults.buffer = spec.buffer;
    cfg.noc.vc_count = spec.vc_count;

    Rng rng(spec.seed);
    auto draw_flow = [&](int id) {
        Flow f;
        f.id = id;
        for (int attempt = 0;; ++attempt) {
            if (attempt > spec.max_retries)
                throw GenerationExhausted("could not draw a routable flow");
            if (spec.paradigm == GeneratorSpec::Paradigm::Uniform) {
                f.src = Coord{static_cast<int>(rng.range(0, spec.width - 1)),
                              static_cast<int>(rng.range(0, spec.height - 1))};
                f.dst = Coord{static_cast<int>(rng.range(0, spec.width - 1)),
                              static_cast<int>(rng.range(0, spec.height - 1))};
            } else {
                switch (rng.range(0, 2)) {
                    case 0:  // family A: lower-left to lower-right
                        f.src = draw_in(rng, quadrant(3, spec.width, spec.height));
                        f.dst = draw_in(rng, quadrant(4, spec.width, spec.height));
                        break;
                    case 1:  // family B: lower-right to upper-right
                        f.src = draw_in(rng, quadrant(4, spec.width, spec.height));
                        f.dst = draw_in(rng, quadrant(1, spec.width, spec.height));
                        break;
                    default:  // family C: upper-left to upper-right
                        f.src = draw_in(rng, quadrant(2, spec.width, spec.height));
                        f.dst = draw_in(rng, quadrant(1, spec.width, spec.height));
                        break;
                }
            }
            if (f.src != f.dst) break;
        }
        f.length = rng.range(spec.length.lo, spec.length.hi);
        f.period = Rat(static_cast<long>(rng.range(spec.period.lo, spec.period.hi)));
        f.burst = rng.range(spec.burst.lo, spec.burst.hi);
        f.jitter = Rat(static_cast<long>(rng.range(spec.jitter.lo, spec.jitter.hi)));
        f.vc = static_cast<int>(rng.range(0, spec.vc_count - 1));
        f.path = xy_route(cfg.noc, f.src, f.dst);
        f.derive_curve_params();
        return f;
    };

    for (int i = 0; i < spec.flow_count; ++i) cfg.flows.push_back(draw_flow(i + 1));
    cfg.build_caches();

    // Regenerate offending flows until the configuration validates.
    for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
        auto issues = validate(cfg);
        if (issues.empty()) return cfg;
        // Utilization is the only violation XY-routed random flows can cause;
        // redraw a flow crossing an over-utilized node (round-robin by attempt).
        std::size_t victim = static_cast<std::size_t>(attempt) % cfg.flows.size();
        bool found = false;
        for (const ValidationIssue& issue : issues) {
            if (issue.kind != ValidationIssue::Kind::OverUtilized) continue;
            for (std::size_t fi = 0; fi < cfg.flows.size(); ++fi) {
                for (const NodeId& n : cfg.flows[fi].path) {
                    if (issue.message.find(node_to_string(n)) != std::string::npos) {
                        victim = fi;
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
            if (found) break;
        }
        int id = cfg.flows[victim].id;
        cfg.flows[victim] = draw_flow(id);
        cfg.build_caches();
    }
    throw GenerationExhausted("no stable configuration found within the retry budget");
}

}  // namespace wormnc
