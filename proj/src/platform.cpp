#include "wormnc/platform.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wormnc/errors.hpp"

namespace wormnc {

using nlohmann::json;

char port_char(Port p) {
    switch (p) {
        case Port::North: return 'N';
        case Port::South: return 'S';
        case Port::East: return 'E';
        case Port::West: return 'W';
        case Port::Local: return 'L';
    }
    return '?';
}

std::optional<Port> port_from_string(const std::string& s) {
    if (s.empty()) return std::nullopt;
    switch (std::toupper(static_cast<unsigned char>(s[0]))) {
        case 'N': return Port::North;
        case 'S': return Port::South;
        case 'E': return Port::East;
        case 'W': return Port::West;
        case 'L': return Port::Local;
        default: return std::nullopt;
    }
}

std::string node_to_string(const NodeId& n) {
    std::ostringstream os;
    os << "(" << n.x << "," << n.y << "," << port_char(n.port) << ")";
    return os.str();
}

const NodeParams& NocModel::params(const NodeId& n) const {
    for (const auto& [node, p] : overrides)
        if (node == n) return p;
    return defaults;
}

void Flow::derive_curve_params() {
    rho = Rat(length) / period;
    sigma = Rat(burst) * Rat(length) + jitter * rho;
    rho.canonicalize();
    sigma.canonicalize();
}

std::vector<NodeId> xy_route(const NocModel& model, Coord src, Coord dst) {
    if (!model.in_grid(src) || !model.in_grid(dst))
        throw OutOfGrid("route endpoint outside the mesh: (" + std::to_string(src.x) + "," +
                        std::to_string(src.y) + ") -> (" + std::to_string(dst.x) + "," +
                        std::to_string(dst.y) + ")");
    if (src == dst) throw ConfigError("route with identical source and destination");

    std::vector<NodeId> path;
    Coord cur = src;
    while (cur.x != dst.x) {
        Port p = cur.x < dst.x ? Port::East : Port::West;
        path.push_back(NodeId{cur.x, cur.y, p});
        cur.x += cur.x < dst.x ? 1 : -1;
    }
    while (cur.y != dst.y) {
        Port p = cur.y < dst.y ? Port::North : Port::South;
        path.push_back(NodeId{cur.x, cur.y, p});
        cur.y += cur.y < dst.y ? 1 : -1;
    }
    path.push_back(NodeId{dst.x, dst.y, Port::Local});
    return path;
}

void Config::build_caches() {
    vc_rank_.assign(static_cast<std::size_t>(std::max(noc.vc_count, 1)), 0);
    if (priority_order.empty()) {
        for (int v = 0; v < noc.vc_count; ++v) vc_rank_[static_cast<std::size_t>(v)] = v;
    } else {
        for (std::size_t r = 0; r < priority_order.size(); ++r) {
            int vc = priority_order[r];
            if (vc >= 0 && vc < noc.vc_count) vc_rank_[static_cast<std::size_t>(vc)] = static_cast<int>(r);
        }
    }

    id_to_index_.clear();
    node_index_.assign(flows.size(), {});
    flows_at_node_.assign(noc.node_count(), {});
    for (std::size_t fi = 0; fi < flows.size(); ++fi) {
        id_to_index_.emplace(flows[fi].id, static_cast<int>(fi));
        flows[fi].derive_curve_params();
        for (std::size_t i = 0; i < flows[fi].path.size(); ++i) {
            const NodeId& n = flows[fi].path[i];
            if (!noc.in_grid(n)) continue;  // reported by validate()
            node_index_[fi].emplace(noc.node_key(n), static_cast<int>(i));
            auto& at = flows_at_node_[noc.node_key(n)];
            if (at.empty() || at.back() != static_cast<int>(fi)) at.push_back(static_cast<int>(fi));
        }
    }
}

int Config::flow_index(int flow_id) const {
    auto it = id_to_index_.find(flow_id);
    if (it == id_to_index_.end()) throw ConfigError("unknown flow id " + std::to_string(flow_id));
    return it->second;
}

int Config::path_index(std::size_t fi, const NodeId& node) const {
    if (!noc.in_grid(node)) return -1;
    const auto& m = node_index_[fi];
    auto it = m.find(noc.node_key(node));
    return it == m.end() ? -1 : it->second;
}

const std::vector<int>& Config::flows_at(const NodeId& node) const {
    if (!noc.in_grid(node)) return empty_;
    return flows_at_node_[noc.node_key(node)];
}

namespace {

std::optional<Coord> next_router(const NocModel& model, const NodeId& n) {
    Coord c{n.x, n.y};
    switch (n.port) {
        case Port::North: c.y += 1; break;
        case Port::South: c.y -= 1; break;
        case Port::East: c.x += 1; break;
        case Port::West: c.x -= 1; break;
        case Port::Local: return std::nullopt;
    }
    if (!model.in_grid(c)) return std::nullopt;
    return c;
}

}  // namespace

std::vector<ValidationIssue> validate(const Config& config) {
    std::vector<ValidationIssue> issues;
    auto add = [&](ValidationIssue::Kind k, std::string msg) {
        issues.push_back(ValidationIssue{k, std::move(msg)});
    };

    const NocModel& noc = config.noc;
    if (noc.width < 1 || noc.height < 1) add(ValidationIssue::Kind::Grid, "empty mesh");
    if (noc.vc_count < 1) add(ValidationIssue::Kind::Params, "vc_count must be >= 1");
    if (noc.flit_size < 1) add(ValidationIssue::Kind::Params, "flit_size must be >= 1");
    if (noc.defaults.rate <= 0 || noc.defaults.latency < 0 || noc.defaults.buffer < 1)
        add(ValidationIssue::Kind::Params, "default node parameters out of range");
    for (const auto& [node, p] : noc.overrides) {
        if (!noc.in_grid(node))
            add(ValidationIssue::Kind::Grid, "override node outside grid: " + node_to_string(node));
        if (p.rate <= 0 || p.latency < 0 || p.buffer < 1)
            add(ValidationIssue::Kind::Params, "override parameters out of range at " + node_to_string(node));
    }
    if (!config.priority_order.empty()) {
        std::set<int> seen(config.priority_order.begin(), config.priority_order.end());
        if (static_cast<int>(config.priority_order.size()) != noc.vc_count ||
            static_cast<int>(seen.size()) != noc.vc_count || *seen.begin() != 0 ||
            *seen.rbegin() != noc.vc_count - 1)
            add(ValidationIssue::Kind::Priorities,
                "priorities must be a permutation of all VC indices");
    }

    std::set<int> ids;
    for (const Flow& f : config.flows) {
        std::string tag = "flow " + std::to_string(f.id);
        if (!ids.insert(f.id).second) add(ValidationIssue::Kind::DuplicateId, "duplicate " + tag);
        if (f.src == f.dst) add(ValidationIssue::Kind::Degenerate, tag + " has identical source and destination");
        if (!noc.in_grid(f.src) || !noc.in_grid(f.dst))
            add(ValidationIssue::Kind::Grid, tag + " endpoint outside grid");
        if (f.vc < 0 || f.vc >= noc.vc_count) add(ValidationIssue::Kind::VcIndex, tag + " uses invalid VC");
        if (f.length < 1 || f.burst < 1 || f.period <= 0 || f.jitter < 0)
            add(ValidationIssue::Kind::Params, tag + " has out-of-range traffic parameters");

        if (f.path.empty()) {
            add(ValidationIssue::Kind::Path, tag + " is not routed");
            continue;
        }
        bool in_grid = true;
        for (const NodeId& n : f.path)
            if (!noc.in_grid(n)) {
                add(ValidationIssue::Kind::Grid, tag + " path leaves the grid at " + node_to_string(n));
                in_grid = false;
            }
        if (!in_grid) continue;
        if (f.path.front().x != f.src.x || f.path.front().y != f.src.y)
            add(ValidationIssue::Kind::Path, tag + " path does not start at its source router");
        const NodeId& last = f.path.back();
        if (last.port != Port::Local || last.x != f.dst.x || last.y != f.dst.y)
            add(ValidationIssue::Kind::Path, tag + " path does not end at the destination Local output");
        for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
            if (f.path[i].port == Port::Local) {
                add(ValidationIssue::Kind::Path, tag + " has a Local output before the path end");
                break;
            }
            auto nxt = next_router(noc, f.path[i]);
            if (!nxt || nxt->x != f.path[i + 1].x || nxt->y != f.path[i + 1].y) {
                add(ValidationIssue::Kind::Path,
                    tag + " path is discontinuous after " + node_to_string(f.path[i]));
                break;
            }
        }
    }

    // Link utilization: sum of crossing rates must not exceed the node rate.
    std::unordered_map<std::uint32_t, Rat> load;
    for (const Flow& f : config.flows) {
        Rat rho = Rat(f.length) / f.period;
        for (const NodeId& n : f.path) {
            if (!noc.in_grid(n)) continue;
            load[noc.node_key(n)] += rho;
        }
    }
    for (const Flow& f : config.flows) {
        for (const NodeId& n : f.path) {
            if (!noc.in_grid(n)) continue;
            auto it = load.find(noc.node_key(n));
            if (it != load.end() && it->second > noc.params(n).rate) {
                add(ValidationIssue::Kind::OverUtilized,
                    "node " + node_to_string(n) + " over-utilized: demand " +
                        rat_to_string(it->second) + " > rate " + rat_to_string(noc.params(n).rate));
                load.erase(it);  // report each node once
            }
        }
    }

    // Feed-forward: shared nodes of any flow pair form one contiguous,
    // order-consistent segment in both paths.
    for (std::size_t a = 0; a < config.flows.size(); ++a) {
        for (std::size_t b = a + 1; b < config.flows.size(); ++b) {
            const auto& pa = config.flows[a].path;
            std::vector<std::pair<int, int>> shared;  // (index in pa, index in pb)
            for (std::size_t i = 0; i < pa.size(); ++i) {
                int j = config.path_index(b, pa[i]);
                if (j >= 0) shared.emplace_back(static_cast<int>(i), j);
            }
            bool ok = true;
            for (std::size_t s = 0; s + 1 < shared.size(); ++s) {
                if (shared[s + 1].first != shared[s].first + 1 ||
                    shared[s + 1].second != shared[s].second + 1)
                    ok = false;
            }
            if (!ok)
                add(ValidationIssue::Kind::Reconvergence,
                    "flows " + std::to_string(config.flows[a].id) + " and " +
                        std::to_string(config.flows[b].id) + " re-converge after diverging");
        }
    }
    return issues;
}

Rat base_latency(const Flow& flow, const NocModel& model) {
    Rat t(0);
    for (const NodeId& n : flow.path) t += model.params(n).latency;
    return t;
}

namespace {

Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_float()) return rat_from_string(j.dump());  // shortest round-trip decimal
    throw ConfigError("expected a number or rational string, got: " + j.dump());
}

NodeParams node_params_from_json(const json& j, const NodeParams& base) {
    NodeParams p = base;
    if (j.contains("rate")) p.rate = rat_from_json(j.at("rate"));
    if (j.contains("latency")) p.latency = rat_from_json(j.at("latency"));
    if (j.contains("buffer")) p.buffer = j.at("buffer").get<std::int64_t>();
    return p;
}

json rat_to_json(const Rat& r) {
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) return json(r.get_num().get_si());
    return json(rat_to_string(r));
}

}  // namespace

Config config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        Config cfg;
        const json& noc = doc.at("noc");
        cfg.noc.width = noc.at("width").get<int>();
        cfg.noc.height = noc.at("height").get<int>();
        if (noc.contains("default")) cfg.noc.defaults = node_params_from_json(noc.at("default"), NodeParams{});
        if (noc.contains("flit_size")) cfg.noc.flit_size = noc.at("flit_size").get<std::int64_t>();
        cfg.noc.vc_count = noc.value("vc_count", 1);
        if (noc.contains("overrides")) {
            for (const json& o : noc.at("overrides")) {
                auto port = port_from_string(o.at("port").get<std::string>());
                if (!port) throw ConfigError("bad port in override: " + o.dump());
                NodeId node{o.at("x").get<int>(), o.at("y").get<int>(), *port};
                cfg.noc.overrides.emplace_back(node, node_params_from_json(o, cfg.noc.defaults));
            }
        }

        for (const json& jf : doc.value("flows", json::array())) {
            Flow f;
            f.id = jf.at("id").get<int>();
            f.src = Coord{jf.at("src").at(0).get<int>(), jf.at("src").at(1).get<int>()};
            f.dst = Coord{jf.at("dst").at(0).get<int>(), jf.at("dst").at(1).get<int>()};
            f.length = jf.at("len").get<std::int64_t>();
            f.period = rat_from_json(jf.at("period"));
            f.burst = jf.value("burst", std::int64_t{1});
            f.jitter = jf.contains("jitter") ? rat_from_json(jf.at("jitter")) : Rat(0);
            f.vc = jf.value("vc", 0);
            if (jf.contains("path")) {
                for (const json& jn : jf.at("path")) {
                    auto port = port_from_string(jn.at(2).get<std::string>());
                    if (!port) throw ConfigError("bad port in explicit path of flow " + std::to_string(f.id));
                    f.path.push_back(NodeId{jn.at(0).get<int>(), jn.at(1).get<int>(), *port});
                }
            } else {
                f.path = xy_route(cfg.noc, f.src, f.dst);
            }
            f.derive_curve_params();
            cfg.flows.push_back(std::move(f));
        }

        if (doc.contains("priorities"))
            cfg.priority_order = doc.at("priorities").get<std::vector<int>>();
        cfg.build_caches();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    }
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const Config& config) {
    json doc;
    json noc;
    noc["width"] = config.noc.width;
    noc["height"] = config.noc.height;
    noc["default"] = {{"rate", rat_to_json(config.noc.defaults.rate)},
                      {"latency", rat_to_json(config.noc.defaults.latency)},
                      {"buffer", config.noc.defaults.buffer}};
    noc["flit_size"] = config.noc.flit_size;
    noc["vc_count"] = config.noc.vc_count;
    if (!config.noc.overrides.empty()) {
        json arr = json::array();
        for (const auto& [node, p] : config.noc.overrides) {
            arr.push_back({{"x", node.x},
                           {"y", node.y},
                           {"port", std::string(1, port_char(node.port))},
                           {"rate", rat_to_json(p.rate)},
                           {"latency", rat_to_json(p.latency)},
                           {"buffer", p.buffer}});
        }
        noc["overrides"] = arr;
    }
    doc["noc"] = noc;

    json flows = json::array();
    for (const Flow& f : config.flows) {
        json jf = {{"id", f.id},
                   {"src", {f.src.x, f.src.y}},
                   {"dst", {f.dst.x, f.dst.y}},
                   {"len", f.length},
                   {"period", rat_to_json(f.period)},
                   {"burst", f.burst},
                   {"jitter", rat_to_json(f.jitter)},
                   {"vc", f.vc}};
        // Only emit explicit paths that XY routing would not reproduce.
        std::vector<NodeId> xy;
        try {
            xy = xy_route(config.noc, f.src, f.dst);
        } catch (const Error&) {
        }
        if (xy != f.path) {
            json arr = json::array();
            for (const NodeId& n : f.path)
                arr.push_back({n.x, n.y, std::string(1, port_char(n.port))});
            jf["path"] = arr;
        }
        flows.push_back(jf);
    }
    doc["flows"] = flows;
    if (!config.priority_order.empty()) doc["priorities"] = config.priority_order;
    return doc.dump(2) + "\n";
}

void save_config(const Config& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << config_to_json_text(config);
}

}  // namespace wormnc
