#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wormnc/analyzer.hpp"
#include "wormnc/errors.hpp"
#include "wormnc/generator.hpp"
#include "wormnc/gbata.hpp"
#include "wormnc/report_io.hpp"
#include "wormnc/wormsim.hpp"

namespace py = pybind11;
using namespace wormnc;

namespace {

py::dict row_to_dict(const BoundRow& row) {
    py::dict d;
    d["flow_id"] = row.flow_id;
    d["method"] = method_name(row.method);
    if (row.error) {
        d["error"] = *row.error;
        return d;
    }
    d["t_path"] = rat_to_double(row.t_path);
    d["t_hp"] = rat_to_double(row.t_hp);
    d["t_sp"] = rat_to_double(row.t_sp);
    d["t_lp"] = rat_to_double(row.t_lp);
    d["t_ib"] = rat_to_double(row.t_ib);
    d["rate"] = rat_to_double(row.rate);
    d["delay"] = rat_to_double(row.delay);
    d["delay_exact"] = rat_to_string(row.delay);
    d["period"] = rat_to_double(row.period);
    d["schedulable"] = row.schedulable;
    d["cpq_safe"] = row.cpq_safe;
    d["i_db"] = row.i_db;
    d["i_ib"] = row.i_ib;
    d["n_e2e"] = row.instr.n_e2e;
    d["n_iter"] = row.instr.n_iter;
    return d;
}

Method parse_method(const std::string& name) {
    if (name == "bata") return Method::Bata;
    if (name == "gbata") return Method::Gbata;
    throw ConfigError("unknown method: " + name);
}

}  // namespace

PYBIND11_MODULE(_wormnc, m) {
    m.doc() = "Worst-case timing analysis and simulation for wormhole NoCs";

    py::register_exception<UnstableSystem>(m, "UnstableSystemError");
    py::register_exception<SafetyViolation>(m, "SafetyViolationError");
    py::register_exception<ConfigError>(m, "ConfigurationError");

    py::class_<Config>(m, "Config")
        .def_property_readonly("flow_count", [](const Config& c) { return c.flows.size(); })
        .def_property_readonly("width", [](const Config& c) { return c.noc.width; })
        .def_property_readonly("height", [](const Config& c) { return c.noc.height; })
        .def("flow_ids",
             [](const Config& c) {
                 std::vector<int> ids;
                 for (const Flow& f : c.flows) ids.push_back(f.id);
                 return ids;
             })
        .def("to_json", &config_to_json_text);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("config_from_json", &config_from_json_text, py::arg("text"));
    m.def("validate", [](const Config& cfg) {
        std::vector<std::string> out;
        for (const auto& issue : validate(cfg)) out.push_back(issue.message);
        return out;
    });

    m.def(
        "xy_route",
        [](const Config& cfg, std::pair<int, int> src, std::pair<int, int> dst) {
            std::vector<std::tuple<int, int, std::string>> out;
            for (const NodeId& n :
                 xy_route(cfg.noc, Coord{src.first, src.second}, Coord{dst.first, dst.second}))
                out.emplace_back(n.x, n.y, std::string(1, port_char(n.port)));
            return out;
        },
        py::arg("config"), py::arg("src"), py::arg("dst"));

    m.def(
        "analyze",
        [](const Config& cfg, const std::string& method, bool strict_tlp, int jobs) {
            Analyzer an(cfg, parse_method(method), strict_tlp);
            AnalysisReport report = an.analyze_all(jobs);
            py::list rows;
            for (const BoundRow& row : report.rows) rows.append(row_to_dict(row));
            py::dict out;
            out["rows"] = rows;
            out["avg_db_index"] = report.avg_db_index;
            out["avg_ib_index"] = report.avg_ib_index;
            out["n_e2e"] = report.totals.n_e2e;
            out["n_iter"] = report.totals.n_iter;
            return out;
        },
        py::arg("config"), py::arg("method") = "gbata", py::arg("strict_tlp") = false,
        py::arg("jobs") = 1);

    m.def(
        "interference_graph_dot",
        [](const Config& cfg, int foi_id) {
            return to_dot(construct_ib_graph(cfg, cfg.flow_index(foi_id)), cfg);
        },
        py::arg("config"), py::arg("foi"));

    m.def(
        "simulate",
        [](const Config& cfg, std::uint64_t seed, std::int64_t horizon,
           const std::vector<std::int64_t>& offsets) {
            TrafficSchedule sched;
            sched.seed = seed;
            sched.horizon = horizon;
            sched.offsets = offsets;
            SimResult res = simulate(cfg, sched);
            py::list flows;
            for (std::size_t i = 0; i < res.flows.size(); ++i) {
                py::dict d;
                d["flow_id"] = cfg.flows[i].id;
                d["max_delay"] = rat_to_double(res.flows[i].max_delay);
                d["packets"] = res.flows[i].packets_delivered;
                d["flits_injected"] = res.flows[i].flits_injected;
                d["flits_delivered"] = res.flows[i].flits_delivered;
                flows.append(d);
            }
            return flows;
        },
        py::arg("config"), py::arg("seed") = 0, py::arg("horizon") = 0,
        py::arg("offsets") = std::vector<std::int64_t>{});

    m.def(
        "tightness",
        [](const Config& cfg, const std::string& method, int runs, std::uint64_t seed, int jobs) {
            Analyzer an(cfg, parse_method(method));
            AnalysisReport report = an.analyze_all(jobs);
            std::vector<Rat> bounds;
            for (const BoundRow& row : report.rows) {
                if (row.error) throw UnstableSystem("analysis", 0.0, *row.error);
                bounds.push_back(row.delay);
            }
            TightnessOptions opt;
            opt.runs = runs;
            opt.seed = seed;
            opt.jobs = jobs;
            TightnessResult res = tightness_sweep(cfg, bounds, opt);
            py::dict out;
            out["tau"] = res.tau;
            out["avg_tau"] = res.avg_tau;
            return out;
        },
        py::arg("config"), py::arg("method") = "gbata", py::arg("runs") = 100, py::arg("seed") = 1,
        py::arg("jobs") = 1);

    m.def(
        "generate",
        [](const std::string& paradigm, int flows, int width, int height, std::uint64_t seed,
           int vc_count, std::int64_t buffer) {
            GeneratorSpec spec;
            spec.paradigm = paradigm == "quadrant" ? GeneratorSpec::Paradigm::Quadrant
                                                   : GeneratorSpec::Paradigm::Uniform;
            spec.flow_count = flows;
            spec.width = width;
            spec.height = height;
            spec.seed = seed;
            spec.vc_count = vc_count;
            spec.buffer = buffer;
            return generate(spec);
        },
        py::arg("paradigm") = "uniform", py::arg("flows") = 8, py::arg("width") = 8,
        py::arg("height") = 8, py::arg("seed") = 1, py::arg("vc_count") = 1, py::arg("buffer") = 1);
}
