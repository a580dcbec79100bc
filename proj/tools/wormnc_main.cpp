#include <algorithm>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "wormnc/analyzer.hpp"
#include "wormnc/errors.hpp"
#include "wormnc/generator.hpp"
#include "wormnc/gbata.hpp"
#include "wormnc/report_io.hpp"
#include "wormnc/rng.hpp"
#include "wormnc/wormsim.hpp"

namespace {

using namespace wormnc;

constexpr int kExitValidation = 1;
constexpr int kExitUnstable = 2;
constexpr int kExitSafety = 3;

Config load_validated(const std::string& path) {
    Config cfg = load_config(path);
    auto issues = validate(cfg);
    if (!issues.empty()) {
        for (const auto& issue : issues) std::cerr << "invalid config: " << issue.message << "\n";
        std::exit(kExitValidation);
    }
    return cfg;
}

void write_or_print(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) throw ConfigError("cannot write " + out);
        f << text;
    }
}

void print_summary(const AnalysisReport& report) {
    int sched = 0, errors = 0;
    for (const auto& row : report.rows) {
        if (row.error) ++errors;
        else if (row.schedulable) ++sched;
    }
    std::cout << method_name(report.method) << ": " << report.rows.size() << " flows, " << sched
              << " schedulable, " << errors << " errors, avg I_DB " << report.avg_db_index
              << ", avg I_IB " << report.avg_ib_index << ", n_e2e " << report.totals.n_e2e
              << ", n_iter " << report.totals.n_iter << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Worst-case timing analysis and simulation for wormhole NoCs"};
    app.require_subcommand(1);

    std::string config_path, out_path, instr_path, bounds_path, schedule_path, trace_path;
    std::string method_str = "gbata";
    std::string paradigm = "uniform";
    bool strict_tlp = false;
    int foi = -1;
    int runs = 100;
    std::uint64_t seed = 1;
    std::int64_t horizon = 0;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    int flow_count = 8, width = 8, height = 8;
    std::int64_t buffer = 1;
    std::vector<std::int64_t> len_range{2, 8}, period_range{100, 400}, burst_range{1, 1},
        jitter_range{0, 0};
    int vc_count = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (JSON)")->required();
        cmd->add_option("--jobs", jobs, "worker threads");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "compute per-flow delay bounds");
    add_common(analyze);
    analyze->add_option("--method", method_str, "bata, gbata or both")
        ->check(CLI::IsMember({"bata", "gbata", "both"}));
    analyze->add_option("--out", out_path, "report CSV path (stdout if omitted)");
    analyze->add_option("--instr", instr_path, "instrumentation CSV path");
    analyze->add_flag("--strict-tlp", strict_tlp, "strict standalone lower-priority blocking term");

    CLI::App* compare = app.add_subcommand("compare", "run both methods side by side");
    add_common(compare);
    compare->add_option("--out", out_path, "comparison CSV path (stdout if omitted)");
    compare->add_option("--instr", instr_path, "instrumentation CSV path");
    compare->add_flag("--strict-tlp", strict_tlp, "strict standalone lower-priority blocking term");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "tightness sweep against a bounds CSV");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--bounds", bounds_path, "report CSV with D_f column")->required();
    simulate_cmd->add_option("--schedule", schedule_path, "schedule JSON (seed/runs/horizon/offsets)");
    simulate_cmd->add_option("--runs", runs, "simulation runs");
    simulate_cmd->add_option("--seed", seed, "master seed");
    simulate_cmd->add_option("--horizon", horizon, "injection horizon in cycles (0 = auto)");
    simulate_cmd->add_option("--trace", trace_path, "trace CSV of the first run");

    CLI::App* graph_cmd = app.add_subcommand("graph", "emit the interference graph in DOT form");
    add_common(graph_cmd);
    graph_cmd->add_option("--foi", foi, "flow of interest id")->required();
    graph_cmd->add_option("--out", out_path, "DOT path (stdout if omitted)");

    CLI::App* generate_cmd = app.add_subcommand("generate", "generate a random configuration");
    generate_cmd->add_option("--paradigm", paradigm, "uniform or quadrant")
        ->check(CLI::IsMember({"uniform", "quadrant"}));
    generate_cmd->add_option("--flows", flow_count, "flow count");
    generate_cmd->add_option("--width", width, "mesh width");
    generate_cmd->add_option("--height", height, "mesh height");
    generate_cmd->add_option("--seed", seed, "seed");
    generate_cmd->add_option("--buffer", buffer, "buffer depth per VC");
    generate_cmd->add_option("--vcs", vc_count, "virtual channel count");
    generate_cmd->add_option("--len", len_range, "packet length range (lo hi)")->expected(2);
    generate_cmd->add_option("--period", period_range, "period range (lo hi)")->expected(2);
    generate_cmd->add_option("--burst", burst_range, "burst range (lo hi)")->expected(2);
    generate_cmd->add_option("--jitter", jitter_range, "jitter range (lo hi)")->expected(2);
    generate_cmd->add_option("--out", out_path, "config path (stdout if omitted)");

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a configuration");
    validate_cmd->add_option("--config", config_path, "configuration file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(validate_cmd)) {
        Config cfg = load_config(config_path);
        auto issues = validate(cfg);
        for (const auto& issue : issues) std::cerr << "invalid config: " << issue.message << "\n";
        if (!issues.empty()) return kExitValidation;
        std::cout << "ok: " << cfg.flows.size() << " flows on " << cfg.noc.width << "x"
                  << cfg.noc.height << " mesh\n";
        return 0;
    }

    if (app.got_subcommand(generate_cmd)) {
        GeneratorSpec spec;
        spec.paradigm = paradigm == "quadrant" ? GeneratorSpec::Paradigm::Quadrant
                                               : GeneratorSpec::Paradigm::Uniform;
        spec.flow_count = flow_count;
        spec.width = width;
        spec.height = height;
        spec.seed = seed;
        spec.buffer = buffer;
        spec.vc_count = vc_count;
        spec.length = {len_range[0], len_range[1]};
        spec.period = {period_range[0], period_range[1]};
        spec.burst = {burst_range[0], burst_range[1]};
        spec.jitter = {jitter_range[0], jitter_range[1]};
        Config cfg = generate(spec);
        write_or_print(config_to_json_text(cfg), out_path);
        return 0;
    }

    if (app.got_subcommand(analyze)) {
        Config cfg = load_validated(config_path);
        std::string text;
        std::string instr_text;
        if (method_str == "both") {
            Analyzer ba(cfg, Method::Bata, strict_tlp);
            Analyzer ga(cfg, Method::Gbata, strict_tlp);
            AnalysisReport rb = ba.analyze_all(jobs);
            AnalysisReport rg = ga.analyze_all(jobs);
            text = report_csv_text(rb);
            std::string g = report_csv_text(rg);
            text += g.substr(g.find('\n') + 1);  // drop the duplicate header
            instr_text = instrumentation_csv_text(rb);
            std::string gi = instrumentation_csv_text(rg);
            instr_text += gi.substr(gi.find('\n') + 1);
            print_summary(rb);
            print_summary(rg);
        } else {
            Method m = method_str == "bata" ? Method::Bata : Method::Gbata;
            Analyzer an(cfg, m, strict_tlp);
            AnalysisReport report = an.analyze_all(jobs);
            text = report_csv_text(report);
            instr_text = instrumentation_csv_text(report);
            print_summary(report);
        }
        if (!out_path.empty()) write_or_print(text, out_path);
        else std::cout << text;
        if (!instr_path.empty()) write_or_print(instr_text, instr_path);
        return 0;
    }

    if (app.got_subcommand(compare)) {
        Config cfg = load_validated(config_path);
        Analyzer ba(cfg, Method::Bata, strict_tlp);
        Analyzer ga(cfg, Method::Gbata, strict_tlp);
        AnalysisReport rb = ba.analyze_all(jobs);
        AnalysisReport rg = ga.analyze_all(jobs);
        bool bursty = std::any_of(cfg.flows.begin(), cfg.flows.end(),
                                  [](const Flow& f) { return f.burst > 1; });
        if (bursty)
            std::cout << "note: flows inject multi-packet bursts; bata bounds are not "
                         "cpq-safe on this configuration\n";
        print_summary(rb);
        print_summary(rg);
        write_or_print(compare_csv_text(rb, rg, cfg), out_path);
        if (!instr_path.empty()) {
            std::string instr_text = instrumentation_csv_text(rb);
            std::string gi = instrumentation_csv_text(rg);
            instr_text += gi.substr(gi.find('\n') + 1);
            write_or_print(instr_text, instr_path);
        }
        return 0;
    }

    if (app.got_subcommand(graph_cmd)) {
        Config cfg = load_validated(config_path);
        IBGraph g = construct_ib_graph(cfg, cfg.flow_index(foi));
        write_or_print(to_dot(g, cfg), out_path);
        return 0;
    }

    if (app.got_subcommand(simulate_cmd)) {
        Config cfg = load_validated(config_path);
        auto bounds_by_id = read_bounds_csv(bounds_path);
        std::vector<Rat> bounds;
        for (const Flow& f : cfg.flows) {
            auto it = bounds_by_id.find(f.id);
            if (it == bounds_by_id.end())
                throw ConfigError("bounds file has no row for flow " + std::to_string(f.id));
            bounds.push_back(it->second);
        }
        TightnessOptions opt;
        opt.runs = runs;
        opt.seed = seed;
        opt.jobs = jobs;
        opt.horizon = horizon;
        if (!schedule_path.empty()) {
            TrafficSchedule sched = load_schedule(schedule_path);
            opt.seed = sched.seed;
            if (sched.horizon > 0) opt.horizon = sched.horizon;
            if (sched.runs > 0) opt.runs = sched.runs;
            if (!sched.offsets.empty()) {
                // explicit offsets: single deterministic run
                std::vector<TraceEvent> trace;
                SimResult sim = simulate(cfg, sched, trace_path.empty() ? nullptr : &trace);
                if (!trace_path.empty()) write_trace_csv(trace, cfg, trace_path);
                double max_tau = 0;
                for (std::size_t i = 0; i < cfg.flows.size(); ++i) {
                    if (sim.flows[i].max_delay > bounds[i])
                        throw SafetyViolation(cfg.flows[i].id, sched.seed,
                                              "observed delay exceeds bound for flow " +
                                                  std::to_string(cfg.flows[i].id));
                    if (bounds[i] > 0)
                        max_tau = std::max(max_tau, rat_to_double(sim.flows[i].max_delay / bounds[i]));
                }
                std::cout << "ok: max tightness " << max_tau << "\n";
                return 0;
            }
        }
        if (!trace_path.empty()) {
            TrafficSchedule first;
            first.seed = Rng::mix(opt.seed, 0);
            first.horizon = opt.horizon;
            std::vector<TraceEvent> trace;
            simulate(cfg, first, &trace);
            write_trace_csv(trace, cfg, trace_path);
        }
        TightnessResult res = tightness_sweep(cfg, bounds, opt);
        double max_tau = 0;
        for (double tau : res.tau) max_tau = std::max(max_tau, tau);
        std::cout << "ok: " << runs << " runs, max tightness " << max_tau << ", avg tightness "
                  << res.avg_tau << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const SafetyViolation& e) {
        std::cerr << "safety violation: " << e.what() << "\n";
        return kExitSafety;
    } catch (const UnstableSystem& e) {
        std::cerr << "unstable system: " << e.what() << "\n";
        return kExitUnstable;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
