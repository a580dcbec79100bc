#include "wormnc/report_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wormnc/errors.hpp"

namespace wormnc {

namespace {

constexpr int kDigits = 12;

std::string dec(const Rat& r, bool up = false) { return rat_to_decimal(r, kDigits, up); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << text;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string report_csv_text(const AnalysisReport& report) {
    std::ostringstream os;
    os << "flow_id,method,T_P,T_hp,T_sp,T_lp,T_IB,R_f,D_f,period,schedulable,I_DB,I_IB,error\n";
    for (const BoundRow& row : report.rows) {
        os << row.flow_id << "," << method_name(row.method) << ",";
        if (row.error) {
            os << ",,,,,,," << dec(row.period) << ",false," << row.i_db << ",," << *row.error << "\n";
            continue;
        }
        os << dec(row.t_path) << "," << dec(row.t_hp) << "," << dec(row.t_sp) << ","
           << dec(row.t_lp) << "," << dec(row.t_ib) << "," << dec(row.rate) << ","
           << dec(row.delay, /*up=*/true) << "," << dec(row.period) << ","
           << (row.schedulable ? "true" : "false") << "," << row.i_db << "," << row.i_ib << ",\n";
    }
    return os.str();
}

void write_report_csv(const AnalysisReport& report, const std::string& path) {
    write_file(path, report_csv_text(report));
}

std::string instrumentation_csv_text(const AnalysisReport& report) {
    std::ostringstream os;
    os << "flow_id,method,n_e2e,n_iter,dt_total,dt_ib,dt_e2e\n";
    for (const BoundRow& row : report.rows)
        os << row.flow_id << "," << method_name(row.method) << "," << row.instr.n_e2e << ","
           << row.instr.n_iter << "," << row.instr.dt_total << "," << row.instr.dt_ib << ","
           << row.instr.dt_e2e << "\n";
    os << "total," << method_name(report.method) << "," << report.totals.n_e2e << ","
       << report.totals.n_iter << "," << report.totals.dt_total << "," << report.totals.dt_ib
       << "," << report.totals.dt_e2e << "\n";
    return os.str();
}

void write_instrumentation_csv(const AnalysisReport& report, const std::string& path) {
    write_file(path, instrumentation_csv_text(report));
}

std::string compare_csv_text(const AnalysisReport& a, const AnalysisReport& b,
                             const Config& config) {
    std::ostringstream os;
    os << "flow_id,period,D_" << method_name(a.method) << ",D_" << method_name(b.method)
       << ",ratio,T_IB_" << method_name(a.method) << ",T_IB_" << method_name(b.method) << ",I_IB_"
       << method_name(a.method) << ",I_IB_" << method_name(b.method) << ",n_e2e_"
       << method_name(a.method) << ",n_e2e_" << method_name(b.method) << ",cpq_safe_"
       << method_name(a.method) << ",cpq_safe_" << method_name(b.method) << "\n";
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const BoundRow& ra = a.rows[i];
        const BoundRow& rb = b.rows[i];
        os << ra.flow_id << "," << dec(ra.period) << ",";
        if (ra.error || rb.error) {
            os << ",,,,,,,,," << "\n";
            continue;
        }
        Rat ratio = rb.delay == 0 ? Rat(0) : ra.delay / rb.delay;
        os << dec(ra.delay, true) << "," << dec(rb.delay, true) << "," << dec(ratio) << ","
           << dec(ra.t_ib) << "," << dec(rb.t_ib) << "," << ra.i_ib << "," << rb.i_ib << ","
           << ra.instr.n_e2e << "," << rb.instr.n_e2e << "," << (ra.cpq_safe ? "true" : "false")
           << "," << (rb.cpq_safe ? "true" : "false") << "\n";
    }
    (void)config;
    return os.str();
}

std::map<int, Rat> read_bounds_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open bounds file: " + path);
    std::map<int, Rat> bounds;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty bounds file: " + path);
    auto header = split_csv_line(line);
    int id_col = -1, d_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "flow_id") id_col = static_cast<int>(i);
        if (header[i] == "D_f") d_col = static_cast<int>(i);
    }
    if (id_col < 0 || d_col < 0)
        throw ConfigError("bounds file is missing flow_id/D_f columns: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) <= std::max(id_col, d_col)) continue;
        const std::string& id = cells[static_cast<std::size_t>(id_col)];
        const std::string& d = cells[static_cast<std::size_t>(d_col)];
        if (id == "total" || d.empty()) continue;
        bounds[std::stoi(id)] = rat_from_string(d);
    }
    return bounds;
}

TrafficSchedule schedule_from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("schedule parse error: ") + e.what());
    }
    TrafficSchedule s;
    s.seed = doc.value("seed", std::uint64_t{0});
    s.horizon = doc.value("horizon", std::int64_t{0});
    s.runs = doc.value("runs", 0);
    if (doc.contains("offsets")) s.offsets = doc.at("offsets").get<std::vector<std::int64_t>>();
    return s;
}

TrafficSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schedule file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return schedule_from_json_text(buf.str());
}

}  // namespace wormnc
