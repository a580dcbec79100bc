#pragma once

#include <map>
#include <string>
#include <vector>

#include "wormnc/analyzer.hpp"
#include "wormnc/wormsim.hpp"

namespace wormnc {

/// Per-flow bound decomposition CSV. Delays are printed with 12 fractional
/// digits; D_f is rounded upward so the printed value is still a bound.
void write_report_csv(const AnalysisReport& report, const std::string& path);
std::string report_csv_text(const AnalysisReport& report);

/// Per-flow instrumentation counters CSV.
void write_instrumentation_csv(const AnalysisReport& report, const std::string& path);
std::string instrumentation_csv_text(const AnalysisReport& report);

/// Side-by-side comparison of two reports over the same configuration.
std::string compare_csv_text(const AnalysisReport& a, const AnalysisReport& b,
                             const Config& config);

/// Reads flow_id -> D_f from a report CSV produced by write_report_csv.
std::map<int, Rat> read_bounds_csv(const std::string& path);

/// Schedule document: {"seed", "runs", "horizon", "offsets": [...]}.
TrafficSchedule schedule_from_json_text(const std::string& text);
TrafficSchedule load_schedule(const std::string& path);

}  // namespace wormnc
