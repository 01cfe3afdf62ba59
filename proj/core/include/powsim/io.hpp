#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "powsim/markov.hpp"
#include "powsim/scenario.hpp"
#include "powsim/trace.hpp"

namespace powsim::io {

/// Shortest round-trip decimal form; stable across runs of the same build.
std::string format_double(double v);

Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json_text(const Scenario& scenario, int indent = 2);

/// Applies `key=value` pairs over a scenario. Keys are dotted paths into the
/// scenario document (`defense.enabled=true`, `beta=0.3`). The virtual key
/// `alpha` sets the attacking miner's power and rescales the remaining
/// miners to keep the total at one.
Scenario apply_overrides(const Scenario& base, const std::vector<std::string>& overrides);

/// Event log as JSON lines, one event per line, followed by one line per
/// block of the final tree.
void write_trace_jsonl(const SimTrace& trace, std::ostream& os);
std::string trace_jsonl_text(const SimTrace& trace);

void write_summary_json(const SimTrace& trace, std::ostream& os);
std::string summary_json_text(const SimTrace& trace);

/// Per-miner result table: miner,power,strategy,found,on_main,discarded,share.
void write_metrics_csv(const SimTrace& trace, std::ostream& os);
std::string metrics_csv_text(const SimTrace& trace);

/// Analytical model report: states, transition matrix, stationary
/// distribution, and derived predictions.
std::string model_report_json(const std::string& model_name,
                              const MarkovModel& model,
                              const std::vector<double>& stationary_dist,
                              const std::map<std::string, double>& predictions,
                              int indent = 2);

}  // namespace powsim::io
