// Command-line front end: single simulations, analytical models, model vs
// simulation comparisons, and parameter sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "powsim/analytics.hpp"
#include "powsim/engine.hpp"
#include "powsim/io.hpp"
#include "powsim/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(const powsim::SimError& e) {
  switch (e.code()) {
    case powsim::Err::InvalidScenario:
    case powsim::Err::BadOverride:
    case powsim::Err::IoError:
    case powsim::Err::InvalidPowers:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw powsim::SimError(powsim::Err::IoError, "cannot write " + path.string());
  }
  out << text;
}

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool quiet = false;
};

powsim::Scenario load_with_overrides(const CommonOpts& opts) {
  powsim::Scenario s = powsim::io::load_scenario(opts.scenario_path);
  s = powsim::io::apply_overrides(s, opts.overrides);
  s.validate();
  return s;
}

int cmd_simulate(const CommonOpts& opts) {
  powsim::Scenario scenario = load_with_overrides(opts);
  powsim::SimTrace trace = powsim::run(scenario);
  fs::create_directories(opts.out_dir);
  write_file(fs::path(opts.out_dir) / "trace.jsonl", powsim::io::trace_jsonl_text(trace));
  write_file(fs::path(opts.out_dir) / "summary.json", powsim::io::summary_json_text(trace));
  write_file(fs::path(opts.out_dir) / "metrics.csv", powsim::io::metrics_csv_text(trace));
  if (!opts.quiet) {
    std::cout << "simulate: " << trace.full_blocks_on_main << " full blocks, "
              << trace.dummy_blocks << " dummy blocks, " << trace.events.size()
              << " events -> " << opts.out_dir << "\n";
  }
  return kExitOk;
}

struct AnalyzeOpts {
  std::string model = "selfish";
  double alpha = 0.3;
  double beta = 0.0;
  double stopped_power = 0.0;
  std::string out_dir;
  bool quiet = false;
};

int cmd_analyze(const AnalyzeOpts& opts) {
  powsim::MarkovModel model;
  std::map<std::string, double> predictions;
  if (opts.model == "bdos") {
    model = powsim::analytics::build_bdos_chain(opts.alpha, 1.0 - opts.alpha, opts.beta,
                                                opts.stopped_power);
    powsim::analytics::RevenueShares shares = powsim::analytics::bdos_revenue_prediction(
        opts.alpha, 1.0 - opts.alpha, opts.beta, opts.stopped_power);
    predictions["attacker_share"] = shares.attacker;
    predictions["honest_share"] = shares.honest;
  } else if (opts.model == "selfish") {
    model = powsim::analytics::build_selfish_chain(opts.alpha, opts.beta);
    if (opts.alpha < 0.5) {
      predictions["pool_share"] =
          powsim::analytics::selfish_revenue_prediction(opts.alpha, opts.beta);
      predictions["honest_share"] = 1.0 - predictions["pool_share"];
    }
  } else {
    throw powsim::SimError(powsim::Err::BadOverride, "unknown model \"" + opts.model + "\"");
  }
  std::vector<double> pi = powsim::stationary(model);
  std::string report = powsim::io::model_report_json(opts.model, model, pi, predictions);
  if (opts.out_dir.empty()) {
    std::cout << report;
  } else {
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / "model.json", report);
    if (!opts.quiet) std::cout << "analyze: wrote " << opts.out_dir << "/model.json\n";
  }
  return kExitOk;
}

int cmd_compare(const CommonOpts& opts) {
  powsim::Scenario scenario = load_with_overrides(opts);
  auto attacker = scenario.attacker_index();
  if (!attacker) {
    throw powsim::SimError(powsim::Err::InvalidScenario,
                           "compare needs a scenario with an attacking miner");
  }
  bool is_bdos = scenario.miners[*attacker].strategy == powsim::StrategyKind::Bdos;
  double alpha = scenario.miners[*attacker].power;

  powsim::SimTrace trace = powsim::run(scenario);
  std::vector<double> occ_sim = powsim::analytics::occupancy_from_trace(trace);

  powsim::MarkovModel model;
  std::map<int, double> shares_sim;
  try {
    shares_sim = powsim::analytics::revenue_from_trace(trace);
  } catch (const powsim::SimError&) {
  }
  int attacker_id = scenario.miners[*attacker].id.value;
  double attacker_share_sim = shares_sim.count(attacker_id) ? shares_sim[attacker_id] : 0.0;
  double attacker_share_pred = 0.0;
  bool have_pred = false;
  if (is_bdos) {
    double stopped = 0.0;
    if (scenario.rational_policy.stop_when_header_seen) {
      for (const powsim::MinerSpec& m : scenario.miners) {
        if (m.strategy == powsim::StrategyKind::Rational) stopped += m.power;
      }
    }
    model = powsim::analytics::build_bdos_chain(alpha, 1.0 - alpha, scenario.rushing, stopped);
    attacker_share_pred =
        powsim::analytics::bdos_revenue_prediction(alpha, 1.0 - alpha, scenario.rushing, stopped)
            .attacker;
    have_pred = true;
  } else {
    model = powsim::analytics::build_selfish_chain(alpha, scenario.rushing);
    if (alpha < 0.5 && !scenario.defense.enabled) {
      attacker_share_pred = powsim::analytics::selfish_revenue_prediction(alpha, scenario.rushing);
      have_pred = true;
    }
  }
  std::vector<double> occ_model = powsim::stationary(model);
  double l1 = powsim::l1_distance(occ_sim, occ_model);

  std::ostringstream csv;
  csv << "metric,label,simulated,analytical\n";
  for (std::size_t i = 0; i < model.states.size(); ++i) {
    double sim = i < occ_sim.size() ? occ_sim[i] : 0.0;
    csv << "occupancy," << model.states[i] << "," << powsim::io::format_double(sim) << ","
        << powsim::io::format_double(occ_model[i]) << "\n";
  }
  csv << "revenue,attacker," << powsim::io::format_double(attacker_share_sim) << ",";
  if (have_pred) csv << powsim::io::format_double(attacker_share_pred);
  csv << "\n";
  csv << "revenue,honest," << powsim::io::format_double(1.0 - attacker_share_sim) << ",";
  if (have_pred) csv << powsim::io::format_double(1.0 - attacker_share_pred);
  csv << "\n";
  csv << "l1,occupancy," << powsim::io::format_double(l1) << ",\n";

  fs::create_directories(opts.out_dir);
  write_file(fs::path(opts.out_dir) / "compare.csv", csv.str());
  if (!opts.quiet) {
    std::cout << "compare: occupancy L1 = " << powsim::io::format_double(l1);
    if (have_pred) {
      std::cout << ", attacker share sim " << powsim::io::format_double(attacker_share_sim)
                << " vs model " << powsim::io::format_double(attacker_share_pred);
    }
    std::cout << "\n";
  }
  return kExitOk;
}

struct SweepOpts : CommonOpts {
  int reps = 1;
  int jobs = 0;
};

int cmd_sweep(const SweepOpts& opts) {
  // Overrides carrying a range become sweep axes, the rest shape the base.
  std::vector<std::string> scalar;
  std::vector<std::string> ranged;
  for (const std::string& kv : opts.overrides) {
    auto eq = kv.find('=');
    if (eq != std::string::npos && kv.find(':', eq) != std::string::npos) {
      ranged.push_back(kv);
    } else {
      scalar.push_back(kv);
    }
  }
  powsim::SweepSpec spec;
  spec.base = powsim::io::load_scenario(opts.scenario_path);
  spec.base = powsim::io::apply_overrides(spec.base, scalar);
  spec.base.validate();
  for (const std::string& kv : ranged) spec.axes.push_back(powsim::parse_sweep_axis(kv));
  spec.repetitions = opts.reps;
  spec.jobs = opts.jobs;

  std::vector<powsim::SweepRow> rows = powsim::run_sweep(spec);
  std::ostringstream csv;
  powsim::write_sweep_csv(spec, rows, csv);
  fs::create_directories(opts.out_dir);
  write_file(fs::path(opts.out_dir) / "sweep.csv", csv.str());
  if (!opts.quiet) {
    std::cout << "sweep: " << rows.size() << " rows -> " << opts.out_dir << "/sweep.csv\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof-of-work attack and defense simulator"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "Run one simulation, write trace/summary/metrics");
  sim->add_option("--scenario", sim_opts.scenario_path, "Scenario JSON file")->required();
  sim->add_option("--out", sim_opts.out_dir, "Output directory");
  sim->add_option("--override", sim_opts.overrides, "KEY=VALUE scenario override (repeatable)");
  sim->add_flag("--quiet", sim_opts.quiet, "Suppress the summary line");

  AnalyzeOpts an_opts;
  CLI::App* an = app.add_subcommand("analyze", "Evaluate an attack chain analytically");
  an->add_option("--model", an_opts.model, "bdos or selfish")->required();
  an->add_option("--alpha", an_opts.alpha, "Attacker / pool power")->required();
  an->add_option("--beta", an_opts.beta, "Rushing fraction");
  an->add_option("--stopped-power", an_opts.stopped_power,
                 "Rational power paused while a header is out");
  an->add_option("--out", an_opts.out_dir, "Output directory (stdout when omitted)");
  an->add_flag("--quiet", an_opts.quiet, "Suppress the status line");

  CommonOpts cmp_opts;
  CLI::App* cmp = app.add_subcommand("compare", "Simulated vs analytical occupancy and revenue");
  cmp->add_option("--scenario", cmp_opts.scenario_path, "Scenario JSON file")->required();
  cmp->add_option("--out", cmp_opts.out_dir, "Output directory");
  cmp->add_option("--override", cmp_opts.overrides, "KEY=VALUE scenario override (repeatable)");
  cmp->add_flag("--quiet", cmp_opts.quiet, "Suppress the status line");

  SweepOpts sw_opts;
  CLI::App* sw = app.add_subcommand("sweep", "Run a parameter grid of simulations");
  sw->add_option("--scenario", sw_opts.scenario_path, "Scenario JSON file")->required();
  sw->add_option("--out", sw_opts.out_dir, "Output directory");
  sw->add_option("--override", sw_opts.overrides,
                 "KEY=VALUE override; KEY=START:STOP:STEP adds a sweep axis (repeatable)");
  sw->add_option("--reps", sw_opts.reps, "Repetitions per grid point (seed_k = seed + k)");
  sw->add_option("--jobs", sw_opts.jobs, "Concurrent simulations (0 = hardware)");
  sw->add_flag("--quiet", sw_opts.quiet, "Suppress the status line");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (an->parsed()) return cmd_analyze(an_opts);
    if (cmp->parsed()) return cmd_compare(cmp_opts);
    if (sw->parsed()) return cmd_sweep(sw_opts);
  } catch (const powsim::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
