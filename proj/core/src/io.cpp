#include "powsim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "powsim/analytics.hpp"

#include "json.hpp"

namespace powsim::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "0";
  return std::string(buf, ptr);
}

namespace {

const std::vector<std::string> kScenarioKeys = {
    "miners", "r", "e_bar", "beta", "defense", "horizon_blocks", "seed",
    "rational_policy", "attacker_retires_after_halt", "selfish_stubborn",
    "grace_inflight", "max_events"};

void reject_unknown_keys(const json& j, const std::vector<std::string>& known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw SimError(Err::InvalidScenario,
                     std::string("unknown field \"") + it.key() + "\" in " + where);
    }
  }
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) {
    throw SimError(Err::InvalidScenario, "scenario document must be a JSON object");
  }
  reject_unknown_keys(j, kScenarioKeys, "scenario");
  Scenario s;
  if (!j.contains("miners") || !j.at("miners").is_array() || j.at("miners").empty()) {
    throw SimError(Err::InvalidScenario, "scenario must list miners");
  }
  int index = 0;
  for (const json& jm : j.at("miners")) {
    reject_unknown_keys(jm, {"id", "power", "strategy"}, "miner");
    MinerSpec m;
    m.id = MinerId::of(jm.value("id", index));
    if (!jm.contains("power")) {
      throw SimError(Err::InvalidScenario, "miner " + std::to_string(index) + " has no power");
    }
    m.power = jm.at("power").get<double>();
    m.strategy = strategy_from_string(jm.value("strategy", std::string("honest")));
    s.miners.push_back(m);
    ++index;
  }
  s.mean_block_interval = j.value("r", s.mean_block_interval);
  s.propagation_delay = j.value("e_bar", s.propagation_delay);
  s.rushing = j.value("beta", s.rushing);
  if (j.contains("defense")) {
    const json& jd = j.at("defense");
    reject_unknown_keys(jd, {"enabled", "window_multiplier"}, "defense");
    s.defense.enabled = jd.value("enabled", false);
    s.defense.window_multiplier = jd.value("window_multiplier", 1.0);
  }
  s.horizon_blocks = j.value("horizon_blocks", s.horizon_blocks);
  s.seed = j.value("seed", s.seed);
  if (j.contains("rational_policy")) {
    const json& jp = j.at("rational_policy");
    reject_unknown_keys(jp, {"stop_when_header_seen", "min_win_probability"}, "rational_policy");
    s.rational_policy.stop_when_header_seen = jp.value("stop_when_header_seen", false);
    s.rational_policy.min_win_probability = jp.value("min_win_probability", 0.0);
  }
  s.attacker_retires_after_halt = j.value("attacker_retires_after_halt", false);
  s.selfish_stubborn = j.value("selfish_stubborn", false);
  s.grace_inflight = j.value("grace_inflight", false);
  s.max_events = j.value("max_events", std::uint64_t{0});
  return s;
}

json scenario_to_json_obj(const Scenario& s) {
  json j;
  j["miners"] = json::array();
  for (const MinerSpec& m : s.miners) {
    j["miners"].push_back(
        {{"id", m.id.value}, {"power", m.power}, {"strategy", to_string(m.strategy)}});
  }
  j["r"] = s.mean_block_interval;
  j["e_bar"] = s.propagation_delay;
  j["beta"] = s.rushing;
  j["defense"] = {{"enabled", s.defense.enabled}, {"window_multiplier", s.defense.window_multiplier}};
  j["horizon_blocks"] = s.horizon_blocks;
  j["seed"] = s.seed;
  j["rational_policy"] = {{"stop_when_header_seen", s.rational_policy.stop_when_header_seen},
                          {"min_win_probability", s.rational_policy.min_win_probability}};
  j["attacker_retires_after_halt"] = s.attacker_retires_after_halt;
  j["selfish_stubborn"] = s.selfish_stubborn;
  j["grace_inflight"] = s.grace_inflight;
  j["max_events"] = s.max_events;
  return j;
}

json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);  // plain string
  return v;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw SimError(Err::InvalidScenario, "scenario is not valid JSON");
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SimError(Err::IoError, "cannot open scenario file " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const Scenario& scenario, int indent) {
  return scenario_to_json_obj(scenario).dump(indent);
}

Scenario apply_overrides(const Scenario& base, const std::vector<std::string>& overrides) {
  json doc = scenario_to_json_obj(base);
  std::vector<double> alpha_overrides;
  for (const std::string& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw SimError(Err::BadOverride, "override \"" + kv + "\" is not KEY=VALUE");
    }
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    if (key == "alpha") {
      json v = parse_override_value(value);
      if (!v.is_number()) {
        throw SimError(Err::BadOverride, "alpha override needs a numeric value");
      }
      alpha_overrides.push_back(v.get<double>());
      continue;
    }
    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
      auto dot = key.find('.', pos);
      std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (part.empty()) {
        throw SimError(Err::BadOverride, "override key \"" + key + "\" has an empty segment");
      }
      if (dot == std::string::npos) {
        (*node)[part] = parse_override_value(value);
        break;
      }
      node = &(*node)[part];
      pos = dot + 1;
    }
  }
  Scenario s = scenario_from_json(doc);
  for (double alpha : alpha_overrides) {
    auto idx = s.attacker_index();
    if (!idx) {
      throw SimError(Err::BadOverride, "alpha override needs an attacking miner in the scenario");
    }
    double old_rest = 0.0;
    for (std::size_t i = 0; i < s.miners.size(); ++i) {
      if (i != *idx) old_rest += s.miners[i].power;
    }
    if (old_rest <= 0.0) {
      throw SimError(Err::BadOverride, "alpha override needs non-attacker power to rescale");
    }
    for (std::size_t i = 0; i < s.miners.size(); ++i) {
      if (i == *idx) {
        s.miners[i].power = alpha;
      } else {
        s.miners[i].power *= (1.0 - alpha) / old_rest;
      }
    }
  }
  return s;
}

namespace {

void write_event_line(const TraceEvent& e, std::ostream& os) {
  os << "{\"seq\":" << e.seq << ",\"t\":" << format_double(e.time) << ",\"type\":\""
     << to_string(e.kind) << "\"";
  if (e.miner != MinerId::kSystem) os << ",\"miner\":" << e.miner;
  if (e.block != kNoBlock) os << ",\"block\":" << e.block;
  if (e.aux != kNoBlock) os << ",\"aux\":" << e.aux;
  os << "}\n";
}

void write_block_line(const Block& b, std::ostream& os) {
  os << "{\"type\":\"block\",\"id\":" << b.id << ",\"parent\":";
  if (b.is_genesis()) {
    os << "null";
  } else {
    os << b.parent;
  }
  os << ",\"height\":" << b.height << ",\"miner\":" << b.miner.value << ",\"kind\":\""
     << to_string(b.kind) << "\",\"tx_count\":" << b.tx_count
     << ",\"created_at\":" << format_double(b.created_at) << ",\"published_at\":";
  if (b.published_at) {
    os << format_double(*b.published_at);
  } else {
    os << "null";
  }
  os << "}\n";
}

}  // namespace

void write_trace_jsonl(const SimTrace& trace, std::ostream& os) {
  for (const TraceEvent& e : trace.events) write_event_line(e, os);
  for (const auto& [id, b] : trace.tree.blocks()) write_block_line(b, os);
}

std::string trace_jsonl_text(const SimTrace& trace) {
  std::ostringstream os;
  write_trace_jsonl(trace, os);
  return os.str();
}

void write_summary_json(const SimTrace& trace, std::ostream& os) {
  json j;
  j["scenario"] = scenario_to_json_obj(trace.scenario);

  json chain;
  chain["final_tip"] = trace.final_tip;
  chain["height"] = trace.tree.at(trace.final_tip).height;
  chain["full_blocks"] = trace.full_blocks_on_main;
  chain["dummy_blocks"] = trace.dummy_blocks;
  chain["extensions"] = trace.extension_times.size();
  chain["mean_interblock"] =
      trace.extension_times.empty()
          ? 0.0
          : trace.extension_times.back() / static_cast<double>(trace.extension_times.size());
  j["chain"] = chain;

  std::map<int, double> shares;
  try {
    shares = analytics::revenue_from_trace(trace);
  } catch (const SimError&) {
    // no full block beyond genesis; every share reads zero
  }
  j["miners"] = json::array();
  for (const MinerStats& m : trace.miners) {
    json jm;
    jm["id"] = m.id.value;
    jm["power"] = m.power;
    jm["strategy"] = to_string(m.strategy);
    jm["found"] = m.found;
    jm["on_main"] = m.on_main;
    jm["discarded"] = m.discarded;
    auto it = shares.find(m.id.value);
    jm["share"] = it == shares.end() ? 0.0 : it->second;
    j["miners"].push_back(jm);
  }

  if (trace.scenario.defense.enabled) {
    json jd;
    jd["headers_discarded"] = trace.headers_discarded;
    jd["stale_rejected"] = trace.stale_rejected;
    std::uint64_t completed = 0;
    std::uint64_t expired = 0;
    for (const WindowRecord& w : trace.windows) {
      if (w.outcome == WindowOutcome::RunEnd) continue;
      ++completed;
      if (w.outcome == WindowOutcome::Expired) ++expired;
    }
    jd["windows"] = completed;
    jd["expired_windows"] = expired;
    try {
      analytics::LossEstimate est = analytics::estimate_losses(trace);
      jd["rho_hat"] = est.rho_hat;
      jd["z_hat"] = est.z_hat;
      jd["loss_miners_hat"] = est.loss_miners_hat;
      jd["loss_attacker_hat"] = est.loss_attacker_hat;
    } catch (const SimError&) {
      // no completed window; frequencies undefined
    }
    j["defense"] = jd;
  } else {
    j["defense"] = nullptr;
  }

  if (trace.chain_states > 0 && trace.total_steps > 0) {
    j["occupancy"] = analytics::occupancy_from_trace(trace);
  } else {
    j["occupancy"] = nullptr;
  }
  j["events"] = trace.events.size();
  os << j.dump(2) << "\n";
}

std::string summary_json_text(const SimTrace& trace) {
  std::ostringstream os;
  write_summary_json(trace, os);
  return os.str();
}

void write_metrics_csv(const SimTrace& trace, std::ostream& os) {
  os << "miner,power,strategy,found,on_main,discarded,share\n";
  std::map<int, double> shares;
  try {
    shares = analytics::revenue_from_trace(trace);
  } catch (const SimError&) {
  }
  for (const MinerStats& m : trace.miners) {
    auto it = shares.find(m.id.value);
    double share = it == shares.end() ? 0.0 : it->second;
    os << m.id.value << "," << format_double(m.power) << "," << to_string(m.strategy) << ","
       << m.found << "," << m.on_main << "," << m.discarded << "," << format_double(share)
       << "\n";
  }
}

std::string metrics_csv_text(const SimTrace& trace) {
  std::ostringstream os;
  write_metrics_csv(trace, os);
  return os.str();
}

std::string model_report_json(const std::string& model_name,
                              const MarkovModel& model,
                              const std::vector<double>& stationary_dist,
                              const std::map<std::string, double>& predictions,
                              int indent) {
  json j;
  j["model"] = model_name;
  j["states"] = model.states;
  j["transition_matrix"] = model.transitions;
  j["stationary"] = stationary_dist;
  j["predictions"] = predictions;
  return j.dump(indent) + "\n";
}

}  // namespace powsim::io
