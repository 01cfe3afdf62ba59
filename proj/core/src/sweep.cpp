#include "powsim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "powsim/analytics.hpp"
#include "powsim/engine.hpp"
#include "powsim/io.hpp"

namespace powsim {

SweepAxis parse_sweep_axis(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw SimError(Err::BadOverride, "sweep axis \"" + text + "\" is not KEY=START:STOP:STEP");
  }
  SweepAxis axis;
  axis.key = text.substr(0, eq);
  std::string range = text.substr(eq + 1);
  auto c1 = range.find(':');
  auto c2 = range.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw SimError(Err::BadOverride, "sweep range \"" + range + "\" is not START:STOP:STEP");
  }
  double start = 0.0, stop = 0.0, step = 0.0;
  try {
    start = std::stod(range.substr(0, c1));
    stop = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(range.substr(c2 + 1));
  } catch (const std::exception&) {
    throw SimError(Err::BadOverride, "sweep range \"" + range + "\" has a non-numeric bound");
  }
  if (step <= 0.0 || stop < start) {
    throw SimError(Err::BadOverride, "sweep range needs step > 0 and stop >= start");
  }
  long n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) axis.values.push_back(start + static_cast<double>(i) * step);
  return axis;
}

namespace {

struct Job {
  std::vector<double> coords;
  int rep = 0;
  std::uint64_t seed = 0;
};

std::vector<Job> expand_grid(const SweepSpec& spec) {
  std::vector<std::vector<double>> points{{}};
  for (const SweepAxis& axis : spec.axes) {
    std::vector<std::vector<double>> next;
    for (const auto& p : points) {
      for (double v : axis.values) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  std::vector<Job> jobs;
  for (const auto& p : points) {
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      jobs.push_back(Job{p, rep, spec.base.seed + static_cast<std::uint64_t>(rep)});
    }
  }
  return jobs;
}

SweepRow run_one(const SweepSpec& spec, const Job& job) {
  std::vector<std::string> overrides;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    overrides.push_back(spec.axes[a].key + "=" + io::format_double(job.coords[a]));
  }
  overrides.push_back("seed=" + std::to_string(job.seed));
  Scenario scenario = io::apply_overrides(spec.base, overrides);
  scenario.validate();
  SimTrace trace = run(scenario);

  SweepRow row;
  row.coords = job.coords;
  row.rep = job.rep;
  row.seed = job.seed;
  row.full_blocks = trace.full_blocks_on_main;
  row.dummy_blocks = trace.dummy_blocks;
  for (const MinerStats& m : trace.miners) row.shares[m.id.value] = 0.0;
  try {
    row.shares = analytics::revenue_from_trace(trace);
  } catch (const SimError&) {
  }
  if (auto idx = scenario.attacker_index()) {
    row.attacker_share = row.shares[scenario.miners[*idx].id.value];
  }
  if (scenario.defense.enabled) {
    try {
      analytics::LossEstimate est = analytics::estimate_losses(trace);
      row.has_losses = true;
      row.rho_hat = est.rho_hat;
      row.z_hat = est.z_hat;
    } catch (const SimError&) {
    }
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.repetitions < 1) {
    throw SimError(Err::InvalidScenario, "sweep repetitions must be >= 1");
  }
  std::vector<Job> jobs = expand_grid(spec);
  std::vector<SweepRow> rows(jobs.size());

  unsigned workers = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, jobs.size() == 0 ? 1 : static_cast<unsigned>(jobs.size()));

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        rows[i] = run_one(spec, jobs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, std::ostream& os) {
  for (const SweepAxis& axis : spec.axes) os << axis.key << ",";
  os << "rep,seed,full_blocks,dummy_blocks";
  for (const MinerSpec& m : spec.base.miners) os << ",share_" << m.id.value;
  os << ",attacker_share,rho_hat,z_hat\n";
  for (const SweepRow& row : rows) {
    for (double c : row.coords) os << io::format_double(c) << ",";
    os << row.rep << "," << row.seed << "," << row.full_blocks << "," << row.dummy_blocks;
    for (const MinerSpec& m : spec.base.miners) {
      auto it = row.shares.find(m.id.value);
      os << "," << io::format_double(it == row.shares.end() ? 0.0 : it->second);
    }
    os << "," << io::format_double(row.attacker_share) << ",";
    if (row.has_losses) {
      os << io::format_double(row.rho_hat) << "," << io::format_double(row.z_hat);
    } else {
      os << ",";
    }
    os << "\n";
  }
}

}  // namespace powsim
