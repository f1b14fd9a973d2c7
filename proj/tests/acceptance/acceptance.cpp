// Acceptance suite: runs each criterion against the calibrated scenario and
// prints one PASS/FAIL line per criterion.
//
//   acceptance [--config PATH] [--known-fail N]...
//
// --known-fail marks a criterion whose failure is documented. The exit code
// is 0 iff the set of failing criteria equals the known set exactly, so a
// newly failing criterion and a newly passing one both break the build.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "property_checks.hpp"
#include "sipovl/scenario.hpp"
#include "sipovl/window_controller.hpp"

using namespace sipovl;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

using Rows = std::map<double, MetricsReport>;

Rows sweep(const ScenarioConfig& base, bool control, const std::vector<double>& rates) {
  ScenarioConfig cfg = base;
  cfg.control_enabled = control;
  const auto reports = run_sweep(cfg, rates, 1);
  Rows out;
  for (std::size_t i = 0; i < rates.size(); ++i) out[rates[i]] = reports[i];
  return out;
}

void print_rows(const char* title, const Rows& rows) {
  std::printf("%s\n", title);
  std::printf("  %8s %10s %12s %10s %10s %7s %8s %8s\n", "offered", "thr_cps", "delay_ms", "inv_retx", "bye_retx",
              "cpu%", "rej_win", "rej_cpu");
  for (const auto& [rate, r] : rows) {
    std::printf("  %8.0f %10.3f %12.3f %10.3f %10.3f %7.2f %8llu %8llu\n", rate, r.throughput, r.setup_delay_mean,
                r.invite_retx_rate, r.bye_retx_rate, r.cpu_utilization,
                static_cast<unsigned long long>(r.rejected_window), static_cast<unsigned long long>(r.rejected_cpu));
  }
}

Outcome underload(const Rows& off, const Rows& on) {
  Outcome o;
  for (const auto* rows : {&off, &on}) {
    const char* mode = rows == &off ? "off" : "on";
    for (double rate : {100.0, 300.0, 500.0}) {
      const auto& r = rows->at(rate);
      const double err = std::abs(r.throughput - rate) / rate;
      o.require(err <= 0.03, std::string("control ") + mode + fmt(": throughput %.1f at %.0f cps", r.throughput, rate));
      o.require(r.setup_delay_mean < 50.0, std::string("control ") + mode + fmt(": delay %.1f ms at %.0f cps", r.setup_delay_mean, rate));
      o.require(r.invite_retx_rate == 0 && r.bye_retx_rate == 0,
                std::string("control ") + mode + fmt(": retransmissions at %.0f cps", rate));
    }
  }
  return o;
}

Outcome collapse(const Rows& off, double capacity) {
  Outcome o;
  double prev = -1;
  for (const auto& [rate, r] : off) {
    if (rate >= 1.3 * capacity) {
      o.require(r.throughput <= 0.30 * capacity, fmt("throughput %.1f at %.0f cps exceeds 30%% of capacity", r.throughput, rate));
      o.require(r.invite_retx_rate > 0, fmt("no INVITE retransmissions at %.0f cps", rate));
    }
    if (rate >= 900) {
      if (prev >= 0) o.require(r.throughput < prev, fmt("throughput rises to %.1f at %.0f cps", r.throughput, rate));
      prev = r.throughput;
    }
  }
  return o;
}

Outcome sustained(const Rows& on, double capacity) {
  Outcome o;
  const double saturation = on.at(capacity).throughput;
  for (const auto& [rate, r] : on) {
    if (rate >= capacity && rate <= 2 * capacity) {
      o.require(r.throughput >= 0.9 * saturation,
                fmt("throughput %.1f at %.0f cps below 90%% of %.1f", r.throughput, rate, saturation));
    }
    // Below capacity throughput tracks the offered load, so the collapse
    // floor only applies once the offered rate reaches saturation.
    if (rate >= capacity)
      o.require(r.throughput >= 0.5 * saturation, fmt("throughput %.1f at %.0f cps below half of %.1f", r.throughput, rate, saturation));
  }
  return o;
}

Outcome delays(const Rows& off, const Rows& on, double capacity) {
  Outcome o;
  const double base_on = on.at(100).setup_delay_mean;
  const double base_off = off.at(100).setup_delay_mean;
  for (const auto& [rate, r] : on) {
    if (rate <= 1.5 * capacity) {
      o.require(r.setup_delay_mean < 10 * base_on,
                fmt("control on: %.1f ms at %.0f cps, limit %.1f", r.setup_delay_mean, rate, 10 * base_on));
    }
  }
  for (const auto& [rate, r] : off) {
    if (rate > capacity) {
      o.require(r.throughput > 0 && r.setup_delay_mean > 100 * base_off,
                fmt("control off: %.1f ms at %.0f cps, needs > %.1f", r.setup_delay_mean, rate, 100 * base_off));
    }
  }
  return o;
}

Outcome retransmissions(const Rows& off, const Rows& on, double capacity) {
  Outcome o;
  for (const auto& [rate, r] : on) {
    if (rate <= 1.5 * capacity) {
      o.require(r.invite_retx_rate == 0 && r.bye_retx_rate == 0,
                fmt("control on: retransmissions %.3f/%.3f at %.0f cps", r.invite_retx_rate, r.bye_retx_rate, rate));
    }
  }
  for (const auto& [rate, r] : off) {
    if (rate >= capacity) {
      o.require(r.invite_retx_rate > 0 && r.bye_retx_rate > 0,
                fmt("control off: retransmissions %.3f/%.3f at %.0f cps", r.invite_retx_rate, r.bye_retx_rate, rate));
    }
  }
  return o;
}

Outcome controller_trace() {
  Outcome o;
  WindowControllerParams p;
  p.initial_window = 1;
  p.initial_win_th = 8;
  p.z_th_ms = std::numeric_limits<double>::infinity();  // detection never fires
  WindowController c(p);
  const std::vector<double> printed = {2, 3, 4, 5, 6, 7, 8, 8.125, 8.248, 8.369};
  double w = 1.0;
  std::ostringstream trace;
  for (std::size_t i = 0; i < printed.size(); ++i) {
    c.on_call_arrival();
    c.on_transaction_complete(1.0);
    w = w < 8 ? w + 1 : w + 1 / w;
    trace << (i ? ", " : "") << c.window();
    o.require(std::abs(c.window() - w) <= 1e-9, fmt("step %.0f: %.12f vs recurrence %.12f", double(i + 1), c.window(), w));
    o.require(std::abs(c.window() - printed[i]) <= 5e-4, fmt("step %.0f: %.6f vs listed %.3f", double(i + 1), c.window(), printed[i]));
  }
  o.notes.push_back("trace [" + trace.str() + "]");
  return o;
}

Outcome properties() {
  using namespace sipovl::testing;
  Outcome o;
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"window invariants", [] { return check_window_invariants(101, 500); }},
      {"retransmit schedule", [] { return check_retransmit_schedule(102, 2000); }},
      {"call conservation", [] { return check_call_conservation(103, 20); }},
      {"seed determinism", [] { return check_seed_determinism(); }},
      {"poisson count", [] { return check_poisson_count(1, 10); }},
      {"cpu sensor", [] { return check_cpu_sensor(104, 100); }},
      {"utilization oracle", [] { return check_utilization_oracle(); }},
  };
  for (const auto& [name, run] : checks) {
    const auto r = run();
    o.require(r.ok, name + ": " + r.detail);
    if (r.ok) o.notes.push_back(name + ": " + r.detail);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path = SIPOVL_SCENARIO_CONFIG;
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[++i];
    } else if (arg == "--known-fail" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--config PATH] [--known-fail N]...\n");
      return 2;
    }
  }

  std::ifstream in(config_path);
  if (!in) {
    std::fprintf(stderr, "cannot read %s\n", config_path.c_str());
    return 2;
  }
  const ScenarioConfig base = parse_config(in);
  const double capacity = base.downstream_capacity_cps;
  std::printf("scenario: %s\n\n", config_path.c_str());

  const auto off = sweep(base, false, {100, 300, 500, 700, 900, 1100, 1300, 1500, 1700});
  const auto on = sweep(base, true, {100, 300, 500, 700, 900, 1050, 1100, 1300, 1400, 1500, 1700});
  print_rows("control off", off);
  print_rows("control on", on);
  std::printf("\n");

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"underload fidelity", [&] { return underload(off, on); }},
      {"collapse without control", [&] { return collapse(off, capacity); }},
      {"sustained throughput with control", [&] { return sustained(on, capacity); }},
      {"setup delay", [&] { return delays(off, on, capacity); }},
      {"retransmission suppression", [&] { return retransmissions(off, on, capacity); }},
      {"controller growth trace", [] { return controller_trace(); }},
      {"property suites", [] { return properties(); }},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto o = criteria[i].second();
    if (!o.pass) failed.insert(id);
    const char* tag = o.pass ? (known.count(id) ? "PASS (listed as known failure)" : "PASS")
                             : (known.count(id) ? "FAIL (known)" : "FAIL");
    std::printf("criterion %d %-36s %s\n", id, criteria[i].first.c_str(), tag);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
  }
  std::printf("\n%zu of %zu criteria pass\n", criteria.size() - failed.size(), criteria.size());
  return failed == known ? 0 : 1;
}
