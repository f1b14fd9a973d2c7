#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sipovl/engine.hpp"
#include "sipovl/metrics.hpp"
#include "sipovl/proxy.hpp"
#include "sipovl/traffic.hpp"
#include "sipovl/user_agents.hpp"
#include "sipovl/window_controller.hpp"

namespace sipovl {

struct HopLink {
  double delay_ms = 0.0;
  double loss = 0.0;
};

inline const std::vector<double> kDefaultSweep = {100, 300, 500, 700, 900, 1100, 1300, 1500, 1700};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  double duration_s = 90.0;
  double warmup_s = 20.0;
  double window_s = 60.0;
  double offered_rate_cps = 500.0;
  std::vector<double> sweep_cps = kDefaultSweep;
  double downstream_capacity_cps = 700.0;
  double upstream_capacity_cps = 2800.0;
  std::int64_t q_max = 1000;
  double t1_ms = 500.0;
  HopLink uac_p1;
  HopLink p1_p2;
  HopLink p2_uas;
  bool control_enabled = false;
  double z_th_ms = 200.0;
  double alpha = 3.0;
  std::int64_t history_k = 30;
  double initial_window = 1.0;
  double initial_win_th = 64.0;
  OverloadPredicate comparator = OverloadPredicate::kMeanAboveThresholdPlusSpread;
  bool cpu_sensor_enabled = true;
  double cpu_threshold = 0.90;
  double cpu_window_ms = 1000.0;
  ArrivalProcess arrival_process = ArrivalProcess::kPoisson;
  HoldDistribution hold_time_distribution = HoldDistribution::kExponential;
  double hold_time_mean_s = 10.0;
  double answer_delay_ms = 0.0;
  double dns_delay_ms = 0.0;
  // Accepted so existing scenario files parse; no model behavior reads them.
  std::optional<double> tau;
  std::optional<double> mu;
};

// Malformed config text: bad syntax, unknown key, unparsable value.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed config whose values violate the scenario invariants.
class ConfigValidationError : public std::runtime_error {
 public:
  explicit ConfigValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// `key = value` per line; `#` starts a comment. Keys absent from the text
// keep their defaults.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_text(const std::string& text);
// Applies one key/value pair, as if it appeared in a config file.
void apply_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);
std::string format_config(const ScenarioConfig& cfg);

std::vector<std::string> validate(const ScenarioConfig& cfg);

// Seed for one sweep point: splitmix64(base_seed XOR splitmix64(round(rate * 1000))).
std::uint64_t derive_seed(std::uint64_t base_seed, double rate_cps);
// The config a run or sweep at `rate_cps` actually executes.
ScenarioConfig config_for_rate(const ScenarioConfig& base, double rate_cps);

struct RunResult {
  MetricsReport report;
  CallTally tally;
  EventLog log;
  ProxyStats upstream;
  ProxyStats downstream;
  std::uint64_t trace_digest = 0;
  std::uint64_t events_dispatched = 0;
  SimTime downstream_service_time{0};
  SimTime upstream_service_time{0};
  std::uint64_t acks_at_uas = 0;
  std::optional<WindowController> controller;
};

/// UAC -> P1 -> P2 -> UAS with one upstream proxy, wired from a config.
class Scenario {
 public:
  explicit Scenario(const ScenarioConfig& cfg);
  Scenario(const Scenario&) = delete;
  Scenario& operator=(const Scenario&) = delete;

  RunResult run();

  const ScenarioConfig& config() const { return cfg_; }
  Simulator& simulator() { return sim_; }
  ProxyModel& upstream() { return *p1_; }
  ProxyModel& downstream() { return *p2_; }
  UserAgentClient& caller() { return *uac_; }
  UserAgentServer& callee() { return *uas_; }
  EventLog& log() { return log_; }

 private:
  void on_probe(const SimEvent& ev);

  ScenarioConfig cfg_;
  Simulator sim_;
  EventLog log_;
  std::vector<std::unique_ptr<Channel>> channels_;
  std::unique_ptr<UserAgentClient> uac_;
  std::unique_ptr<ProxyModel> p1_;
  std::unique_ptr<ProxyModel> p2_;
  std::unique_ptr<UserAgentServer> uas_;
  EntityId probe_{};
  bool ran_ = false;
};

// Validates, then builds. Throws ConfigValidationError listing every violation.
std::unique_ptr<Scenario> build_scenario(const ScenarioConfig& cfg);
RunResult run_scenario(const ScenarioConfig& cfg);

// One independent run per rate (derived seeds), results in the order given.
std::vector<MetricsReport> run_sweep(const ScenarioConfig& base, std::span<const double> rates,
                                     unsigned max_threads = 0);

}  // namespace sipovl
