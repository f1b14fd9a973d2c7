#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "sipovl/scenario.hpp"

namespace sipovl {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw ConfigParseError("'" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigParseError("'" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "off" || value == "no" || value == "0") return false;
  throw ConfigParseError("'" + key + "': expected true/false or on/off, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

template <typename T>
Setter num(T ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.*field = to_double(k, v);
    } else {
      c.*field = static_cast<T>(to_int(k, v));
    }
  };
}

Setter hop_delay(HopLink ScenarioConfig::*hop) {
  return [hop](ScenarioConfig& c, const std::string& k, const std::string& v) { (c.*hop).delay_ms = to_double(k, v); };
}

Setter hop_loss(HopLink ScenarioConfig::*hop) {
  return [hop](ScenarioConfig& c, const std::string& k, const std::string& v) { (c.*hop).loss = to_double(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         auto i = to_int(k, v);
         if (i < 0) throw ConfigParseError("'seed': must be non-negative");
         c.seed = static_cast<std::uint64_t>(i);
       }},
      {"duration_s", num(&ScenarioConfig::duration_s)},
      {"warmup_s", num(&ScenarioConfig::warmup_s)},
      {"window_s", num(&ScenarioConfig::window_s)},
      {"offered_rate_cps", num(&ScenarioConfig::offered_rate_cps)},
      {"sweep_cps", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.sweep_cps = to_list(k, v); }},
      {"downstream_capacity_cps", num(&ScenarioConfig::downstream_capacity_cps)},
      {"upstream_capacity_cps", num(&ScenarioConfig::upstream_capacity_cps)},
      {"q_max", num(&ScenarioConfig::q_max)},
      {"t1_ms", num(&ScenarioConfig::t1_ms)},
      {"link_delay_ms_uac_p1", hop_delay(&ScenarioConfig::uac_p1)},
      {"link_delay_ms_p1_p2", hop_delay(&ScenarioConfig::p1_p2)},
      {"link_delay_ms_p2_uas", hop_delay(&ScenarioConfig::p2_uas)},
      {"link_loss_uac_p1", hop_loss(&ScenarioConfig::uac_p1)},
      {"link_loss_p1_p2", hop_loss(&ScenarioConfig::p1_p2)},
      {"link_loss_p2_uas", hop_loss(&ScenarioConfig::p2_uas)},
      {"control_enabled", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.control_enabled = to_bool(k, v); }},
      {"z_th_ms", num(&ScenarioConfig::z_th_ms)},
      {"alpha", num(&ScenarioConfig::alpha)},
      {"history_k", num(&ScenarioConfig::history_k)},
      {"initial_window", num(&ScenarioConfig::initial_window)},
      {"initial_win_th", num(&ScenarioConfig::initial_win_th)},
      {"comparator", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         if (!parse_overload_predicate(v, c.comparator)) {
           throw ConfigParseError("'" + k + "': expected mean_std, literal or momentary, got '" + v + "'");
         }
       }},
      {"cpu_sensor_enabled", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.cpu_sensor_enabled = to_bool(k, v); }},
      {"cpu_threshold", num(&ScenarioConfig::cpu_threshold)},
      {"cpu_window_ms", num(&ScenarioConfig::cpu_window_ms)},
      {"arrival_process", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         if (v == "poisson") c.arrival_process = ArrivalProcess::kPoisson;
         else if (v == "deterministic") c.arrival_process = ArrivalProcess::kDeterministic;
         else throw ConfigParseError("'" + k + "': expected poisson or deterministic, got '" + v + "'");
       }},
      {"hold_time_distribution", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         if (v == "exponential") c.hold_time_distribution = HoldDistribution::kExponential;
         else if (v == "constant") c.hold_time_distribution = HoldDistribution::kConstant;
         else throw ConfigParseError("'" + k + "': expected exponential or constant, got '" + v + "'");
       }},
      {"hold_time_mean_s", num(&ScenarioConfig::hold_time_mean_s)},
      {"answer_delay_ms", num(&ScenarioConfig::answer_delay_ms)},
      {"dns_delay_ms", num(&ScenarioConfig::dns_delay_ms)},
      {"tau", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.tau = to_double(k, v); }},
      {"mu", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.mu = to_double(k, v); }},
  };
  return table;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid scenario config:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

void apply_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigParseError("unknown key '" + key + "'");
  it->second(cfg, key, value);
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!seen.insert(key).second) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    try {
      apply_config_value(cfg, key, value);
    } catch (const ConfigParseError& e) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string format_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(17);
  auto hop = [&](const char* name, const HopLink& h) {
    os << "link_delay_ms_" << name << " = " << h.delay_ms << '\n';
    os << "link_loss_" << name << " = " << h.loss << '\n';
  };
  os << "seed = " << c.seed << '\n'
     << "duration_s = " << c.duration_s << '\n'
     << "warmup_s = " << c.warmup_s << '\n'
     << "window_s = " << c.window_s << '\n'
     << "offered_rate_cps = " << c.offered_rate_cps << '\n'
     << "sweep_cps = ";
  for (std::size_t i = 0; i < c.sweep_cps.size(); ++i) os << (i ? "," : "") << c.sweep_cps[i];
  os << '\n'
     << "downstream_capacity_cps = " << c.downstream_capacity_cps << '\n'
     << "upstream_capacity_cps = " << c.upstream_capacity_cps << '\n'
     << "q_max = " << c.q_max << '\n'
     << "t1_ms = " << c.t1_ms << '\n';
  hop("uac_p1", c.uac_p1);
  hop("p1_p2", c.p1_p2);
  hop("p2_uas", c.p2_uas);
  os << "control_enabled = " << (c.control_enabled ? "true" : "false") << '\n'
     << "z_th_ms = " << c.z_th_ms << '\n'
     << "alpha = " << c.alpha << '\n'
     << "history_k = " << c.history_k << '\n'
     << "initial_window = " << c.initial_window << '\n'
     << "initial_win_th = " << c.initial_win_th << '\n'
     << "comparator = " << to_string(c.comparator) << '\n'
     << "cpu_sensor_enabled = " << (c.cpu_sensor_enabled ? "true" : "false") << '\n'
     << "cpu_threshold = " << c.cpu_threshold << '\n'
     << "cpu_window_ms = " << c.cpu_window_ms << '\n'
     << "arrival_process = " << (c.arrival_process == ArrivalProcess::kPoisson ? "poisson" : "deterministic") << '\n'
     << "hold_time_distribution = "
     << (c.hold_time_distribution == HoldDistribution::kExponential ? "exponential" : "constant") << '\n'
     << "hold_time_mean_s = " << c.hold_time_mean_s << '\n'
     << "answer_delay_ms = " << c.answer_delay_ms << '\n'
     << "dns_delay_ms = " << c.dns_delay_ms << '\n';
  if (c.tau) os << "tau = " << *c.tau << '\n';
  if (c.mu) os << "mu = " << *c.mu << '\n';
  return os.str();
}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> v;
  auto need = [&v](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  need(c.offered_rate_cps > 0, "offered_rate_cps must be > 0");
  need(!c.sweep_cps.empty(), "sweep_cps must not be empty");
  need(std::all_of(c.sweep_cps.begin(), c.sweep_cps.end(), [](double r) { return r > 0; }),
       "sweep_cps entries must all be > 0");
  need(c.downstream_capacity_cps > 0, "downstream_capacity_cps must be > 0");
  need(c.upstream_capacity_cps > 0, "upstream_capacity_cps must be > 0");
  need(c.window_s > 0, "window_s must be > 0");
  need(c.warmup_s >= 0, "warmup_s must be >= 0");
  need(c.duration_s > c.warmup_s + c.window_s, "duration_s must exceed warmup_s + window_s");
  need(c.q_max >= 0, "q_max must be >= 0");
  need(c.t1_ms > 0, "t1_ms must be > 0");
  for (auto [name, hop] : {std::pair{"uac_p1", c.uac_p1}, std::pair{"p1_p2", c.p1_p2}, std::pair{"p2_uas", c.p2_uas}}) {
    need(hop.delay_ms >= 0, std::string("link_delay_ms_") + name + " must be >= 0");
    need(hop.loss >= 0 && hop.loss <= 1, std::string("link_loss_") + name + " must be in [0, 1]");
  }
  need(c.z_th_ms >= 0, "z_th_ms must be >= 0");
  need(c.alpha >= 0, "alpha must be >= 0");
  need(c.history_k >= 1, "history_k must be >= 1");
  need(c.initial_window >= 1, "initial_window must be >= 1");
  need(c.initial_win_th >= 1, "initial_win_th must be >= 1");
  need(c.cpu_threshold > 0 && c.cpu_threshold <= 1, "cpu_threshold must be in (0, 1]");
  need(c.cpu_window_ms > 0, "cpu_window_ms must be > 0");
  need(c.hold_time_mean_s >= 0, "hold_time_mean_s must be >= 0");
  need(c.answer_delay_ms >= 0, "answer_delay_ms must be >= 0");
  need(c.dns_delay_ms >= 0, "dns_delay_ms must be >= 0");
  return v;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, double rate_cps) {
  const auto milli = static_cast<std::uint64_t>(std::llround(rate_cps * 1000.0));
  return splitmix64(base_seed ^ splitmix64(milli));
}

ScenarioConfig config_for_rate(const ScenarioConfig& base, double rate_cps) {
  ScenarioConfig cfg = base;
  cfg.offered_rate_cps = rate_cps;
  cfg.seed = derive_seed(base.seed, rate_cps);
  return cfg;
}

}  // namespace sipovl
