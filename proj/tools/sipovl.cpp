// sipovl: run one SIP overload scenario or a sweep of offered rates.
//
// Exit codes: 0 success, 2 config error (parse, validation, bad flags),
// 3 IO error (unreadable config, unwritable output).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sipovl/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<double> rate;
  std::string sweep;
  std::optional<std::uint64_t> seed;
  std::string control;
  std::string out = "-";
  std::string format = "csv";
  std::optional<double> duration;
  std::optional<double> warmup;
  std::optional<double> window;
  std::string plot_script;
  unsigned threads = 0;
};

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config_path, "Scenario file (key = value per line)");
  cmd.add_option("--set", o.sets, "Override one config key, e.g. --set q_max=2000 (repeatable)");
  cmd.add_option("--seed", o.seed, "Base seed; each rate runs with a seed derived from it");
  cmd.add_option("--control", o.control, "Window-based admission control at the upstream proxy")
      ->check(CLI::IsMember({"on", "off"}));
  cmd.add_option("--out", o.out, "Output path, '-' for stdout")->capture_default_str();
  cmd.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd.add_option("--duration", o.duration, "Virtual run length in seconds");
  cmd.add_option("--warmup", o.warmup, "Seconds excluded before the measurement window");
  cmd.add_option("--window", o.window, "Measurement window in seconds");
}

sipovl::ScenarioConfig load(const Options& o) {
  sipovl::ScenarioConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw IoError("cannot read config file '" + o.config_path + "'");
    cfg = sipovl::parse_config(in);
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw sipovl::ConfigParseError("--set expects key=value, got '" + kv + "'");
    sipovl::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.control.empty()) cfg.control_enabled = o.control == "on";
  if (o.duration) cfg.duration_s = *o.duration;
  if (o.warmup) cfg.warmup_s = *o.warmup;
  if (o.window) cfg.window_s = *o.window;
  if (o.rate) cfg.offered_rate_cps = *o.rate;
  return cfg;
}

std::vector<double> parse_rates(const std::string& list) {
  std::vector<double> rates;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      rates.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw sipovl::ConfigParseError("--sweep: not a number: '" + item + "'");
    }
  }
  return rates;
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

std::string plot_script(const std::string& csv_path) {
  std::ostringstream gp;
  gp << "# gnuplot script; columns follow the sipovl CSV header.\n"
     << "# queue_pct is the downstream queue high-water mark as a percentage of q_max.\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set grid\n"
     << "set terminal svg size 800,500\n"
     << "data = '" << csv_path << "'\n\n"
     << "set output 'throughput.svg'\n"
     << "set xlabel 'offered load (cps)'\n"
     << "set ylabel 'throughput (cps)'\n"
     << "plot data using 1:2 with linespoints title 'throughput', data using 1:1 with lines dt 2 title 'offered'\n\n"
     << "set output 'setup_delay.svg'\n"
     << "set ylabel 'call setup delay (ms)'\n"
     << "set logscale y\n"
     << "plot data using 1:3 with linespoints title 'mean', data using 1:4 with linespoints title 'p95'\n"
     << "unset logscale y\n\n"
     << "set output 'retransmissions.svg'\n"
     << "set ylabel 'retransmissions per second'\n"
     << "plot data using 1:5 with linespoints title 'INVITE', data using 1:6 with linespoints title 'BYE'\n";
  return gp.str();
}

int execute(const Options& o, bool sweep) {
  sipovl::ScenarioConfig cfg = load(o);
  std::vector<double> rates;
  if (!sweep) {
    rates = {cfg.offered_rate_cps};
  } else {
    rates = o.sweep.empty() ? cfg.sweep_cps : parse_rates(o.sweep);
    if (rates.empty()) throw sipovl::ConfigValidationError({"sweep rate list must not be empty"});
    std::sort(rates.begin(), rates.end());
  }
  const auto rows = sipovl::run_sweep(cfg, rates, o.threads);
  const auto format = o.format == "json" ? sipovl::ExportFormat::kJson : sipovl::ExportFormat::kCsv;
  write_output(o.out, sipovl::export_reports(rows, format));
  if (!o.plot_script.empty()) write_output(o.plot_script, plot_script(o.out == "-" ? "sweep.csv" : o.out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of SIP overload in a dual-proxy topology"};
  app.require_subcommand(1);

  Options run_opts;
  auto* run = app.add_subcommand("run", "Simulate one offered rate");
  add_common(*run, run_opts);
  run->add_option("--rate", run_opts.rate, "Offered load in calls per second");

  Options sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Simulate a list of offered rates, one row each");
  add_common(*sweep, sweep_opts);
  sweep->add_option("--sweep", sweep_opts.sweep, "Comma-separated offered rates (default: config sweep_cps)");
  sweep->add_option("--plot-script", sweep_opts.plot_script, "Also write a gnuplot script for the CSV");
  sweep->add_option("--threads", sweep_opts.threads, "Parallel sweep points (0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return run->parsed() ? execute(run_opts, false) : execute(sweep_opts, true);
  } catch (const sipovl::ConfigParseError& e) {
    std::cerr << "config parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sipovl::ConfigValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  }
}
