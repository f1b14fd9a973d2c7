#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>
#include <vector>

#include "sipovl/metrics.hpp"
#include "sipovl/scenario.hpp"
#include "sipovl/window_controller.hpp"

namespace py = pybind11;
using namespace sipovl;

namespace {

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["offered_cps"] = r.offered_rate;
  d["throughput_cps"] = r.throughput;
  d["setup_delay_ms"] = r.setup_delay_mean;
  d["setup_delay_p95_ms"] = r.setup_delay_p95;
  d["invite_retx_rps"] = r.invite_retx_rate;
  d["bye_retx_rps"] = r.bye_retx_rate;
  d["cpu_pct"] = r.cpu_utilization;
  d["queue_pct"] = r.queue_occupancy;
  d["rejected_window"] = r.rejected_window;
  d["rejected_cpu"] = r.rejected_cpu;
  d["timeouts"] = r.timeouts;
  return d;
}

ExportFormat parse_format(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw py::value_error("format must be 'csv' or 'json'");
}

}  // namespace

PYBIND11_MODULE(_sipovl, m) {
  m.doc() = "Discrete-event SIP overload simulator";

  py::register_exception<ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);
  py::register_exception<ConfigValidationError>(m, "ConfigValidationError", PyExc_ValueError);

  py::enum_<OverloadPredicate>(m, "OverloadPredicate")
      .value("MEAN_STD", OverloadPredicate::kMeanAboveThresholdPlusSpread)
      .value("LITERAL", OverloadPredicate::kLiteral)
      .value("MEAN_LATEST", OverloadPredicate::kMeanAboveAlphaTimesLatest);

  py::class_<ScenarioConfig>(m, "Config")
      .def(py::init<>())
      .def_static("parse", &parse_config_text, py::arg("text"))
      .def("set", [](ScenarioConfig& c, const std::string& key, const std::string& value) {
             apply_config_value(c, key, value);
           }, py::arg("key"), py::arg("value"))
      .def("validate", &validate)
      .def("__str__", &format_config)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("duration_s", &ScenarioConfig::duration_s)
      .def_readwrite("warmup_s", &ScenarioConfig::warmup_s)
      .def_readwrite("window_s", &ScenarioConfig::window_s)
      .def_readwrite("offered_rate_cps", &ScenarioConfig::offered_rate_cps)
      .def_readwrite("sweep_cps", &ScenarioConfig::sweep_cps)
      .def_readwrite("downstream_capacity_cps", &ScenarioConfig::downstream_capacity_cps)
      .def_readwrite("upstream_capacity_cps", &ScenarioConfig::upstream_capacity_cps)
      .def_readwrite("q_max", &ScenarioConfig::q_max)
      .def_readwrite("t1_ms", &ScenarioConfig::t1_ms)
      .def_readwrite("control_enabled", &ScenarioConfig::control_enabled)
      .def_readwrite("z_th_ms", &ScenarioConfig::z_th_ms)
      .def_readwrite("alpha", &ScenarioConfig::alpha)
      .def_readwrite("history_k", &ScenarioConfig::history_k)
      .def_readwrite("cpu_sensor_enabled", &ScenarioConfig::cpu_sensor_enabled)
      .def_readwrite("cpu_threshold", &ScenarioConfig::cpu_threshold)
      .def_readwrite("cpu_window_ms", &ScenarioConfig::cpu_window_ms)
      .def_readwrite("hold_time_mean_s", &ScenarioConfig::hold_time_mean_s);

  m.def("derive_seed", &derive_seed, py::arg("base_seed"), py::arg("rate_cps"));

  m.def("run", [](const ScenarioConfig& cfg, py::object rate) {
          const ScenarioConfig c = rate.is_none() ? cfg : config_for_rate(cfg, rate.cast<double>());
          RunResult r;
          {
            py::gil_scoped_release release;
            r = run_scenario(c);
          }
          py::dict d = report_dict(r.report);
          d["trace_digest"] = r.trace_digest;
          d["calls_generated"] = r.tally.generated;
          d["calls_succeeded"] = r.tally.successes;
          return d;
        },
        py::arg("config"), py::arg("rate") = py::none(),
        "Run one scenario. With `rate`, uses the same per-rate seed as a sweep point.");

  m.def("sweep", [](const ScenarioConfig& cfg, std::vector<double> rates, unsigned threads) {
          if (rates.empty()) rates = cfg.sweep_cps;
          std::vector<MetricsReport> rows;
          {
            py::gil_scoped_release release;
            rows = run_sweep(cfg, rates, threads);
          }
          py::list out;
          for (const auto& r : rows) out.append(report_dict(r));
          return out;
        },
        py::arg("config"), py::arg("rates") = std::vector<double>{}, py::arg("threads") = 0u);

  m.def("export", [](const ScenarioConfig& cfg, std::vector<double> rates, const std::string& format) {
          if (rates.empty()) rates = cfg.sweep_cps;
          std::vector<MetricsReport> rows;
          {
            py::gil_scoped_release release;
            rows = run_sweep(cfg, rates, 0);
          }
          return export_reports(rows, parse_format(format));
        },
        py::arg("config"), py::arg("rates") = std::vector<double>{}, py::arg("format") = "csv",
        "Sweep and render the rows exactly as the CLI writes them.");

  m.def("detect_overload",
        [](const std::vector<double>& history, double z_th_ms, double alpha, OverloadPredicate p) {
          return detect_overload(history, z_th_ms, alpha, p);
        },
        py::arg("history_ms"), py::arg("z_th_ms"), py::arg("alpha"),
        py::arg("predicate") = OverloadPredicate::kMeanAboveThresholdPlusSpread);

  py::class_<WindowController>(m, "WindowController")
      .def(py::init([](double z_th_ms, double alpha, std::size_t history_k, double initial_window,
                       double initial_win_th, OverloadPredicate predicate) {
             return WindowController(
                 WindowControllerParams{z_th_ms, alpha, history_k, initial_window, initial_win_th, predicate});
           }),
           py::arg("z_th_ms") = 200.0, py::arg("alpha") = 3.0, py::arg("history_k") = 30,
           py::arg("initial_window") = 1.0, py::arg("initial_win_th") = 64.0,
           py::arg("predicate") = OverloadPredicate::kMeanAboveThresholdPlusSpread)
      .def("on_call_arrival",
           [](WindowController& c) { return c.on_call_arrival() == Admission::kAdmit; },
           "True if the call is admitted.")
      .def("on_transaction_complete", &WindowController::on_transaction_complete, py::arg("delay_ms"))
      .def("on_transaction_timeout", &WindowController::on_transaction_timeout)
      .def_property_readonly("window", &WindowController::window)
      .def_property_readonly("win_th", &WindowController::win_th)
      .def_property_readonly("active", &WindowController::active_count)
      .def_property_readonly("history", &WindowController::delay_history);
}
