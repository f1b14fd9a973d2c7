#include "sipovl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sipovl {

void EventLog::record(const MetricEvent& ev) {
  if (!events_.empty() && ev.at < events_.back().at) {
    throw std::logic_error("metric event recorded out of time order");
  }
  events_.push_back(ev);
}

std::uint64_t EventLog::count(MetricKind kind) const {
  return static_cast<std::uint64_t>(
      std::count_if(events_.begin(), events_.end(), [kind](const MetricEvent& e) { return e.kind == kind; }));
}

namespace {

bool is_probe(MetricKind k) {
  return k == MetricKind::kBusyProbe || k == MetricKind::kUpstreamBusyProbe ||
         k == MetricKind::kQueueHighWater;
}

// Value of the latest probe of `kind` at or before `t`; 0 if none.
std::int64_t probe_at(std::span<const MetricEvent> events, MetricKind kind, SimTime t) {
  std::int64_t v = 0;
  for (const auto& e : events) {
    if (e.at > t) break;
    if (e.kind == kind) v = e.value;
  }
  return v;
}

double clamp_pct(double v) { return std::clamp(v, 0.0, 100.0); }

}  // namespace

MetricsReport compute_report(const EventLog& log, SimTime warmup, SimTime window,
                             const ReportContext& ctx) {
  if (window <= SimTime::zero()) throw std::invalid_argument("measurement window must be positive");
  MetricsReport r;
  r.offered_rate = ctx.offered_rate_cps;
  const SimTime lo = warmup;
  const SimTime hi = warmup + window;
  const double window_s = to_seconds(window);

  std::vector<double> delays_ms;
  std::uint64_t invite_retx = 0;
  std::uint64_t bye_retx = 0;
  bool any = false;
  const auto events = log.events();
  for (const auto& e : events) {
    if (e.at < lo || e.at >= hi || is_probe(e.kind)) continue;
    any = true;
    switch (e.kind) {
      case MetricKind::kCallGenerated: ++r.generated; break;
      case MetricKind::kSetupComplete: delays_ms.push_back(static_cast<double>(e.value) / 1000.0); break;
      case MetricKind::kTimeout: ++r.timeouts; break;
      case MetricKind::kInviteRetransmit: ++invite_retx; break;
      case MetricKind::kByeRetransmit: ++bye_retx; break;
      case MetricKind::kQueueDrop: ++r.queue_drops; break;
      case MetricKind::kRejectedWindow: ++r.rejected_window; break;
      case MetricKind::kRejectedCpu: ++r.rejected_cpu; break;
      default: break;
    }
  }
  if (!any) {
    MetricsReport zero;
    zero.offered_rate = ctx.offered_rate_cps;
    zero.empty = true;
    return zero;
  }

  r.throughput = static_cast<double>(delays_ms.size()) / window_s;
  if (!delays_ms.empty()) {
    double sum = 0.0;
    for (double d : delays_ms) sum += d;
    r.setup_delay_mean = sum / static_cast<double>(delays_ms.size());
    std::sort(delays_ms.begin(), delays_ms.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(delays_ms.size())));
    r.setup_delay_p95 = delays_ms[std::max<std::size_t>(rank, 1) - 1];
  }
  r.invite_retx_rate = static_cast<double>(invite_retx) / window_s;
  r.bye_retx_rate = static_cast<double>(bye_retx) / window_s;

  const double window_us = static_cast<double>(window.count());
  const auto busy = probe_at(events, MetricKind::kBusyProbe, hi) - probe_at(events, MetricKind::kBusyProbe, lo);
  r.cpu_utilization = clamp_pct(100.0 * static_cast<double>(busy) / window_us);
  const auto up_busy = probe_at(events, MetricKind::kUpstreamBusyProbe, hi) -
                       probe_at(events, MetricKind::kUpstreamBusyProbe, lo);
  r.upstream_utilization = clamp_pct(100.0 * static_cast<double>(up_busy) / window_us);
  if (ctx.q_max > 0) {
    const auto high = probe_at(events, MetricKind::kQueueHighWater, hi);
    r.queue_occupancy = clamp_pct(100.0 * static_cast<double>(high) / static_cast<double>(ctx.q_max));
  }
  return r;
}

const std::vector<std::string> kReportColumns = {
    "offered_cps",   "throughput_cps", "setup_delay_ms",  "setup_delay_p95_ms",
    "invite_retx_rps", "bye_retx_rps", "cpu_pct",         "queue_pct",
    "rejected_window", "rejected_cpu", "timeouts",
};

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void export_reports(std::span<const MetricsReport> rows, ExportFormat format, std::ostream& out) {
  if (format == ExportFormat::kCsv) {
    for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
      out << (i ? "," : "") << kReportColumns[i];
    }
    out << '\n';
    for (const auto& r : rows) {
      out << fixed(r.offered_rate, 3) << ',' << fixed(r.throughput, 3) << ',' << fixed(r.setup_delay_mean, 3)
          << ',' << fixed(r.setup_delay_p95, 3) << ',' << fixed(r.invite_retx_rate, 3) << ','
          << fixed(r.bye_retx_rate, 3) << ',' << fixed(r.cpu_utilization, 2) << ','
          << fixed(r.queue_occupancy, 2) << ',' << r.rejected_window << ',' << r.rejected_cpu << ','
          << r.timeouts << '\n';
    }
    return;
  }
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["offered_cps"] = r.offered_rate;
    o["throughput_cps"] = r.throughput;
    o["setup_delay_ms"] = r.setup_delay_mean;
    o["setup_delay_p95_ms"] = r.setup_delay_p95;
    o["invite_retx_rps"] = r.invite_retx_rate;
    o["bye_retx_rps"] = r.bye_retx_rate;
    o["cpu_pct"] = r.cpu_utilization;
    o["queue_pct"] = r.queue_occupancy;
    o["rejected_window"] = r.rejected_window;
    o["rejected_cpu"] = r.rejected_cpu;
    o["timeouts"] = r.timeouts;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

std::string export_reports(std::span<const MetricsReport> rows, ExportFormat format) {
  std::ostringstream os;
  export_reports(rows, format, os);
  return os.str();
}

}  // namespace sipovl
