#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sipovl/sim_time.hpp"
#include "sipovl/sip_message.hpp"

namespace sipovl {

enum class MetricKind : std::uint8_t {
  kCallGenerated,
  kSetupComplete,     // value: setup delay in microseconds
  kRejectedAtUac,     // UAC received a 503
  kTimeout,           // UAC INVITE transaction expired
  kInviteRetransmit,  // any INVITE retransmission sent by a client transaction
  kByeRetransmit,
  kQueueDrop,         // value: entity id of the dropping proxy
  kRejectedWindow,    // upstream shed by the admission window
  kRejectedCpu,       // downstream rejected by the CPU sensor
  kAckAtUas,
  kByeComplete,
  kStray,
  kBusyProbe,         // value: cumulative downstream busy microseconds
  kUpstreamBusyProbe, // value: cumulative upstream busy microseconds
  kQueueHighWater,    // value: downstream queue high water since the last reset
};

struct MetricEvent {
  SimTime at{0};
  MetricKind kind = MetricKind::kCallGenerated;
  CallId call_id = 0;
  std::int64_t value = 0;
};

// Append-only, timestamps nondecreasing.
class EventLog {
 public:
  void record(const MetricEvent& ev);
  void record(SimTime at, MetricKind kind, CallId call = 0, std::int64_t value = 0) {
    record(MetricEvent{at, kind, call, value});
  }

  std::span<const MetricEvent> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::uint64_t count(MetricKind kind) const;

 private:
  std::vector<MetricEvent> events_;
};

struct MetricsReport {
  double offered_rate = 0.0;       // cps
  double throughput = 0.0;         // successful setups per second
  double setup_delay_mean = 0.0;   // ms
  double setup_delay_p95 = 0.0;    // ms
  double invite_retx_rate = 0.0;   // retransmissions per second
  double bye_retx_rate = 0.0;
  double cpu_utilization = 0.0;    // percent, downstream proxy
  double upstream_utilization = 0.0;  // percent, not exported
  double queue_occupancy = 0.0;    // percent, downstream queue high water / q_max
  std::uint64_t rejected_window = 0;
  std::uint64_t rejected_cpu = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t queue_drops = 0;      // not exported
  std::uint64_t generated = 0;        // calls generated in the window, not exported
  bool empty = false;
};

struct ReportContext {
  double offered_rate_cps = 0.0;
  std::size_t q_max = 0;
};

// Rates over [warmup, warmup + window]. Utilization and queue occupancy need
// busy/high-water probes at both window edges.
MetricsReport compute_report(const EventLog& log, SimTime warmup, SimTime window,
                             const ReportContext& ctx);

enum class ExportFormat { kCsv, kJson };

extern const std::vector<std::string> kReportColumns;

void export_reports(std::span<const MetricsReport> rows, ExportFormat format, std::ostream& out);
std::string export_reports(std::span<const MetricsReport> rows, ExportFormat format);

}  // namespace sipovl
