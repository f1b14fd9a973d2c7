#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <utility>

#include "sipovl/engine.hpp"
#include "sipovl/metrics.hpp"
#include "sipovl/transaction.hpp"
#include "sipovl/window_controller.hpp"

namespace sipovl {

enum class ProxyRole { kUpstream, kDownstream };

// Per-message service time that makes `capacity_cps` calls per second
// saturate a server handling `messages_per_call` messages each. Rounded to
// whole microseconds.
SimTime service_time_for_capacity(double capacity_cps, int messages_per_call);

enum class CpuDecision { kAdmit, kReject503 };

/// Busy fraction of a server over a trailing window.
class CpuSensor {
 public:
  CpuSensor(SimTime window, double threshold);

  // Intervals must be reported in time order and must not overlap.
  void record_busy(SimTime start, SimTime end);
  double utilization(SimTime now);

  // Gates only new calls: INVITEs that are not retransmissions.
  CpuDecision admission_check(const SipMessage& msg, SimTime now);

  SimTime window() const { return window_; }
  double threshold() const { return threshold_; }

 private:
  void prune(SimTime cutoff);

  SimTime window_;
  double threshold_;
  std::deque<std::pair<SimTime, SimTime>> intervals_;
  SimTime total_{0};
};

struct ProxyConfig {
  ProxyRole role = ProxyRole::kUpstream;
  std::size_t q_max = 1000;
  SimTime service_time{0};
  SimTime t1 = kDefaultT1;
  SimTime forward_delay{0};  // extra delay before forwarding a new INVITE (DNS lookup)
};

enum class EnqueueResult { kAccepted, kDropped };

struct ProxyStats {
  std::uint64_t processed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t rejected = 0;
  std::uint64_t stray = 0;
  std::uint64_t retransmissions_sent = 0;
  std::uint64_t timeouts = 0;
};

/// Stateful proxy modeled as a finite FIFO in front of a fixed-rate server.
///
/// Every delivered message costs one service slot, including duplicates that
/// are only absorbed and INVITEs that end up rejected. Requests travel from
/// the caller side to the callee side and responses the other way. The
/// upstream proxy may carry a WindowController; the downstream proxy may
/// carry a CpuSensor.
class ProxyModel {
 public:
  ProxyModel(Simulator& sim, EntityId self, ProxyConfig config, EventLog& log);

  void set_channels(Channel* toward_caller, Channel* toward_callee) {
    toward_caller_ = toward_caller;
    toward_callee_ = toward_callee;
  }
  void attach_controller(WindowController controller) { controller_ = std::move(controller); }
  void attach_sensor(CpuSensor sensor) { sensor_ = std::move(sensor); }

  void on_event(const SimEvent& ev);

  EnqueueResult enqueue(const SipMessage& msg);
  // Completes service of the head message and starts the next one.
  void service_next();

  const ProxyConfig& config() const { return config_; }
  std::size_t queue_length() const { return queue_.size(); }
  bool busy() const { return busy_; }
  SimTime cpu_busy_accum() const { return busy_accum_; }
  std::size_t queue_high_water() const { return high_water_; }
  void reset_high_water() { high_water_ = queue_.size(); }
  const ProxyStats& stats() const { return stats_; }
  const std::optional<WindowController>& controller() const { return controller_; }
  std::optional<CpuSensor>& sensor() { return sensor_; }

 private:
  struct Leg {
    std::optional<ServerTransaction> invite_server;
    std::optional<ClientTransaction> invite_client;
    std::optional<ServerTransaction> bye_server;
    std::optional<ClientTransaction> bye_client;
    SipMessage invite_out;
    SipMessage bye_out;
    SimTime admitted_at{0};
    bool holds_window_slot = false;
  };

  void process(const SipMessage& msg);
  void handle_invite(const SipMessage& msg);
  void handle_bye(const SipMessage& msg);
  void handle_ack(const SipMessage& msg);
  void handle_response(const SipMessage& msg);
  void handle_timer(std::uint64_t key);
  void forward_invite(Leg& leg, const SipMessage& msg);
  void respond_upstream(ServerTransaction& txn, MessageKind kind, CallId call);
  void release_slot(Leg& leg, std::optional<double> delay_ms);
  void arm(CallId call, bool bye, SimTime at);
  Hop outgoing_hop() const;

  Simulator& sim_;
  EntityId self_;
  ProxyConfig config_;
  EventLog& log_;
  Channel* toward_caller_ = nullptr;
  Channel* toward_callee_ = nullptr;
  std::optional<WindowController> controller_;
  std::optional<CpuSensor> sensor_;

  std::deque<SipMessage> queue_;
  bool busy_ = false;
  SimTime service_started_{0};
  SimTime busy_accum_{0};
  std::size_t high_water_ = 0;
  ProxyStats stats_;
  std::unordered_map<CallId, Leg> legs_;
};

}  // namespace sipovl
