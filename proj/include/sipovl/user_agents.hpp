#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sipovl/engine.hpp"
#include "sipovl/metrics.hpp"
#include "sipovl/traffic.hpp"
#include "sipovl/transaction.hpp"

namespace sipovl {

enum class CallOutcome : std::uint8_t { kInFlight, kSuccess, kRejected503, kTimeout };

struct CallTally {
  std::uint64_t generated = 0;
  std::uint64_t successes = 0;
  std::uint64_t rejections = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t byes_sent = 0;
  std::uint64_t byes_completed = 0;
};

/// Call originator. Pulls arrivals from an ArrivalStream, places each call
/// through P1, acknowledges the 200 OK at once and hangs up after the
/// call's hold time.
class UserAgentClient {
 public:
  UserAgentClient(Simulator& sim, EntityId self, EventLog& log, ArrivalStream arrivals,
                  HoldTimeSampler holds, SimTime t1);

  void set_channel(Channel* to_proxy) { to_proxy_ = to_proxy; }
  // Schedules the first arrival.
  void start();
  void on_event(const SimEvent& ev);

  void drive_call(const CallScript& call);

  CallTally tally() const;
  CallOutcome outcome(CallId id) const { return calls_.at(id - 1).outcome; }

 private:
  struct Call {
    CallScript script;
    CallOutcome outcome = CallOutcome::kInFlight;
    ClientTransaction invite;
    SipMessage invite_msg;
    std::optional<ClientTransaction> bye;
    SipMessage bye_msg;
    bool bye_done = false;
  };

  enum class TimerTag : std::uint64_t { kInvite = 0, kBye = 1, kHangup = 2 };

  void arm(CallId id, TimerTag tag, SimTime at);
  void schedule_next_arrival();
  void on_response(const SipMessage& msg);
  void on_timer(std::uint64_t key);
  void send_bye(CallId id);

  Simulator& sim_;
  EntityId self_;
  EventLog& log_;
  ArrivalStream arrivals_;
  HoldTimeSampler holds_;
  SimTime t1_;
  Channel* to_proxy_ = nullptr;
  std::optional<SimTime> pending_arrival_;
  std::vector<Call> calls_;  // call id n lives at index n - 1
  std::uint64_t byes_sent_ = 0;
  std::uint64_t byes_completed_ = 0;
};

/// Call terminator: answers every INVITE with 100, 180 and, after the
/// answer delay, 200 OK. Duplicate requests replay the last response.
class UserAgentServer {
 public:
  UserAgentServer(Simulator& sim, EntityId self, EventLog& log, SimTime answer_delay);

  void set_channel(Channel* to_proxy) { to_proxy_ = to_proxy; }
  void on_event(const SimEvent& ev);

  std::uint64_t acks_received() const { return acks_; }

 private:
  struct Dialog {
    std::optional<ServerTransaction> invite;
    std::optional<ServerTransaction> bye;
    bool acked = false;
  };

  void respond(ServerTransaction& txn, MessageKind kind, CallId call);
  void on_request(const SipMessage& msg);

  Simulator& sim_;
  EntityId self_;
  EventLog& log_;
  SimTime answer_delay_;
  Channel* to_proxy_ = nullptr;
  std::unordered_map<CallId, Dialog> dialogs_;
  std::uint64_t acks_ = 0;
};

}  // namespace sipovl
