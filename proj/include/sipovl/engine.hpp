#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sipovl/rng.hpp"
#include "sipovl/sim_time.hpp"
#include "sipovl/sip_message.hpp"

namespace sipovl {

enum class EntityId : std::uint32_t {};

struct MessageDelivery {
  SipMessage message;
};

struct TimerFire {
  std::uint64_t key = 0;
};

struct CallArrival {};
struct ServiceCompletion {};
struct SimEnd {};

using EventPayload = std::variant<MessageDelivery, TimerFire, CallArrival, ServiceCompletion, SimEnd>;

struct SimEvent {
  SimTime fire_time{0};
  std::uint64_t seq = 0;
  EntityId target{};
  EventPayload payload;
};

// Raised for violations of the engine's own contracts (scheduling into the
// past, running backwards). These are programming faults: the run is over.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Simulator {
 public:
  using Handler = std::function<void(const SimEvent&)>;
  using TraceSink = std::function<void(const SimEvent&)>;

  EntityId add_entity(std::string name, Handler handler);
  void set_handler(EntityId id, Handler handler);
  const std::string& entity_name(EntityId id) const;

  void schedule(SimTime at, EntityId target, EventPayload payload);
  void schedule_in(SimTime delay, EntityId target, EventPayload payload) {
    schedule(now_ + delay, target, std::move(payload));
  }

  // Dispatches every event with fire_time <= t_end, then parks the clock at t_end.
  void run_until(SimTime t_end);

  SimTime now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  // FNV-1a over (fire_time, seq, target, payload index) of every dispatched event.
  std::uint64_t trace_digest() const { return digest_; }
  void set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.seq > b.seq;
    }
  };

  void mix(std::uint64_t v);

  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::vector<Handler> handlers_;
  std::vector<std::string> names_;
  TraceSink trace_;
};

struct Link {
  EntityId from{};
  EntityId to{};
  SimTime delay{0};
  double loss_probability = 0.0;
};

// Delivers `msg` to link.to after link.delay unless the loss draw drops it.
// Returns whether a delivery was scheduled. The RNG is consulted only when
// 0 < loss < 1.
bool send_over_link(Simulator& sim, const Link& link, Rng& loss_rng, const SipMessage& msg);

// A link plus its private loss stream and counters.
class Channel {
 public:
  Channel(Link link, std::uint64_t loss_seed) : link_(link), rng_(loss_seed) {}

  // `extra` is added on top of the link delay for this message only.
  bool send(Simulator& sim, const SipMessage& msg, SimTime extra = SimTime{0}) {
    ++sent_;
    Link link = link_;
    link.delay += extra;
    bool delivered = send_over_link(sim, link, rng_, msg);
    if (!delivered) ++lost_;
    return delivered;
  }

  const Link& link() const { return link_; }
  std::uint64_t sent() const { return sent_; }
  std::uint64_t lost() const { return lost_; }

 private:
  Link link_;
  Rng rng_;
  std::uint64_t sent_ = 0;
  std::uint64_t lost_ = 0;
};

}  // namespace sipovl
