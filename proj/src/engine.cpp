#include "sipovl/engine.hpp"

#include <string>

namespace sipovl {

EntityId Simulator::add_entity(std::string name, Handler handler) {
  handlers_.push_back(std::move(handler));
  names_.push_back(std::move(name));
  return EntityId{static_cast<std::uint32_t>(handlers_.size() - 1)};
}

void Simulator::set_handler(EntityId id, Handler handler) {
  handlers_.at(static_cast<std::size_t>(id)) = std::move(handler);
}

const std::string& Simulator::entity_name(EntityId id) const {
  return names_.at(static_cast<std::size_t>(id));
}

void Simulator::schedule(SimTime at, EntityId target, EventPayload payload) {
  if (at < now_) {
    throw SimulationError("event scheduled in the past: t=" + std::to_string(at.count()) +
                          "us, clock=" + std::to_string(now_.count()) + "us");
  }
  if (static_cast<std::size_t>(target) >= handlers_.size()) {
    throw SimulationError("event scheduled for unknown entity " +
                          std::to_string(static_cast<std::uint32_t>(target)));
  }
  queue_.push(SimEvent{at, next_seq_++, target, std::move(payload)});
}

void Simulator::mix(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    digest_ ^= (v >> (8 * i)) & 0xff;
    digest_ *= 0x100000001b3ULL;
  }
}

void Simulator::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw SimulationError("run_until target precedes the clock");
  }
  while (!queue_.empty() && queue_.top().fire_time <= t_end) {
    // Copy out before pop: handlers may schedule and reallocate the heap.
    SimEvent ev = queue_.top();
    queue_.pop();
    now_ = ev.fire_time;
    ++dispatched_;
    mix(static_cast<std::uint64_t>(ev.fire_time.count()));
    mix(ev.seq);
    mix(static_cast<std::uint64_t>(ev.target));
    mix(ev.payload.index());
    if (trace_) trace_(ev);
    auto& handler = handlers_[static_cast<std::size_t>(ev.target)];
    if (handler) handler(ev);
  }
  now_ = t_end;
}

bool send_over_link(Simulator& sim, const Link& link, Rng& loss_rng, const SipMessage& msg) {
  bool lost = false;
  if (link.loss_probability >= 1.0) {
    lost = true;
  } else if (link.loss_probability > 0.0) {
    lost = loss_rng.bernoulli(link.loss_probability);
  }
  if (lost) return false;
  sim.schedule_in(link.delay, link.to, MessageDelivery{msg});
  return true;
}

}  // namespace sipovl
