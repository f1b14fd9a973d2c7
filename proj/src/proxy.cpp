#include "sipovl/proxy.hpp"

#include <cmath>
#include <stdexcept>

namespace sipovl {

SimTime service_time_for_capacity(double capacity_cps, int messages_per_call) {
  if (capacity_cps <= 0.0 || messages_per_call <= 0) {
    throw std::invalid_argument("capacity and messages per call must be positive");
  }
  return SimTime{std::llround(1e6 / (capacity_cps * messages_per_call))};
}

CpuSensor::CpuSensor(SimTime window, double threshold) : window_(window), threshold_(threshold) {
  if (window <= SimTime::zero()) throw std::invalid_argument("CPU sensor window must be positive");
}

void CpuSensor::record_busy(SimTime start, SimTime end) {
  if (end <= start) return;
  if (!intervals_.empty() && intervals_.back().second == start) {
    intervals_.back().second = end;
  } else {
    intervals_.emplace_back(start, end);
  }
  total_ += end - start;
}

void CpuSensor::prune(SimTime cutoff) {
  while (!intervals_.empty() && intervals_.front().second <= cutoff) {
    total_ -= intervals_.front().second - intervals_.front().first;
    intervals_.pop_front();
  }
}

double CpuSensor::utilization(SimTime now) {
  const SimTime cutoff = now - window_;
  prune(cutoff);
  SimTime busy = total_;
  if (!intervals_.empty() && intervals_.front().first < cutoff) busy -= cutoff - intervals_.front().first;
  return static_cast<double>(busy.count()) / static_cast<double>(window_.count());
}

CpuDecision CpuSensor::admission_check(const SipMessage& msg, SimTime now) {
  if (msg.kind != MessageKind::kInvite || msg.is_retransmission) return CpuDecision::kAdmit;
  return utilization(now) > threshold_ ? CpuDecision::kReject503 : CpuDecision::kAdmit;
}

ProxyModel::ProxyModel(Simulator& sim, EntityId self, ProxyConfig config, EventLog& log)
    : sim_(sim), self_(self), config_(config), log_(log) {}

Hop ProxyModel::outgoing_hop() const {
  return config_.role == ProxyRole::kUpstream ? Hop::kP1ToP2 : Hop::kP2ToUas;
}

void ProxyModel::on_event(const SimEvent& ev) {
  if (const auto* d = std::get_if<MessageDelivery>(&ev.payload)) {
    enqueue(d->message);
  } else if (std::holds_alternative<ServiceCompletion>(ev.payload)) {
    service_next();
  } else if (const auto* t = std::get_if<TimerFire>(&ev.payload)) {
    handle_timer(t->key);
  }
}

EnqueueResult ProxyModel::enqueue(const SipMessage& msg) {
  if (queue_.size() >= config_.q_max) {
    ++stats_.dropped;
    log_.record(sim_.now(), MetricKind::kQueueDrop, msg.call_id, static_cast<std::int64_t>(self_));
    return EnqueueResult::kDropped;
  }
  queue_.push_back(msg);
  high_water_ = std::max(high_water_, queue_.size());
  if (!busy_) {
    busy_ = true;
    service_started_ = sim_.now();
    sim_.schedule_in(config_.service_time, self_, ServiceCompletion{});
  }
  return EnqueueResult::kAccepted;
}

void ProxyModel::service_next() {
  if (queue_.empty()) throw std::logic_error("service completion with an empty queue");
  const SipMessage msg = queue_.front();
  queue_.pop_front();
  busy_accum_ += config_.service_time;
  if (sensor_) sensor_->record_busy(service_started_, sim_.now());
  ++stats_.processed;
  process(msg);
  if (!queue_.empty()) {
    service_started_ = sim_.now();
    sim_.schedule_in(config_.service_time, self_, ServiceCompletion{});
  } else {
    busy_ = false;
  }
}

void ProxyModel::process(const SipMessage& msg) {
  switch (msg.kind) {
    case MessageKind::kInvite: handle_invite(msg); break;
    case MessageKind::kBye: handle_bye(msg); break;
    case MessageKind::kAck: handle_ack(msg); break;
    default: handle_response(msg); break;
  }
}

void ProxyModel::respond_upstream(ServerTransaction& txn, MessageKind kind, CallId call) {
  SipMessage resp{kind, call, txn.branch, false, sim_.now()};
  server_txn_respond(txn, resp);
  toward_caller_->send(sim_, resp);
}

void ProxyModel::arm(CallId call, bool bye, SimTime at) {
  sim_.schedule(at, self_, TimerFire{(call << 1) | (bye ? 1u : 0u)});
}

void ProxyModel::handle_invite(const SipMessage& msg) {
  auto it = legs_.find(msg.call_id);
  if (it != legs_.end() && it->second.invite_server) {
    auto [txn, act] = server_txn_step(it->second.invite_server, msg);
    it->second.invite_server = txn;
    if (act.replay) toward_caller_->send(sim_, *act.replay);
    return;
  }
  Leg& leg = legs_[msg.call_id];
  leg.invite_server = server_txn_step(std::nullopt, msg).first;

  if (controller_) {
    if (controller_->on_call_arrival() == Admission::kShed) {
      ++stats_.rejected;
      log_.record(sim_.now(), MetricKind::kRejectedWindow, msg.call_id);
      respond_upstream(*leg.invite_server, MessageKind::kServiceUnavailable503, msg.call_id);
      return;
    }
    leg.holds_window_slot = true;
  }
  // The first copy to open a transaction here is this proxy's initial INVITE,
  // even when the sender marked it as a retransmission because the original
  // was dropped at our queue. Only matched duplicates bypass the sensor.
  SipMessage initial = msg;
  initial.is_retransmission = false;
  if (sensor_ && sensor_->admission_check(initial, sim_.now()) == CpuDecision::kReject503) {
    ++stats_.rejected;
    log_.record(sim_.now(), MetricKind::kRejectedCpu, msg.call_id);
    respond_upstream(*leg.invite_server, MessageKind::kServiceUnavailable503, msg.call_id);
    return;
  }
  respond_upstream(*leg.invite_server, MessageKind::kTrying100, msg.call_id);
  leg.admitted_at = sim_.now();
  forward_invite(leg, msg);
}

void ProxyModel::forward_invite(Leg& leg, const SipMessage& msg) {
  const SimTime send_at = sim_.now() + config_.forward_delay;
  leg.invite_out = SipMessage{MessageKind::kInvite, msg.call_id,
                              make_branch(msg.call_id, outgoing_hop(), Method::kInvite), false, send_at};
  leg.invite_client =
      start_client_transaction(TxnKind::kInviteClient, leg.invite_out.branch, send_at, config_.t1);
  toward_callee_->send(sim_, leg.invite_out, config_.forward_delay);
  arm(msg.call_id, false, leg.invite_client->next_fire);
}

void ProxyModel::handle_bye(const SipMessage& msg) {
  Leg& leg = legs_[msg.call_id];
  if (leg.bye_server) {
    auto [txn, act] = server_txn_step(leg.bye_server, msg);
    leg.bye_server = txn;
    if (act.replay) toward_caller_->send(sim_, *act.replay);
    return;
  }
  leg.bye_server = server_txn_step(std::nullopt, msg).first;
  leg.bye_out = SipMessage{MessageKind::kBye, msg.call_id,
                           make_branch(msg.call_id, outgoing_hop(), Method::kBye), false, sim_.now()};
  leg.bye_client =
      start_client_transaction(TxnKind::kNonInviteClient, leg.bye_out.branch, sim_.now(), config_.t1);
  toward_callee_->send(sim_, leg.bye_out);
  arm(msg.call_id, true, leg.bye_client->next_fire);
}

void ProxyModel::handle_ack(const SipMessage& msg) {
  SipMessage out{MessageKind::kAck, msg.call_id, make_branch(msg.call_id, outgoing_hop(), Method::kAck),
                 false, sim_.now()};
  toward_callee_->send(sim_, out);
}

void ProxyModel::release_slot(Leg& leg, std::optional<double> delay_ms) {
  if (!leg.holds_window_slot || !controller_) return;
  leg.holds_window_slot = false;
  if (delay_ms) {
    controller_->on_transaction_complete(*delay_ms);
  } else {
    controller_->on_transaction_timeout();
  }
}

void ProxyModel::handle_response(const SipMessage& msg) {
  auto it = legs_.find(msg.call_id);
  const bool bye = msg.kind == MessageKind::kOk200Bye;
  if (it == legs_.end()) {
    ++stats_.stray;
    return;
  }
  Leg& leg = it->second;
  auto& client = bye ? leg.bye_client : leg.invite_client;
  if (!client || client->terminated()) {
    ++stats_.stray;
    return;
  }
  auto [txn, act] = client_txn_step(*client, msg);
  *client = txn;
  if (act.stray) {
    ++stats_.stray;
    return;
  }
  if (act.reschedule) arm(msg.call_id, bye, *act.reschedule);

  switch (msg.kind) {
    case MessageKind::kTrying100:
      break;  // hop-by-hop, absorbed here
    case MessageKind::kRinging180:
      respond_upstream(*leg.invite_server, msg.kind, msg.call_id);
      break;
    case MessageKind::kOk200Invite:
    case MessageKind::kServiceUnavailable503:
      respond_upstream(*leg.invite_server, msg.kind, msg.call_id);
      release_slot(leg, to_ms(sim_.now() - leg.admitted_at));
      break;
    case MessageKind::kOk200Bye:
      respond_upstream(*leg.bye_server, msg.kind, msg.call_id);
      break;
    default:
      break;
  }
}

void ProxyModel::handle_timer(std::uint64_t key) {
  const CallId call = key >> 1;
  const bool bye = (key & 1) != 0;
  auto it = legs_.find(call);
  if (it == legs_.end()) return;
  Leg& leg = it->second;
  auto& client = bye ? leg.bye_client : leg.invite_client;
  if (!client || client->terminated()) return;
  auto [txn, act] = client_txn_step(*client, TimerTick{sim_.now()});
  *client = txn;
  if (act.retransmit_request) {
    SipMessage copy = bye ? leg.bye_out : leg.invite_out;
    copy.is_retransmission = true;
    ++stats_.retransmissions_sent;
    log_.record(sim_.now(), bye ? MetricKind::kByeRetransmit : MetricKind::kInviteRetransmit, call);
    toward_callee_->send(sim_, copy);
  }
  if (act.reschedule) arm(call, bye, *act.reschedule);
  if (act.completed_with == TxnOutcome::kTimeout) {
    ++stats_.timeouts;
    if (!bye) release_slot(leg, std::nullopt);
  }
}

}  // namespace sipovl
