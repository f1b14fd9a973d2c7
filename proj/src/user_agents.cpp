#include "sipovl/user_agents.hpp"

namespace sipovl {

UserAgentClient::UserAgentClient(Simulator& sim, EntityId self, EventLog& log, ArrivalStream arrivals,
                                 HoldTimeSampler holds, SimTime t1)
    : sim_(sim), self_(self), log_(log), arrivals_(std::move(arrivals)), holds_(std::move(holds)), t1_(t1) {}

void UserAgentClient::start() { schedule_next_arrival(); }

void UserAgentClient::schedule_next_arrival() {
  pending_arrival_ = arrivals_.next();
  if (pending_arrival_) sim_.schedule(*pending_arrival_, self_, CallArrival{});
}

void UserAgentClient::arm(CallId id, TimerTag tag, SimTime at) {
  sim_.schedule(at, self_, TimerFire{(id << 2) | static_cast<std::uint64_t>(tag)});
}

void UserAgentClient::on_event(const SimEvent& ev) {
  if (std::holds_alternative<CallArrival>(ev.payload)) {
    drive_call(CallScript{sim_.now(), holds_.next()});
    schedule_next_arrival();
  } else if (const auto* d = std::get_if<MessageDelivery>(&ev.payload)) {
    on_response(d->message);
  } else if (const auto* t = std::get_if<TimerFire>(&ev.payload)) {
    on_timer(t->key);
  }
}

void UserAgentClient::drive_call(const CallScript& script) {
  const CallId id = calls_.size() + 1;
  Call call;
  call.script = script;
  call.invite_msg = SipMessage{MessageKind::kInvite, id, make_branch(id, Hop::kUacToP1, Method::kInvite),
                               false, sim_.now()};
  call.invite = start_client_transaction(TxnKind::kInviteClient, call.invite_msg.branch, sim_.now(), t1_);
  calls_.push_back(call);
  log_.record(sim_.now(), MetricKind::kCallGenerated, id);
  to_proxy_->send(sim_, call.invite_msg);
  arm(id, TimerTag::kInvite, call.invite.next_fire);
}

void UserAgentClient::send_bye(CallId id) {
  Call& c = calls_[id - 1];
  c.bye_msg = SipMessage{MessageKind::kBye, id, make_branch(id, Hop::kUacToP1, Method::kBye), false, sim_.now()};
  c.bye = start_client_transaction(TxnKind::kNonInviteClient, c.bye_msg.branch, sim_.now(), t1_);
  ++byes_sent_;
  to_proxy_->send(sim_, c.bye_msg);
  arm(id, TimerTag::kBye, c.bye->next_fire);
}

void UserAgentClient::on_response(const SipMessage& msg) {
  if (msg.call_id == 0 || msg.call_id > calls_.size()) return;
  const CallId id = msg.call_id;
  Call& c = calls_[id - 1];

  if (msg.kind == MessageKind::kOk200Bye) {
    if (!c.bye) return;
    auto [txn, act] = client_txn_step(*c.bye, msg);
    c.bye = txn;
    if (act.completed_with == TxnOutcome::kSuccess) {
      ++byes_completed_;
      log_.record(sim_.now(), MetricKind::kByeComplete, id);
    }
    return;
  }

  auto [txn, act] = client_txn_step(c.invite, msg);
  c.invite = txn;
  if (act.stray) {
    log_.record(sim_.now(), MetricKind::kStray, id);
    return;
  }
  if (act.reschedule) arm(id, TimerTag::kInvite, *act.reschedule);
  switch (act.completed_with) {
    case TxnOutcome::kSuccess: {
      c.outcome = CallOutcome::kSuccess;
      log_.record(sim_.now(), MetricKind::kSetupComplete, id, (sim_.now() - c.invite_msg.created_at).count());
      SipMessage ack{MessageKind::kAck, id, make_branch(id, Hop::kUacToP1, Method::kAck), false, sim_.now()};
      to_proxy_->send(sim_, ack);
      arm(id, TimerTag::kHangup, sim_.now() + c.script.hold_time);
      break;
    }
    case TxnOutcome::kRejected:
      c.outcome = CallOutcome::kRejected503;
      log_.record(sim_.now(), MetricKind::kRejectedAtUac, id);
      break;
    default:
      break;
  }
}

void UserAgentClient::on_timer(std::uint64_t key) {
  const CallId id = key >> 2;
  const auto tag = static_cast<TimerTag>(key & 3);
  Call& c = calls_.at(id - 1);
  if (tag == TimerTag::kHangup) {
    send_bye(id);
    return;
  }
  const bool bye = tag == TimerTag::kBye;
  ClientTransaction& txn = bye ? *c.bye : c.invite;
  auto [next, act] = client_txn_step(txn, TimerTick{sim_.now()});
  txn = next;
  if (act.retransmit_request) {
    SipMessage copy = bye ? c.bye_msg : c.invite_msg;
    copy.is_retransmission = true;
    log_.record(sim_.now(), bye ? MetricKind::kByeRetransmit : MetricKind::kInviteRetransmit, id);
    to_proxy_->send(sim_, copy);
  }
  if (act.reschedule) arm(id, tag, *act.reschedule);
  if (act.completed_with == TxnOutcome::kTimeout && !bye) {
    c.outcome = CallOutcome::kTimeout;
    log_.record(sim_.now(), MetricKind::kTimeout, id);
  }
}

CallTally UserAgentClient::tally() const {
  CallTally t;
  t.generated = calls_.size();
  for (const auto& c : calls_) {
    switch (c.outcome) {
      case CallOutcome::kInFlight: ++t.in_flight; break;
      case CallOutcome::kSuccess: ++t.successes; break;
      case CallOutcome::kRejected503: ++t.rejections; break;
      case CallOutcome::kTimeout: ++t.timeouts; break;
    }
  }
  t.byes_sent = byes_sent_;
  t.byes_completed = byes_completed_;
  return t;
}

UserAgentServer::UserAgentServer(Simulator& sim, EntityId self, EventLog& log, SimTime answer_delay)
    : sim_(sim), self_(self), log_(log), answer_delay_(answer_delay) {}

void UserAgentServer::on_event(const SimEvent& ev) {
  if (const auto* d = std::get_if<MessageDelivery>(&ev.payload)) {
    on_request(d->message);
  } else if (const auto* t = std::get_if<TimerFire>(&ev.payload)) {
    auto it = dialogs_.find(t->key);
    if (it != dialogs_.end() && it->second.invite) respond(*it->second.invite, MessageKind::kOk200Invite, t->key);
  }
}

void UserAgentServer::respond(ServerTransaction& txn, MessageKind kind, CallId call) {
  SipMessage resp{kind, call, txn.branch, false, sim_.now()};
  server_txn_respond(txn, resp);
  to_proxy_->send(sim_, resp);
}

void UserAgentServer::on_request(const SipMessage& msg) {
  Dialog& d = dialogs_[msg.call_id];
  switch (msg.kind) {
    case MessageKind::kInvite: {
      auto [txn, act] = server_txn_step(d.invite, msg);
      d.invite = txn;
      if (act.replay) to_proxy_->send(sim_, *act.replay);
      if (!act.pass_to_core) return;
      respond(*d.invite, MessageKind::kTrying100, msg.call_id);
      respond(*d.invite, MessageKind::kRinging180, msg.call_id);
      if (answer_delay_ == SimTime::zero()) {
        respond(*d.invite, MessageKind::kOk200Invite, msg.call_id);
      } else {
        sim_.schedule_in(answer_delay_, self_, TimerFire{msg.call_id});
      }
      return;
    }
    case MessageKind::kAck:
      ++acks_;
      d.acked = true;
      log_.record(sim_.now(), MetricKind::kAckAtUas, msg.call_id);
      return;
    case MessageKind::kBye: {
      auto [txn, act] = server_txn_step(d.bye, msg);
      d.bye = txn;
      if (act.replay) to_proxy_->send(sim_, *act.replay);
      if (act.pass_to_core) respond(*d.bye, MessageKind::kOk200Bye, msg.call_id);
      return;
    }
    default:
      return;
  }
}

}  // namespace sipovl
