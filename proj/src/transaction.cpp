#include "sipovl/transaction.hpp"

#include <algorithm>
#include <stdexcept>

namespace sipovl {

std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::kInvite: return "INVITE";
    case MessageKind::kTrying100: return "100 Trying";
    case MessageKind::kRinging180: return "180 Ringing";
    case MessageKind::kOk200Invite: return "200 OK (INVITE)";
    case MessageKind::kAck: return "ACK";
    case MessageKind::kBye: return "BYE";
    case MessageKind::kOk200Bye: return "200 OK (BYE)";
    case MessageKind::kServiceUnavailable503: return "503 Service Unavailable";
  }
  return "?";
}

namespace {

SimTime raw_interval(TxnKind kind, int attempt, SimTime t1) {
  // Saturate well before overflow; anything this large is past the budget.
  if (attempt >= 40) return SimTime::max() / 4;
  SimTime interval = t1 * (std::int64_t{1} << attempt);
  if (kind == TxnKind::kNonInviteClient) interval = std::min(interval, kNonInviteIntervalCap);
  return interval;
}

}  // namespace

std::optional<SimTime> next_retransmit_interval(TxnKind kind, int attempt, SimTime t1) {
  if (attempt < 0) throw std::invalid_argument("retransmit attempt must be >= 0");
  if (t1 <= SimTime::zero()) throw std::invalid_argument("T1 must be positive");
  const SimTime budget = kTimeoutBudgetMultiple * t1;
  SimTime elapsed{0};
  for (int i = 0; i < attempt; ++i) {
    elapsed += raw_interval(kind, i, t1);
    if (elapsed > budget) return std::nullopt;
  }
  const SimTime interval = raw_interval(kind, attempt, t1);
  if (elapsed + interval > budget) return std::nullopt;
  return interval;
}

ClientTransaction start_client_transaction(TxnKind kind, Branch branch, SimTime now, SimTime t1) {
  ClientTransaction txn;
  txn.kind = kind;
  txn.branch = branch;
  txn.t1 = t1;
  txn.started_at = now;
  auto first = next_retransmit_interval(kind, 0, t1);
  txn.next_fire = first ? std::min(now + *first, txn.deadline()) : txn.deadline();
  return txn;
}

namespace {

void on_response(ClientTransaction& txn, const SipMessage& msg, ClientActions& act) {
  if (msg.branch != txn.branch || is_request(msg.kind)) {
    act.stray = true;
    return;
  }
  const bool invite = txn.kind == TxnKind::kInviteClient;
  if (is_provisional(msg.kind)) {
    if (txn.state == ClientState::kCalling) {
      txn.state = ClientState::kProceeding;
      if (invite) {
        // Provisional response stops INVITE retransmissions; only the budget
        // deadline remains armed.
        txn.next_fire = txn.deadline();
        act.reschedule = txn.next_fire;
      }
    }
    return;
  }
  switch (msg.kind) {
    case MessageKind::kOk200Invite:
      if (!invite) {
        act.stray = true;
        return;
      }
      txn.state = ClientState::kTerminated;
      txn.outcome = TxnOutcome::kSuccess;
      act.send_ack = true;
      break;
    case MessageKind::kOk200Bye:
      if (invite) {
        act.stray = true;
        return;
      }
      txn.state = ClientState::kTerminated;
      txn.outcome = TxnOutcome::kSuccess;
      break;
    case MessageKind::kServiceUnavailable503:
      txn.state = ClientState::kTerminated;
      txn.outcome = TxnOutcome::kRejected;
      break;
    default:
      act.stray = true;
      return;
  }
  act.completed_with = txn.outcome;
}

void on_timer(ClientTransaction& txn, SimTime now, ClientActions& act) {
  if (now < txn.next_fire) return;  // superseded timer
  if (now >= txn.deadline()) {
    txn.state = ClientState::kTerminated;
    txn.outcome = TxnOutcome::kTimeout;
    act.completed_with = TxnOutcome::kTimeout;
    return;
  }
  const bool may_retransmit =
      txn.state == ClientState::kCalling ||
      (txn.kind == TxnKind::kNonInviteClient && txn.state == ClientState::kProceeding);
  if (may_retransmit) {
    act.retransmit_request = true;
    ++txn.attempt;
    auto interval = next_retransmit_interval(txn.kind, txn.attempt, txn.t1);
    txn.next_fire = interval ? std::min(now + *interval, txn.deadline()) : txn.deadline();
  } else {
    txn.next_fire = txn.deadline();
  }
  act.reschedule = txn.next_fire;
}

}  // namespace

std::pair<ClientTransaction, ClientActions> client_txn_step(ClientTransaction txn,
                                                            const ClientInput& input) {
  ClientActions act;
  if (txn.terminated()) return {txn, act};
  if (const auto* msg = std::get_if<SipMessage>(&input)) {
    on_response(txn, *msg, act);
  } else {
    on_timer(txn, std::get<TimerTick>(input).now, act);
  }
  return {txn, act};
}

std::pair<ServerTransaction, ServerActions> server_txn_step(std::optional<ServerTransaction> txn,
                                                            const SipMessage& request) {
  ServerActions act;
  if (!txn) {
    ServerTransaction created;
    created.branch = request.branch;
    created.invite = request.kind == MessageKind::kInvite;
    act.pass_to_core = true;
    return {created, act};
  }
  if (txn->state != ServerState::kTerminated && txn->last_response) {
    SipMessage replay = *txn->last_response;
    replay.is_retransmission = true;
    act.replay = replay;
  }
  return {*txn, act};
}

void server_txn_respond(ServerTransaction& txn, const SipMessage& response) {
  if (txn.state == ServerState::kTerminated) return;
  txn.last_response = response;
  txn.last_response->is_retransmission = false;
  if (is_final(response.kind)) txn.state = ServerState::kCompleted;
}

std::vector<FlowStep> call_message_sequence() {
  using enum Node;
  using K = MessageKind;
  return {
      {kUac, kP1, K::kInvite},       {kP1, kUac, K::kTrying100},   {kP1, kP2, K::kInvite},
      {kP2, kP1, K::kTrying100},     {kP2, kUas, K::kInvite},      {kUas, kP2, K::kTrying100},
      {kUas, kP2, K::kRinging180},   {kP2, kP1, K::kRinging180},   {kP1, kUac, K::kRinging180},
      {kUas, kP2, K::kOk200Invite},  {kP2, kP1, K::kOk200Invite},  {kP1, kUac, K::kOk200Invite},
      {kUac, kP1, K::kAck},          {kP1, kP2, K::kAck},          {kP2, kUas, K::kAck},
      {kUac, kP1, K::kBye},          {kP1, kP2, K::kBye},          {kP2, kUas, K::kBye},
      {kUas, kP2, K::kOk200Bye},     {kP2, kP1, K::kOk200Bye},     {kP1, kUac, K::kOk200Bye},
  };
}

int messages_received_per_call(Node node) {
  int n = 0;
  for (const auto& step : call_message_sequence()) n += step.to == node ? 1 : 0;
  return n;
}

int messages_sent_per_call(Node node) {
  int n = 0;
  for (const auto& step : call_message_sequence()) n += step.from == node ? 1 : 0;
  return n;
}

}  // namespace sipovl
