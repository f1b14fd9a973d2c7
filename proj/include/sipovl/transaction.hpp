#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "sipovl/sim_time.hpp"
#include "sipovl/sip_message.hpp"

namespace sipovl {

inline constexpr SimTime kDefaultT1 = SimTime{500'000};
inline constexpr SimTime kNonInviteIntervalCap = SimTime{4'000'000};
inline constexpr int kTimeoutBudgetMultiple = 64;

enum class TxnKind : std::uint8_t { kInviteClient, kNonInviteClient };

// Interval until the retransmission numbered `attempt` (0 = first timer after
// the original send). INVITE: T1*2^attempt. Non-INVITE: the same, capped at
// 4 s. Returns nullopt once the cumulative wait would exceed 64*T1.
std::optional<SimTime> next_retransmit_interval(TxnKind kind, int attempt, SimTime t1);

enum class ClientState : std::uint8_t { kCalling, kProceeding, kCompleted, kTerminated };

enum class TxnOutcome : std::uint8_t { kPending, kSuccess, kRejected, kTimeout };

struct ClientTransaction {
  TxnKind kind = TxnKind::kInviteClient;
  ClientState state = ClientState::kCalling;
  Branch branch = 0;
  int attempt = 0;
  SimTime t1 = kDefaultT1;
  SimTime started_at{0};
  SimTime next_fire{0};
  TxnOutcome outcome = TxnOutcome::kPending;

  SimTime deadline() const { return started_at + kTimeoutBudgetMultiple * t1; }
  bool terminated() const { return state == ClientState::kTerminated; }
};

ClientTransaction start_client_transaction(TxnKind kind, Branch branch, SimTime now, SimTime t1);

struct TimerTick {
  SimTime now{0};
};

using ClientInput = std::variant<SipMessage, TimerTick>;

struct ClientActions {
  bool retransmit_request = false;
  bool send_ack = false;
  bool stray = false;
  std::optional<SimTime> reschedule;  // new next_fire, when it changed
  TxnOutcome completed_with = TxnOutcome::kPending;

  bool empty() const {
    return !retransmit_request && !send_ack && !stray && !reschedule &&
           completed_with == TxnOutcome::kPending;
  }
};

std::pair<ClientTransaction, ClientActions> client_txn_step(ClientTransaction txn,
                                                            const ClientInput& input);

enum class ServerState : std::uint8_t { kProceeding, kCompleted, kTerminated };

struct ServerTransaction {
  Branch branch = 0;
  bool invite = true;
  ServerState state = ServerState::kProceeding;
  std::optional<SipMessage> last_response;
};

struct ServerActions {
  bool pass_to_core = false;
  std::optional<SipMessage> replay;
};

// Feeds a request to the server side. With no existing transaction, one is
// created and the request passes to the proxy core. Duplicates replay the
// stored response (marked as a retransmission) or are silently absorbed.
std::pair<ServerTransaction, ServerActions> server_txn_step(std::optional<ServerTransaction> txn,
                                                            const SipMessage& request);

// Records a response sent by the owner of the server transaction.
void server_txn_respond(ServerTransaction& txn, const SipMessage& response);

enum class Node : std::uint8_t { kUac, kP1, kP2, kUas };

struct FlowStep {
  Node from;
  Node to;
  MessageKind kind;
};

// Canonical successful call across UAC -> P1 -> P2 -> UAS with stateful
// proxies: INVITE and 100 Trying are hop-by-hop, everything else is relayed
// end to end.
std::vector<FlowStep> call_message_sequence();

// Messages a node receives (and hence processes) in one clean call.
int messages_received_per_call(Node node);
// Messages a node transmits, forwarded or generated, in one clean call.
int messages_sent_per_call(Node node);

}  // namespace sipovl
