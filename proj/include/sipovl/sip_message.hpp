#pragma once

#include <cstdint>
#include <string_view>

#include "sipovl/sim_time.hpp"

namespace sipovl {

enum class MessageKind : std::uint8_t {
  kInvite,
  kTrying100,
  kRinging180,
  kOk200Invite,
  kAck,
  kBye,
  kOk200Bye,
  kServiceUnavailable503,
};

using CallId = std::uint64_t;
using Branch = std::uint64_t;

struct SipMessage {
  MessageKind kind = MessageKind::kInvite;
  CallId call_id = 0;
  Branch branch = 0;
  bool is_retransmission = false;
  SimTime created_at{0};

  friend bool operator==(const SipMessage&, const SipMessage&) = default;
};

constexpr bool is_request(MessageKind k) {
  return k == MessageKind::kInvite || k == MessageKind::kAck || k == MessageKind::kBye;
}

constexpr bool is_response(MessageKind k) { return !is_request(k); }

constexpr bool is_provisional(MessageKind k) {
  return k == MessageKind::kTrying100 || k == MessageKind::kRinging180;
}

constexpr bool is_final(MessageKind k) {
  return k == MessageKind::kOk200Invite || k == MessageKind::kOk200Bye ||
         k == MessageKind::kServiceUnavailable503;
}

std::string_view to_string(MessageKind k);

// Hop indices along UAC -> P1 -> P2 -> UAS.
enum class Hop : std::uint8_t { kUacToP1 = 0, kP1ToP2 = 1, kP2ToUas = 2 };

enum class Method : std::uint8_t { kInvite = 0, kAck = 1, kBye = 2 };

// Branch ids are derived, not allocated, so every run names transactions
// identically: one per (call, hop, method).
constexpr Branch make_branch(CallId call, Hop hop, Method method) {
  return (call << 4) | (static_cast<Branch>(hop) << 2) | static_cast<Branch>(method);
}

}  // namespace sipovl
