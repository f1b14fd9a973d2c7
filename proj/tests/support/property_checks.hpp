#pragma once

#include <cstdint>
#include <string>

namespace sipovl::testing {

struct CheckResult {
  bool ok = true;
  std::string detail;  // first counterexample, or a summary when ok
};

// Random admit/complete/timeout sequences against a WindowController:
// window >= 1, win_th >= 1, active <= floor(window) after every admission,
// active == admitted - finished.
CheckResult check_window_invariants(std::uint64_t seed, int sequences);

// Random T1 and attempt numbers: INVITE intervals double, non-INVITE
// intervals double up to 4 s, and the schedule ends exactly when the next
// wait would cross 64*T1.
CheckResult check_retransmit_schedule(std::uint64_t seed, int cases);

// Short runs over random rates, losses, queue sizes and control settings:
// generated == successes + rejections + timeouts + in_flight, and one BYE
// per successful call that reached hang-up.
CheckResult check_call_conservation(std::uint64_t seed, int runs);

// Two runs from the same config produce identical CSV bytes and traces.
CheckResult check_seed_determinism();

// Arrival count at 100 cps over 100 s lies within 10000 +- 4*100 for
// every seed in [first, first + seeds).
CheckResult check_poisson_count(std::uint64_t first, int seeds);

// Sliding-window utilization against a brute-force per-microsecond count.
CheckResult check_cpu_sensor(std::uint64_t seed, int cases);

// Offered 350 cps, control off: measured downstream utilization within
// 2 points of rate * 7 * service_time.
CheckResult check_utilization_oracle();

}  // namespace sipovl::testing
