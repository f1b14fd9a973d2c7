#include "sipovl/traffic.hpp"

#include <stdexcept>

namespace sipovl {

ArrivalStream::ArrivalStream(double rate_cps, SimTime duration, ArrivalProcess process, std::uint64_t seed)
    : rate_(rate_cps), duration_(duration), process_(process), rng_(seed) {
  if (rate_cps < 0.0) throw std::invalid_argument("arrival rate must be >= 0");
}

std::optional<SimTime> ArrivalStream::next() {
  if (rate_ <= 0.0) return std::nullopt;
  SimTime t;
  if (process_ == ArrivalProcess::kDeterministic) {
    // k / rate computed from the index, not accumulated, so spacing is exact.
    t = from_seconds(static_cast<double>(index_) / rate_);
  } else {
    clock_s_ += rng_.exponential(1.0 / rate_);
    t = from_seconds(clock_s_);
  }
  if (t >= duration_) {
    rate_ = 0.0;
    return std::nullopt;
  }
  ++index_;
  return t;
}

std::vector<CallScript> generate_arrivals(double rate_cps, double duration_s, std::uint64_t base_seed,
                                          ArrivalProcess process, double hold_mean_s,
                                          HoldDistribution hold) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  ArrivalStream arrivals(rate_cps, from_seconds(duration_s), process,
                         stream_seed(base_seed, RngStream::kArrivals));
  HoldTimeSampler holds(hold_mean_s, hold, stream_seed(base_seed, RngStream::kHoldTimes));
  std::vector<CallScript> out;
  while (auto t = arrivals.next()) out.push_back(CallScript{*t, holds.next()});
  return out;
}

}  // namespace sipovl
