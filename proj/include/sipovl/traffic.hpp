#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sipovl/rng.hpp"
#include "sipovl/sim_time.hpp"

namespace sipovl {

enum class ArrivalProcess { kPoisson, kDeterministic };
enum class HoldDistribution { kExponential, kConstant };

struct CallScript {
  SimTime arrival_time{0};
  SimTime hold_time{0};
};

// Lazily yields arrival instants in [0, duration).
class ArrivalStream {
 public:
  ArrivalStream(double rate_cps, SimTime duration, ArrivalProcess process, std::uint64_t seed);

  std::optional<SimTime> next();

 private:
  double rate_;
  SimTime duration_;
  ArrivalProcess process_;
  Rng rng_;
  std::uint64_t index_ = 0;
  double clock_s_ = 0.0;
};

class HoldTimeSampler {
 public:
  HoldTimeSampler(double mean_s, HoldDistribution dist, std::uint64_t seed)
      : mean_s_(mean_s), dist_(dist), rng_(seed) {}

  SimTime next() {
    if (dist_ == HoldDistribution::kConstant) return from_seconds(mean_s_);
    return from_seconds(rng_.exponential(mean_s_));
  }

 private:
  double mean_s_;
  HoldDistribution dist_;
  Rng rng_;
};

// Materialized stream, using the same per-source seeding as a scenario run.
std::vector<CallScript> generate_arrivals(double rate_cps, double duration_s, std::uint64_t base_seed,
                                          ArrivalProcess process = ArrivalProcess::kPoisson,
                                          double hold_mean_s = 10.0,
                                          HoldDistribution hold = HoldDistribution::kExponential);

}  // namespace sipovl
