#include <doctest.h>

#include "sipovl/traffic.hpp"

using namespace sipovl;

TEST_CASE("zero rate yields no arrivals") {
  CHECK(generate_arrivals(0, 10, 1).empty());
}

TEST_CASE("deterministic arrivals are evenly spaced") {
  const auto calls = generate_arrivals(10, 1, 1, ArrivalProcess::kDeterministic);
  REQUIRE(calls.size() == 10);
  for (std::size_t i = 0; i < calls.size(); ++i) {
    CHECK(calls[i].arrival_time == SimTime{static_cast<std::int64_t>(i) * 100'000});
  }
}

TEST_CASE("Poisson arrivals are sorted, inside the horizon and seed-stable") {
  const auto a = generate_arrivals(50, 20, 11);
  const auto b = generate_arrivals(50, 20, 11);
  const auto c = generate_arrivals(50, 20, 12);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].arrival_time == b[i].arrival_time);
  CHECK((a.size() != c.size() || a.front().arrival_time != c.front().arrival_time));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].arrival_time <= a[i].arrival_time);
  CHECK(a.back().arrival_time < from_seconds(20));
}

TEST_CASE("hold times follow the configured distribution") {
  const auto fixed = generate_arrivals(10, 5, 3, ArrivalProcess::kPoisson, 2.5, HoldDistribution::kConstant);
  for (const auto& c : fixed) CHECK(c.hold_time == from_seconds(2.5));

  const auto exp = generate_arrivals(200, 100, 3, ArrivalProcess::kPoisson, 10.0);
  double sum = 0;
  for (const auto& c : exp) {
    CHECK(c.hold_time >= SimTime{0});
    sum += to_seconds(c.hold_time);
  }
  // Mean of ~20000 exponentials with mean 10: standard error ~0.07.
  CHECK(sum / static_cast<double>(exp.size()) == doctest::Approx(10.0).epsilon(0.03));
}

TEST_CASE("arrival stream rejects negative rates") {
  CHECK_THROWS(ArrivalStream(-1, SimTime{1000}, ArrivalProcess::kPoisson, 1));
}
