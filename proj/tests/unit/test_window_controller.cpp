#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "sipovl/window_controller.hpp"

using namespace sipovl;

namespace {

// Two-pass population mean and standard deviation, independent of the
// streaming computation in the library.
bool overload_oracle(const std::vector<double>& h, double z_th, double alpha) {
  if (h.empty()) return false;
  double sum = 0.0;
  for (double x : h) sum += x;
  const double mean = sum / static_cast<double>(h.size());
  double ss = 0.0;
  for (double x : h) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(h.size()));
  return mean > z_th + alpha * sd;
}

WindowController at(double window, double win_th, std::size_t active, WindowControllerParams p = {}) {
  WindowController c(p);
  c.force_state(window, win_th, active);
  return c;
}

}  // namespace

TEST_CASE("admission requires space below floor(window)") {
  auto a = at(3.4, 8, 3);
  CHECK(a.on_call_arrival() == Admission::kShed);
  CHECK(a.active_count() == 3);

  auto b = at(1.0, 8, 0);
  CHECK(b.on_call_arrival() == Admission::kAdmit);
  CHECK(b.active_count() == 1);

  auto c = at(2.0, 8, 2);
  CHECK(c.on_call_arrival() == Admission::kShed);
}

TEST_CASE("overload detection") {
  const std::vector<double> empty;
  CHECK_FALSE(detect_overload(empty, 100, 3));
  const std::vector<double> low = {10, 10, 10};
  CHECK_FALSE(detect_overload(low, 100, 3));
  const std::vector<double> high = {200, 200, 200};
  CHECK(detect_overload(high, 100, 3));
  CHECK(detect_overload(high, 100, 3) == overload_oracle(high, 100, 3));
}

TEST_CASE("overload detection agrees with a two-pass oracle") {
  const std::vector<std::vector<double>> cases = {
      {50, 150, 250}, {120, 121, 119, 118}, {1, 1000}, {99.9}, {100.1}, {0, 0, 0, 400}, {30, 60, 90, 120, 150},
  };
  for (const auto& h : cases) {
    for (double z : {0.0, 50.0, 100.0}) {
      for (double a : {0.0, 1.0, 3.0}) {
        CHECK(detect_overload(h, z, a) == overload_oracle(h, z, a));
      }
    }
  }
}

TEST_CASE("alternative readings of the overload test") {
  const std::vector<double> h = {10, 20, 30};
  // Literal form holds for any positive mean once alpha >= 1.
  CHECK(detect_overload(h, 100, 3, OverloadPredicate::kLiteral));
  // Mean 20 against 3 x latest (30).
  CHECK_FALSE(detect_overload(h, 100, 3, OverloadPredicate::kMeanAboveAlphaTimesLatest));
  const std::vector<double> spike_then_low = {300, 300, 3};
  CHECK(detect_overload(spike_then_low, 100, 3, OverloadPredicate::kMeanAboveAlphaTimesLatest));

  OverloadPredicate p{};
  CHECK(parse_overload_predicate("momentary", p));
  CHECK(p == OverloadPredicate::kMeanAboveAlphaTimesLatest);
  CHECK_FALSE(parse_overload_predicate("nonsense", p));
  CHECK(to_string(OverloadPredicate::kMeanAboveThresholdPlusSpread) == "mean_std");
}

TEST_CASE("completion below the threshold grows the window by one") {
  auto c = at(4, 8, 1);
  c.on_transaction_complete(10);
  CHECK(c.window() == doctest::Approx(5));
  CHECK(c.active_count() == 0);
}

TEST_CASE("completion at or above the threshold grows the window by 1/window") {
  auto c = at(10, 8, 1);
  c.on_transaction_complete(10);
  CHECK(c.window() == doctest::Approx(10.1));
}

TEST_CASE("detected overload resets the window and halves win_th") {
  WindowControllerParams p;
  p.z_th_ms = 100;
  auto c = at(8, 4, 1, p);
  c.on_transaction_complete(500);
  CHECK(c.window() == 1.0);
  CHECK(c.win_th() == doctest::Approx(4));
  CHECK(c.backoffs() == 1);
}

TEST_CASE("timeouts back off like overload") {
  auto c = at(6, 10, 2);
  c.on_transaction_timeout();
  CHECK(c.window() == 1.0);
  CHECK(c.win_th() == doctest::Approx(3));
  CHECK(c.active_count() == 1);

  auto d = at(1, 10, 1);
  d.on_transaction_timeout();
  CHECK(d.win_th() == 1.0);
}

TEST_CASE("completions without active transactions are contract violations") {
  WindowController c;
  CHECK_THROWS_AS(c.on_transaction_complete(1), std::logic_error);
  CHECK_THROWS_AS(c.on_transaction_timeout(), std::logic_error);
}

TEST_CASE("delay history keeps the newest K entries in order") {
  WindowControllerParams p;
  p.history_size = 3;
  p.z_th_ms = 1e9;
  WindowController c(p);
  for (int i = 1; i <= 5; ++i) {
    REQUIRE(c.on_call_arrival() == Admission::kAdmit);
    c.on_transaction_complete(i);
  }
  CHECK(c.delay_history() == std::vector<double>{3, 4, 5});
}

TEST_CASE("growth trace from window 1 with win_th 8") {
  WindowControllerParams p;
  p.initial_window = 1;
  p.initial_win_th = 8;
  p.z_th_ms = 1e12;  // detection effectively off
  WindowController c(p);
  double w = 1.0;
  for (int i = 0; i < 10; ++i) {
    REQUIRE(c.on_call_arrival() == Admission::kAdmit);
    c.on_transaction_complete(1.0);
    w = w < 8 ? w + 1 : w + 1 / w;
    CHECK(c.window() == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK(c.window() == doctest::Approx(8.125 + 1 / 8.125 + 1 / (8.125 + 1 / 8.125)));
}
