#include "sipovl/window_controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sipovl {

std::string_view to_string(OverloadPredicate p) {
  switch (p) {
    case OverloadPredicate::kMeanAboveThresholdPlusSpread: return "mean_std";
    case OverloadPredicate::kLiteral: return "literal";
    case OverloadPredicate::kMeanAboveAlphaTimesLatest: return "momentary";
  }
  return "?";
}

bool parse_overload_predicate(std::string_view text, OverloadPredicate& out) {
  for (auto p : {OverloadPredicate::kMeanAboveThresholdPlusSpread, OverloadPredicate::kLiteral,
                 OverloadPredicate::kMeanAboveAlphaTimesLatest}) {
    if (text == to_string(p)) {
      out = p;
      return true;
    }
  }
  return false;
}

bool detect_overload(std::span<const double> history_ms, double z_th_ms, double alpha,
                     OverloadPredicate predicate) {
  if (history_ms.empty()) return false;
  // Welford; population variance.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : history_ms) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  const double stddev = std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));

  switch (predicate) {
    case OverloadPredicate::kMeanAboveThresholdPlusSpread:
      return mean > z_th_ms + alpha * stddev;
    case OverloadPredicate::kLiteral:
      return mean < z_th_ms + alpha * mean;
    case OverloadPredicate::kMeanAboveAlphaTimesLatest:
      return mean > alpha * history_ms.back();
  }
  return false;
}

WindowController::WindowController(WindowControllerParams params)
    : params_(params),
      window_(std::max(1.0, params.initial_window)),
      win_th_(std::max(1.0, params.initial_win_th)),
      ring_(std::max<std::size_t>(1, params.history_size), 0.0) {}

Admission WindowController::on_call_arrival() {
  const auto capacity = static_cast<std::size_t>(std::floor(window_));
  if (active_ >= capacity) return Admission::kShed;
  ++active_;
  if (active_ > capacity) throw std::logic_error("window invariant broken: active > floor(window)");
  return Admission::kAdmit;
}

void WindowController::push_delay(double delay_ms) {
  ring_[(ring_head_ + ring_count_) % ring_.size()] = delay_ms;
  if (ring_count_ < ring_.size()) {
    ++ring_count_;
  } else {
    ring_head_ = (ring_head_ + 1) % ring_.size();
  }
}

std::vector<double> WindowController::delay_history() const {
  std::vector<double> out;
  out.reserve(ring_count_);
  for (std::size_t i = 0; i < ring_count_; ++i) out.push_back(ring_[(ring_head_ + i) % ring_.size()]);
  return out;
}

void WindowController::back_off() {
  win_th_ = std::max(1.0, window_ / 2.0);
  window_ = 1.0;
  ++backoffs_;
}

void WindowController::on_transaction_complete(double delay_ms) {
  if (active_ == 0) throw std::logic_error("transaction completed with no active transactions");
  --active_;
  push_delay(delay_ms);
  const auto history = delay_history();
  if (detect_overload(history, params_.z_th_ms, params_.alpha, params_.predicate)) {
    back_off();
  } else if (window_ < win_th_) {
    window_ += 1.0;
  } else {
    window_ += 1.0 / window_;
  }
}

void WindowController::on_transaction_timeout() {
  if (active_ == 0) throw std::logic_error("transaction timed out with no active transactions");
  --active_;
  back_off();
}

void WindowController::force_state(double window, double win_th, std::size_t active) {
  window_ = std::max(1.0, window);
  win_th_ = std::max(1.0, win_th);
  active_ = active;
}

}  // namespace sipovl
