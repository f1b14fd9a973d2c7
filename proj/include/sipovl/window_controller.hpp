#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sipovl {

// Which reading of the overload test to apply when a transaction completes.
enum class OverloadPredicate {
  // mean(history) > z_th + alpha * stddev(history). The default.
  kMeanAboveThresholdPlusSpread,
  // mean(history) < z_th + alpha * mean(history), the inequality exactly as
  // it is usually printed. With alpha >= 1 it holds for any positive delay,
  // so the window never leaves 1. Kept for comparison runs only.
  kLiteral,
  // mean(history) > alpha * most recent delay.
  kMeanAboveAlphaTimesLatest,
};

std::string_view to_string(OverloadPredicate p);
bool parse_overload_predicate(std::string_view text, OverloadPredicate& out);

// `history` is ordered oldest to newest. Empty history never signals overload.
bool detect_overload(std::span<const double> history_ms, double z_th_ms, double alpha,
                     OverloadPredicate predicate = OverloadPredicate::kMeanAboveThresholdPlusSpread);

enum class Admission { kAdmit, kShed };

struct WindowControllerParams {
  double z_th_ms = 200.0;
  double alpha = 3.0;
  std::size_t history_size = 30;
  double initial_window = 1.0;
  double initial_win_th = 64.0;
  OverloadPredicate predicate = OverloadPredicate::kMeanAboveThresholdPlusSpread;
};

/// Feedback-free admission window kept by the upstream proxy.
///
/// The window bounds the number of admitted INVITE transactions still in
/// flight. Each completion feeds its locally measured delay into a bounded
/// history; if the history indicates overload the window collapses to 1 and
/// the growth threshold is halved, otherwise the window grows by 1 below the
/// threshold and by 1/window above it.
///
/// Nothing the downstream proxy says is interpreted: a 503 from downstream is
/// just a completion with a delay.
class WindowController {
 public:
  explicit WindowController(WindowControllerParams params = {});

  Admission on_call_arrival();
  void on_transaction_complete(double delay_ms);
  // A transaction that never completed. Frees its slot and backs off as if
  // overload had been detected.
  void on_transaction_timeout();

  double window() const { return window_; }
  double win_th() const { return win_th_; }
  std::size_t active_count() const { return active_; }
  const WindowControllerParams& params() const { return params_; }

  // Oldest to newest.
  std::vector<double> delay_history() const;
  std::size_t backoffs() const { return backoffs_; }

  // Test hook for driving the state directly.
  void force_state(double window, double win_th, std::size_t active);

 private:
  void back_off();
  void push_delay(double delay_ms);

  WindowControllerParams params_;
  double window_;
  double win_th_;
  std::size_t active_ = 0;
  std::size_t backoffs_ = 0;
  std::vector<double> ring_;
  std::size_t ring_head_ = 0;
  std::size_t ring_count_ = 0;
};

}  // namespace sipovl
