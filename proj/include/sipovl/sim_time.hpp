#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace sipovl {

// Virtual time since the start of a run. Integer microseconds keep event
// ordering exact; reports convert to milliseconds.
using SimTime = std::chrono::microseconds;

inline double to_ms(SimTime t) { return static_cast<double>(t.count()) / 1000.0; }
inline double to_seconds(SimTime t) { return static_cast<double>(t.count()) / 1e6; }

inline SimTime from_ms(double ms) { return SimTime{std::llround(ms * 1000.0)}; }
inline SimTime from_seconds(double s) { return SimTime{std::llround(s * 1e6)}; }

}  // namespace sipovl
