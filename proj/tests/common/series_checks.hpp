#pragma once

// Synthetic series for lead-lag recovery, shared by unit and acceptance tests.

#include <chrono>
#include <cstdint>
#include <vector>

#include "infodemic/analytics.hpp"
#include "infodemic/random.hpp"

namespace seriescheck {

inline infodemic::Date month(int index) {
  using namespace std::chrono;
  return year_month_day{year{2019} / January / 1} + months{index};
}

struct Pair {
  infodemic::TimeSeries a;
  infodemic::TimeSeries b;
};

// `length` monthly points of a Gaussian random walk `a`, and `b` equal to `a`
// delayed by k months (b(t) = a(t - k)), both cut from one longer walk so
// every month has a value.
inline Pair shifted_walk(int k, int length, std::uint64_t seed) {
  constexpr int kPad = 12;
  infodemic::Rng rng(seed);
  std::vector<double> walk(static_cast<std::size_t>(length + 2 * kPad));
  double x = 0;
  for (auto& w : walk) {
    x += rng.normal();
    w = x;
  }
  Pair p;
  p.a.label = "a";
  p.b.label = "b";
  for (int t = 0; t < length; ++t) {
    p.a.points.emplace_back(month(t), walk[static_cast<std::size_t>(kPad + t)]);
    p.b.points.emplace_back(month(t), walk[static_cast<std::size_t>(kPad + t - k)]);
  }
  return p;
}

}  // namespace seriescheck
