#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace matmap {

/// Accumulates wall-clock milliseconds per named pipeline stage.
class StageProfiler {
 public:
  using Clock = std::chrono::steady_clock;

  void add(const std::string& stage, double ms) {
    for (auto& [name, total] : stages_) {
      if (name == stage) {
        total += ms;
        return;
      }
    }
    stages_.emplace_back(stage, ms);
  }

  template <typename Fn>
  auto time(const std::string& stage, Fn&& fn) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      add(stage, elapsed_ms(start));
    } else {
      auto result = fn();
      add(stage, elapsed_ms(start));
      return result;
    }
  }

  const std::vector<std::pair<std::string, double>>& stages() const { return stages_; }

  double total() const {
    double sum = 0.0;
    for (const auto& [name, ms] : stages_) sum += ms;
    return sum;
  }

  static double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }

 private:
  std::vector<std::pair<std::string, double>> stages_;
};

}  // namespace matmap
