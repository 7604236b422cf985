#pragma once

#include <boxworld/errors.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace boxworld {

struct Budget {
  /// Cap on intermediate rays held by the double description method.
  std::uint64_t max_rays = 2'000'000;
  /// Cap on search nodes visited by the enumeration routines.
  std::uint64_t max_nodes = 2'000'000'000;
  std::optional<double> max_seconds;
};

/// Tracks consumption against a Budget. Not thread-safe; one meter per run.
class BudgetMeter {
 public:
  BudgetMeter() : BudgetMeter(Budget{}) {}
  explicit BudgetMeter(Budget budget)
      : budget_(budget), start_(std::chrono::steady_clock::now()) {}

  const Budget& budget() const { return budget_; }
  std::uint64_t nodes() const { return nodes_; }

  void count_nodes(std::uint64_t n = 1) {
    nodes_ += n;
    if (nodes_ > budget_.max_nodes)
      throw ResourceBudgetExceeded("search node budget of " + std::to_string(budget_.max_nodes) +
                                   " exceeded");
    if (budget_.max_seconds && (nodes_ & 0xfff) == 0) check_clock();
  }

  void check_rays(std::uint64_t live_rays) {
    if (live_rays > budget_.max_rays)
      throw ResourceBudgetExceeded("ray budget of " + std::to_string(budget_.max_rays) +
                                   " exceeded");
    if (budget_.max_seconds) check_clock();
  }

  void check_clock() const {
    if (!budget_.max_seconds) return;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    if (elapsed.count() > *budget_.max_seconds)
      throw ResourceBudgetExceeded("wall-clock budget exceeded");
  }

 private:
  Budget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
};

}  // namespace boxworld
