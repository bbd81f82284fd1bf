#pragma once

#include <cstdint>
#include <vector>

namespace upright {

/// Multi-rate dispatcher over one base-rate tick counter. Each task runs at
/// the base rate divided by its divisor; polling a due task books its next
/// slot one period ahead, so a task realigned to the current tick keeps its
/// phase relative to that tick from then on.
class RateScheduler {
 public:
  /// One divisor per task, all >= 1. Every task is due on tick zero.
  explicit RateScheduler(std::vector<int> divisors);

  int tasks() const { return static_cast<int>(divisors_.size()); }
  int divisor(int task) const;
  std::int64_t tick() const { return tick_; }

  /// True when the task is due on the current tick. A true result schedules
  /// the next due tick one divisor ahead, so call once per task per tick.
  bool poll(int task);

  /// Makes the task due on the current tick again, shifting its phase. Used
  /// when a behavior switch must produce output on the switch tick itself.
  void realign(int task);

  void advance() { ++tick_; }

 private:
  std::vector<int> divisors_;
  std::vector<std::int64_t> nextDue_;
  std::int64_t tick_ = 0;
};

}  // namespace upright
