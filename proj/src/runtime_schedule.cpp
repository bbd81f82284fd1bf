#include "upright/runtime/schedule.hpp"

#include <stdexcept>

namespace upright {

RateScheduler::RateScheduler(std::vector<int> divisors)
    : divisors_(std::move(divisors)) {
  if (divisors_.empty())
    throw std::invalid_argument("scheduler needs at least one task");
  for (int d : divisors_)
    if (d < 1) throw std::invalid_argument("scheduler divisor must be >= 1");
  nextDue_.assign(divisors_.size(), 0);
}

int RateScheduler::divisor(int task) const {
  if (task < 0 || task >= tasks())
    throw std::invalid_argument("scheduler task out of range");
  return divisors_[task];
}

bool RateScheduler::poll(int task) {
  if (task < 0 || task >= tasks())
    throw std::invalid_argument("scheduler task out of range");
  if (tick_ < nextDue_[task]) return false;
  nextDue_[task] = tick_ + divisors_[task];
  return true;
}

void RateScheduler::realign(int task) {
  if (task < 0 || task >= tasks())
    throw std::invalid_argument("scheduler task out of range");
  nextDue_[task] = tick_;
}

}  // namespace upright
