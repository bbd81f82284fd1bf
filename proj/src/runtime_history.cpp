#include "upright/runtime/history.hpp"

#include <stdexcept>

namespace upright {

void HistoryBuffer::push(const VecX& error, const VecX& velocity) {
  if (error.size() != kNumJoints || velocity.size() != kNumJoints)
    throw std::invalid_argument("history push needs one sample per joint");
  for (int j = 0; j < kNumJoints; ++j) hist_[j].push(error[j], velocity[j]);
  if (count_ < JointHistory::kDepth) ++count_;
}

const std::array<JointHistory, kNumJoints>& HistoryBuffer::histories() const {
  if (!filled())
    throw std::logic_error("joint history queried before a full window");
  return hist_;
}

const JointHistory& HistoryBuffer::joint(int j) const {
  if (j < 0 || j >= kNumJoints)
    throw std::invalid_argument("history joint index out of range");
  return hist_[j];
}

void HistoryBuffer::clear() {
  for (auto& h : hist_) h.fill(0.0, 0.0);
  count_ = 0;
}

}  // namespace upright
