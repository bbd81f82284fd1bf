#pragma once

#include <array>

#include "upright/actuator/sea.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// Joint-state history shared by the policies and the height estimator on
/// the deployed controller. Unlike the training environment, which seeds the
/// ring instantly at reset, the deployed buffer starts empty and refuses
/// queries until a full window of real samples has been pushed; the boot
/// freeze exists to feed it.
class HistoryBuffer {
 public:
  HistoryBuffer() { clear(); }

  /// Appends one base-rate sample per joint: tracking error (target minus
  /// measured position) and measured velocity.
  void push(const VecX& error, const VecX& velocity);

  bool filled() const { return count_ >= JointHistory::kDepth; }
  int count() const { return count_; }

  /// Throws std::logic_error until filled().
  const std::array<JointHistory, kNumJoints>& histories() const;

  /// Drive-side view of one joint's ring, usable from the first push. The
  /// drive feeds the buffer itself, so it cannot wait for the full window
  /// the policy-level consumers require; older taps read the cleared zeros
  /// until enough samples arrive.
  const JointHistory& joint(int j) const;

  void clear();

 private:
  std::array<JointHistory, kNumJoints> hist_;
  int count_ = 0;
};

}  // namespace upright
