#pragma once

#include <vector>

#include "upright/common/behavior.hpp"
#include "upright/physics/model.hpp"

namespace upright {

/// Physics and actuation tick rate; every control rate divides it.
inline constexpr double kBaseRateHz = 400.0;

/// How a policy output turns into joint position targets.
enum class ActionMapping {
  NominalOffset,  ///< targets = k * output + standing configuration
  CurrentOffset,  ///< targets = k * output + current joint positions
};

/// Static description of one trainable controller: how often it acts, how its
/// outputs become joint targets, and the network shape that drives it.
struct BehaviorTask {
  BehaviorId id = BehaviorId::SelfRight;
  int substeps = 20;  ///< base-rate ticks per control step
  ActionMapping mapping = ActionMapping::CurrentOffset;
  double actionScale = 0.5;  ///< rad of target per unit of policy output
  std::vector<int> hiddenSizes{128, 128};

  double controlRate() const { return kBaseRateHz / substeps; }
};

/// Canonical task table: self-righting 20 Hz, standing up 100 Hz, locomotion
/// 200 Hz, selector 50 Hz. Locomotion offsets from the standing configuration,
/// the others from the current joint positions.
BehaviorTask behaviorTask(BehaviorId id);

/// Affine map from policy output to joint position targets, clamped to the
/// model's joint limit. Throws std::invalid_argument on dimension mismatch.
VecX mapAction(const BehaviorTask& task, const RobotModel& model,
               const VecX& output, const VecX& currentJoints);

}  // namespace upright
