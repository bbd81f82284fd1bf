#include "upright/behaviors/task.hpp"

#include <algorithm>
#include <stdexcept>

namespace upright {

BehaviorTask behaviorTask(BehaviorId id) {
  BehaviorTask t;
  t.id = id;
  switch (id) {
    case BehaviorId::SelfRight:
      t.substeps = 20;
      t.mapping = ActionMapping::CurrentOffset;
      t.hiddenSizes = {128, 128};
      break;
    case BehaviorId::StandUp:
      t.substeps = 4;
      t.mapping = ActionMapping::CurrentOffset;
      t.hiddenSizes = {128, 128};
      break;
    case BehaviorId::Locomotion:
      t.substeps = 2;
      t.mapping = ActionMapping::NominalOffset;
      t.hiddenSizes = {128, 256};
      break;
    case BehaviorId::Selector:
      t.substeps = 8;
      t.mapping = ActionMapping::NominalOffset;
      t.hiddenSizes = {128, 128};
      break;
  }
  return t;
}

VecX mapAction(const BehaviorTask& task, const RobotModel& model,
               const VecX& output, const VecX& currentJoints) {
  if (output.size() != kNumJoints)
    throw std::invalid_argument("mapAction: output dimension mismatch");
  if (currentJoints.size() != kNumJoints)
    throw std::invalid_argument("mapAction: joint dimension mismatch");

  VecX targets(kNumJoints);
  for (int j = 0; j < kNumJoints; ++j) {
    double offset = task.mapping == ActionMapping::NominalOffset
                        ? model.nominalJoints[j]
                        : currentJoints[j];
    targets[j] = std::clamp(task.actionScale * output[j] + offset,
                            -model.jointLimit, model.jointLimit);
  }
  return targets;
}

}  // namespace upright
