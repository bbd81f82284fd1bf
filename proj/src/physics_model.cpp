#include "upright/physics/model.hpp"

#include <cmath>
#include <stdexcept>

#include "upright/physics/kinematics.hpp"

namespace upright {

void RobotModel::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("RobotModel: ") + what);
  };
  require(baseMass > 0 && thigh.mass > 0 && shank.mass > 0, "masses > 0");
  require(baseInertia > 0 && thigh.inertia > 0 && shank.inertia > 0,
          "inertias > 0");
  require(thigh.length > 0 && shank.length > 0, "link lengths > 0");
  require(baseHalfExtents.minCoeff() > 0, "base extents > 0");
  require(thigh.radius > 0 && shank.radius > 0 && footRadius > 0,
          "collision radii > 0");
  require(jointLimit > 0, "joint limits lower < upper");
  require(jointSpeedLimit > 0 && torqueLimit > 0, "limits > 0");
  require(friction >= 0, "friction >= 0");
}

double groundedBaseHeight(const RobotModel& model,
                          const std::array<double, kNumJoints>& joints) {
  VecX q = VecX::Zero(kDof);
  for (int j = 0; j < kNumJoints; ++j) q[3 + j] = joints[j];
  Kinematics k = forwardKinematics(model, q);
  double lowestFoot = std::min(k.foot[0].y(), k.foot[1].y());
  // foot surface rests on the ground when its center sits one radius up
  return model.footRadius - lowestFoot;
}

VecX standingPose(const RobotModel& model) {
  VecX q = VecX::Zero(kDof);
  q[1] = groundedBaseHeight(model, model.nominalJoints);
  for (int j = 0; j < kNumJoints; ++j) q[3 + j] = model.nominalJoints[j];
  return q;
}

VecX sittingPose(const RobotModel& model) {
  VecX q = VecX::Zero(kDof);
  q[1] = groundedBaseHeight(model, model.sittingJoints);
  for (int j = 0; j < kNumJoints; ++j) q[3 + j] = model.sittingJoints[j];
  return q;
}

}  // namespace upright
