#pragma once

#include <vector>

#include "upright/physics/kinematics.hpp"
#include "upright/physics/model.hpp"

namespace upright {

/// Unresolved contact candidate fed to the impulse solver.
struct ContactCandidate {
  int body = 0;
  int bodyOther = -1;  ///< -1 for ground
  Vec2 point = Vec2::Zero();
  Vec2 normal = Vec2::Zero();  ///< separating direction for `body`
  double gap = 0.0;
  ContactKind kind = ContactKind::Body;
};

/// Ground-plane candidates: base box corners plus both capsule end circles of
/// every link. The shank's distal end is the foot.
std::vector<ContactCandidate> groundCandidates(const RobotModel& model,
                                               const Kinematics& kin);

/// Capsule/capsule and capsule/base-box overlap between non-adjacent links.
std::vector<ContactCandidate> selfCollisionCandidates(const RobotModel& model,
                                                      const Kinematics& kin);

/// Colliding non-adjacent body pairs at configuration q, one entry per
/// touching pair.
std::vector<std::pair<int, int>> detectSelfCollisions(const RobotModel& model,
                                                      const VecX& q);

}  // namespace upright
