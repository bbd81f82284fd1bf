#pragma once

#include <array>
#include <cmath>
#include <string>

#include "upright/physics/types.hpp"

namespace upright {

/// Rigid bodies: 0 = base, then thigh/shank per leg.
enum BodyId { kBase = 0, kThighF = 1, kShankF = 2, kThighH = 3, kShankH = 4 };
constexpr int kNumBodies = 5;

struct LinkParams {
  double mass = 1.0;       ///< kg (left/right pair lumped)
  double inertia = 0.01;   ///< kg·m² about COM
  double comOffset = 0.1;  ///< m from proximal joint along the link
  double length = 0.2;     ///< m joint-to-joint (shank: joint-to-foot-center)
  double radius = 0.03;    ///< collision capsule radius
};

/// Planar quadruped surrogate. Two legs in the sagittal plane, each standing
/// in for a left/right pair, so masses and torque limits are pair-lumped.
struct RobotModel {
  // base
  double baseMass = 14.0;
  double baseInertia = 0.42;
  Vec2 baseCom = Vec2::Zero();      ///< COM offset in base frame
  Vec2 baseHalfExtents{0.28, 0.09}; ///< collision box half sizes
  Vec2 hipOffset[kNumLegs] = {Vec2(0.26, -0.02), Vec2(-0.26, -0.02)};

  LinkParams thigh{3.6, 0.015, 0.11, 0.22, 0.04};
  LinkParams shank{1.8, 0.013, 0.15, 0.26, 0.03};
  double footRadius = 0.03;

  double jointLimit = 2.5 * M_PI;      ///< symmetric soft position range [rad]
  double jointSpeedLimit = 12.0;       ///< rad/s, Table-style maximum joint speed
  double torqueLimit = 40.0;           ///< N·m per lumped joint
  double gravity = 9.81;
  double friction = 1.0;               ///< ground Coulomb coefficient

  std::array<double, kNumJoints> nominalJoints{0.4, -0.8, -0.4, 0.8};
  std::array<double, kNumJoints> sittingJoints{0.9, -1.9, -0.9, 1.9};

  void validate() const;  ///< throws std::invalid_argument on bad parameters

  const LinkParams& link(int body) const {
    return (body == kThighF || body == kThighH) ? thigh : shank;
  }
  /// Leg index (0 front, 1 hind) of a link body; base is not a leg.
  static int legOf(int body) { return body <= kShankF ? 0 : 1; }
  static bool isThigh(int body) { return body == kThighF || body == kThighH; }
  static bool isShank(int body) { return body == kShankF || body == kShankH; }
};

VecX standingPose(const RobotModel& model);
VecX sittingPose(const RobotModel& model);

/// Base height with all configured feet touching the ground at given joints.
double groundedBaseHeight(const RobotModel& model,
                          const std::array<double, kNumJoints>& joints);

}  // namespace upright
