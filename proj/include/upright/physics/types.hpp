#pragma once

#include <Eigen/Core>
#include <vector>

namespace upright {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Sagittal-plane generalized state.
///
///   q = [base x, base z, pitch, hipF, kneeF, hipH, kneeH]
///   u = [vx, vz, pitch rate, joint rates...]
///
/// Pitch is CCW-positive with x right and z up; a leg points straight down
/// when its cumulative angle (pitch + hip [+ knee]) is zero.
struct SimState {
  VecX q;
  VecX u;
  double time = 0.0;

  SimState() : q(VecX::Zero(7)), u(VecX::Zero(7)) {}

  bool finite() const { return q.allFinite() && u.allFinite(); }
};

constexpr int kNumJoints = 4;
constexpr int kNumLegs = 2;
constexpr int kDof = 3 + kNumJoints;

enum class ContactKind { Foot, Body, Self };

/// One resolved contact point from a solver pass.
struct ContactPoint {
  int body = 0;          ///< body index (0 base, 1/2 front thigh/shank, 3/4 hind)
  int bodyOther = -1;    ///< second body for self contacts, -1 for ground
  Vec2 point = Vec2::Zero();    ///< world position
  Vec2 normal = Vec2::Zero();   ///< contact normal (points away from `body`'s counterpart)
  double gap = 0.0;             ///< signed distance at detection time
  double impulseNormal = 0.0;   ///< N·s, >= 0 after the solve
  double impulseTangent = 0.0;  ///< N·s, |.| <= mu * normal
  Vec2 pointVelocity = Vec2::Zero();  ///< post-solve velocity of the contact point
  ContactKind kind = ContactKind::Body;

  Vec2 impulseWorld() const {
    Vec2 t(-normal.y(), normal.x());
    return impulseNormal * normal + impulseTangent * t;
  }
};

/// Result of one simulation step: resolved contacts plus per-foot kinematics
/// for every foot whether or not it touches the ground.
struct ContactReport {
  std::vector<ContactPoint> contacts;
  std::vector<int> external;  ///< indices into contacts: ground contacts (I_c)
  std::vector<int> feet;      ///< subset of external at foot points (I_c,f)
  std::vector<int> internal;  ///< self-collision contacts (I_c,in)

  Vec2 footPos[kNumLegs];   ///< world foot positions
  Vec2 footVel[kNumLegs];   ///< world foot velocities
  double footGap[kNumLegs]; ///< signed ground clearance of each foot surface

  bool solverConverged = true;

  ContactReport() {
    for (int i = 0; i < kNumLegs; ++i) {
      footPos[i].setZero();
      footVel[i].setZero();
      footGap[i] = 0.0;
    }
  }
};

}  // namespace upright
