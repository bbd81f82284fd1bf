#pragma once

#include "upright/physics/model.hpp"
#include "upright/physics/types.hpp"

namespace upright {

inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

inline Eigen::Matrix2d rot(double a) {
  double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

/// Unit vector along a link whose cumulative angle is `a` (zero = straight down).
inline Vec2 linkDir(double a) { return Vec2(std::sin(a), -std::cos(a)); }

struct LinkFrame {
  Vec2 origin = Vec2::Zero();  ///< proximal joint (base: base origin)
  double angle = 0.0;          ///< world angle of the link frame
  Vec2 com = Vec2::Zero();
};

struct Kinematics {
  LinkFrame frames[kNumBodies];
  Vec2 hip[kNumLegs];
  Vec2 knee[kNumLegs];
  Vec2 foot[kNumLegs];
  double baseHeight = 0.0;  ///< base origin above the ground plane
};

Kinematics forwardKinematics(const RobotModel& model, const VecX& q);

/// World-down direction expressed in the base frame. Unit norm; (0,-1) when
/// upright, (0,+1) upside-down, (-1,0) at pitch +pi/2.
Vec2 gravityVector(const VecX& q);

/// Per-body COM Jacobians and velocity-product accelerations, the inputs to
/// the mass matrix and bias assembly.
struct BodyJacobians {
  Eigen::Matrix<double, 2, kDof> Jv[kNumBodies];
  Eigen::Matrix<double, 1, kDof> Jw[kNumBodies];
  Vec2 biasAcc[kNumBodies];  ///< Jdot*u with zero generalized acceleration
  Vec2 com[kNumBodies];
  double omega[kNumBodies];  ///< world angular rate of each body
};

BodyJacobians computeBodyJacobians(const RobotModel& model, const VecX& q,
                                   const VecX& u);

/// Jacobian of a material point fixed on `body` at world position `p`.
Eigen::Matrix<double, 2, kDof> pointJacobian(const BodyJacobians& jac, int body,
                                             const Vec2& p);

Vec2 pointVelocity(const BodyJacobians& jac, int body, const Vec2& p,
                   const VecX& u);

}  // namespace upright
