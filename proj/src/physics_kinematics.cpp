#include "upright/physics/kinematics.hpp"

#include <stdexcept>

namespace upright {

Kinematics forwardKinematics(const RobotModel& model, const VecX& q) {
  if (q.size() != kDof) throw std::invalid_argument("q dimension mismatch");
  Kinematics k;
  const Vec2 base(q[0], q[1]);
  const double pitch = q[2];
  const Eigen::Matrix2d R = rot(pitch);

  k.frames[kBase] = {base, pitch, base + R * model.baseCom};
  k.baseHeight = q[1];

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const double hipAngle = q[3 + 2 * leg];
    const double kneeAngle = q[4 + 2 * leg];
    const Vec2 hip = base + R * model.hipOffset[leg];
    const double a1 = pitch + hipAngle;
    const double a2 = a1 + kneeAngle;
    const Vec2 knee = hip + model.thigh.length * linkDir(a1);
    const Vec2 foot = knee + model.shank.length * linkDir(a2);

    const int thighBody = (leg == 0) ? kThighF : kThighH;
    const int shankBody = (leg == 0) ? kShankF : kShankH;
    k.frames[thighBody] = {hip, a1, hip + model.thigh.comOffset * linkDir(a1)};
    k.frames[shankBody] = {knee, a2,
                           knee + model.shank.comOffset * linkDir(a2)};
    k.hip[leg] = hip;
    k.knee[leg] = knee;
    k.foot[leg] = foot;
  }
  return k;
}

Vec2 gravityVector(const VecX& q) {
  const double pitch = q[2];
  return Vec2(-std::sin(pitch), -std::cos(pitch));
}

BodyJacobians computeBodyJacobians(const RobotModel& model, const VecX& q,
                                   const VecX& u) {
  BodyJacobians out;
  const Vec2 base(q[0], q[1]);
  const double pitch = q[2];
  const double pitchRate = u[2];
  const Eigen::Matrix2d R = rot(pitch);

  for (int b = 0; b < kNumBodies; ++b) {
    out.Jv[b].setZero();
    out.Jw[b].setZero();
    out.Jv[b](0, 0) = 1.0;
    out.Jv[b](1, 1) = 1.0;
    out.Jw[b](0, 2) = 1.0;
    out.biasAcc[b].setZero();
  }

  // base
  const Vec2 rc = R * model.baseCom;
  out.com[kBase] = base + rc;
  out.omega[kBase] = pitchRate;
  out.Jv[kBase].col(2) = perp(rc);
  out.biasAcc[kBase] = -pitchRate * pitchRate * rc;

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const int hipIdx = 3 + 2 * leg;
    const int kneeIdx = 4 + 2 * leg;
    const double a1 = pitch + q[hipIdx];
    const double a2 = a1 + q[kneeIdx];
    const double a1Rate = pitchRate + u[hipIdx];
    const double a2Rate = a1Rate + u[kneeIdx];
    const Vec2 rs = R * model.hipOffset[leg];
    const Vec2 d1 = linkDir(a1);
    const Vec2 d2 = linkDir(a2);

    const int thighBody = (leg == 0) ? kThighF : kThighH;
    const int shankBody = (leg == 0) ? kShankF : kShankH;

    // thigh COM = base + rs + c1*d1
    const double c1 = model.thigh.comOffset;
    out.com[thighBody] = base + rs + c1 * d1;
    out.omega[thighBody] = a1Rate;
    out.Jv[thighBody].col(2) = perp(rs) + c1 * perp(d1);
    out.Jv[thighBody].col(hipIdx) = c1 * perp(d1);
    out.Jw[thighBody](0, hipIdx) = 1.0;
    out.biasAcc[thighBody] =
        -pitchRate * pitchRate * rs - a1Rate * a1Rate * c1 * d1;

    // shank COM = base + rs + L1*d1 + c2*d2
    const double L1 = model.thigh.length;
    const double c2 = model.shank.comOffset;
    out.com[shankBody] = base + rs + L1 * d1 + c2 * d2;
    out.omega[shankBody] = a2Rate;
    out.Jv[shankBody].col(2) = perp(rs) + L1 * perp(d1) + c2 * perp(d2);
    out.Jv[shankBody].col(hipIdx) = L1 * perp(d1) + c2 * perp(d2);
    out.Jv[shankBody].col(kneeIdx) = c2 * perp(d2);
    out.Jw[shankBody](0, hipIdx) = 1.0;
    out.Jw[shankBody](0, kneeIdx) = 1.0;
    out.biasAcc[shankBody] = -pitchRate * pitchRate * rs -
                             a1Rate * a1Rate * L1 * d1 -
                             a2Rate * a2Rate * c2 * d2;
  }
  return out;
}

Eigen::Matrix<double, 2, kDof> pointJacobian(const BodyJacobians& jac, int body,
                                             const Vec2& p) {
  const Vec2 r = perp(p - jac.com[body]);
  return jac.Jv[body] + r * jac.Jw[body];
}

Vec2 pointVelocity(const BodyJacobians& jac, int body, const Vec2& p,
                   const VecX& u) {
  return pointJacobian(jac, body, p) * u;
}

}  // namespace upright
