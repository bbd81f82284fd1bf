#include "upright/costs/costs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "upright/physics/kinematics.hpp"

namespace upright {

double logisticKernel(double e, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("kernel sensitivity must be > 0");
  const double x = alpha * std::abs(e);
  // -1/(e^x + 2 + e^-x) = -s/(1+s)^2 with s = e^-x, which never overflows
  const double s = std::exp(-x);
  const double onePlus = 1.0 + s;
  double k = -s / (onePlus * onePlus);
  if (k == 0.0) k = -std::numeric_limits<double>::denorm_min();
  return k;
}

double angleDiff(double a, double b) {
  const double d = std::abs(std::remainder(a - b, 2.0 * M_PI));
  return d;
}

void CostWeights::validate() const {
  const double all[] = {kOmega, kV, kO, kH, kJp, kA, kBi, kBs,
                        kCin, kAd, kJslim, kTau, kPw, kFc, kFs};
  for (double k : all) {
    if (!(k >= 0.0)) throw std::invalid_argument("cost weights must be >= 0");
  }
  if (!(alphaA > 0.0) || !(alphaL > 0.0))
    throw std::invalid_argument("kernel sensitivities must be > 0");
}

CostTermValues evalCostTerms(const RobotModel& model, const SimState& state,
                             const ContactReport& report, const VecX& tau,
                             const VecX& jointAccels, const VecX& prevAction,
                             const VecX& action, const CostTargets& targets,
                             const CostWeights& weights) {
  CostTermValues t;

  t.cOmega = logisticKernel(std::abs(state.u[2] - targets.omega), weights.alphaA);
  const Vec2 v(state.u[0], state.u[1]);
  t.cV = logisticKernel((v - targets.v).cwiseAbs().sum(), weights.alphaL);
  t.cH = state.q[1] < 0.35 ? 1.0 : 0.0;

  for (int j = 0; j < kNumJoints; ++j)
    t.cJp += angleDiff(state.q[3 + j], targets.joints[j]);

  t.cO = (Vec2(0.0, -1.0) - gravityVector(state.q)).norm();
  t.cTau = tau.squaredNorm();

  for (int j = 0; j < kNumJoints; ++j)
    t.cPw += std::max(state.u[3 + j] * tau[j], 0.0);

  t.cA = jointAccels.squaredNorm();

  const double limit = model.jointSpeedLimit;
  for (int j = 0; j < kNumJoints; ++j) {
    const double excess =
        weights.jointSpeedLiteralForm
            ? std::max(limit - std::abs(state.q[3 + j]), 0.0)
            : std::max(std::abs(state.u[3 + j]) - limit, 0.0);
    t.cJs += excess * excess;
  }

  const int nExternal = static_cast<int>(report.external.size());
  const int nFeet = static_cast<int>(report.feet.size());
  if (nExternal > nFeet) {
    double sum = 0.0;
    for (int idx : report.external) {
      const ContactPoint& c = report.contacts[idx];
      if (c.kind != ContactKind::Foot) sum += c.impulseWorld().norm();
    }
    t.cBi = sum / (nExternal - nFeet);
  }

  if (nExternal > 0) {
    double sum = 0.0;
    for (int idx : report.external)
      sum += report.contacts[idx].pointVelocity.squaredNorm();
    t.cBs = sum / nExternal;
  }

  for (int leg = 0; leg < kNumLegs; ++leg) {
    bool grounded = false;
    const int shank = leg == 0 ? kShankF : kShankH;
    for (int idx : report.feet)
      if (report.contacts[idx].body == shank) grounded = true;
    const double speed = report.footVel[leg].norm();
    if (grounded) {
      t.cFs += speed;
    } else if (report.footGap[leg] > 0.0) {
      const double clearance = report.footPos[leg].y() - 0.07;
      t.cFc += clearance * clearance * speed;
    }
  }

  t.cCin = static_cast<double>(report.internal.size());
  t.cAd = (prevAction - action).squaredNorm();
  return t;
}

CurriculumState advanceCurriculum(const CurriculumState& cur) {
  CurriculumState next;
  next.iteration = cur.iteration + 1;
  next.kC = std::pow(0.3, std::pow(0.997, next.iteration));
  return next;
}

double compositeCost(BehaviorId behavior, const CostTermValues& t,
                     const CostWeights& w, double kC) {
  // every behavior regularizes action difference, joint speed, and torque;
  // the remaining regularizers differ per behavior
  const double common =
      w.kAd * t.cAd + w.kJslim * t.cJs + w.kTau * t.cTau;
  switch (behavior) {
    case BehaviorId::SelfRight:
      return w.kO * t.cO + w.kJp * t.cJp + w.kBi * t.cBi + w.kBs * t.cBs +
             w.kCin * t.cCin + kC * (w.kA * t.cA + common);
    case BehaviorId::StandUp:
      return w.kJp * t.cJp + w.kO * t.cO + w.kH * t.cH +
             kC * (w.kA * t.cA + common);
    case BehaviorId::Locomotion:
      return w.kOmega * t.cOmega + w.kV * t.cV + w.kO * t.cO + w.kFc * t.cFc +
             w.kFs * t.cFs + kC * common;
    case BehaviorId::Selector:
      return w.kOmega * t.cOmega + w.kV * t.cV + w.kO * t.cO + w.kH * t.cH +
             kC * (w.kPw * t.cPw + common);
  }
  return 0.0;
}

}  // namespace upright
