#include "upright/env/init.hpp"

#include <cmath>
#include <stdexcept>

namespace upright {

namespace {

void requirePositive(double v, const char* name) {
  if (!(v > 0.0))
    throw std::invalid_argument(std::string("InitStateConfig: ") + name +
                                " must be positive");
}

/// Run a damped passive drop and hand back a fresh episode state.
SimState settle(const RobotModel& model, SimState state, double duration,
                double damping) {
  PlanarSim sim(model);
  int steps = static_cast<int>(std::lround(duration / sim.params().dt));
  VecX tau(kNumJoints);
  for (int k = 0; k < steps; ++k) {
    for (int j = 0; j < kNumJoints; ++j) tau[j] = -damping * state.u[3 + j];
    sim.step(state, tau);
  }
  state.q[0] = 0.0;
  state.u.setZero();
  state.time = 0.0;
  return state;
}

SimState selfRightInit(const RobotModel& model, const InitStateConfig& cfg,
                       Rng& rng) {
  return settle(model, preDropState(cfg, rng), cfg.settleTime,
                cfg.settleDamping);
}

SimState standUpInit(const RobotModel& model, const InitStateConfig& cfg,
                     Rng& rng) {
  SimState s;
  s.q[2] = rng.uniform(-cfg.standUpPitchRange, cfg.standUpPitchRange);
  std::array<double, kNumJoints> joints;
  for (int j = 0; j < kNumJoints; ++j) {
    joints[j] = model.sittingJoints[j] +
                rng.uniform(-cfg.standUpJointRange, cfg.standUpJointRange);
    s.q[3 + j] = joints[j];
  }
  s.q[1] = groundedBaseHeight(model, joints) + 0.05;
  return settle(model, s, cfg.standUpSettleTime, cfg.settleDamping);
}

SimState locomotionInit(const RobotModel& model, const InitStateConfig& cfg,
                        Rng& rng) {
  SimState s;
  s.q = standingPose(model);
  if (cfg.baseSigma > 0.0) s.q[1] += rng.normal(0.0, cfg.baseSigma);
  if (cfg.pitchSigma > 0.0) s.q[2] += rng.normal(0.0, cfg.pitchSigma);
  if (cfg.jointSigma > 0.0)
    for (int j = 0; j < kNumJoints; ++j)
      s.q[3 + j] += rng.normal(0.0, cfg.jointSigma);
  return s;
}

}  // namespace

void InitStateConfig::validate() const {
  requirePositive(dropHeight, "dropHeight");
  requirePositive(dropJointRange, "dropJointRange");
  requirePositive(settleTime, "settleTime");
  if (!(settleDamping >= 0.0))
    throw std::invalid_argument("InitStateConfig: settleDamping must be >= 0");
  requirePositive(standUpPitchRange, "standUpPitchRange");
  requirePositive(standUpJointRange, "standUpJointRange");
  requirePositive(standUpSettleTime, "standUpSettleTime");
  if (!(jointSigma >= 0.0) || !(baseSigma >= 0.0) || !(pitchSigma >= 0.0))
    throw std::invalid_argument("InitStateConfig: sigmas must be >= 0");
}

SimState preDropState(const InitStateConfig& cfg, Rng& rng) {
  SimState s;
  s.q[1] = cfg.dropHeight;
  s.q[2] = rng.uniform(-M_PI, M_PI);
  for (int j = 0; j < kNumJoints; ++j)
    s.q[3 + j] = rng.uniform(-cfg.dropJointRange, cfg.dropJointRange);
  return s;
}

SimState sampleInitialState(const RobotModel& model, BehaviorId behavior,
                            const InitStateConfig& cfg, Rng& rng,
                            BehaviorId* componentOut) {
  cfg.validate();
  if (behavior == BehaviorId::Selector) {
    BehaviorId component = static_cast<BehaviorId>(rng.index(3));
    return sampleInitialState(model, component, cfg, rng, componentOut);
  }
  if (componentOut != nullptr) *componentOut = behavior;
  switch (behavior) {
    case BehaviorId::SelfRight:
      return selfRightInit(model, cfg, rng);
    case BehaviorId::StandUp:
      return standUpInit(model, cfg, rng);
    default:
      return locomotionInit(model, cfg, rng);
  }
}

}  // namespace upright
