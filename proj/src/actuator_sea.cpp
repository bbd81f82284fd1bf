#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upright/actuator/sea.hpp"

namespace upright {

void SeaParams::validate() const {
  const bool ok = kp > 0.0 && kd > 0.0 && springStiffness > 0.0 &&
                  gearRatio > 0.0 && torqueLimit > 0.0 &&
                  motorSpeedLimit > 0.0 && deratingSlope > 0.0 && lagTime > 0.0;
  if (!ok) throw std::invalid_argument("SeaParams: all fields must be > 0");
}

double SeaParams::availableTorque(double jointVel) const {
  const double motorSpeed = std::abs(jointVel) * gearRatio;
  const double excess = std::max(motorSpeed - 0.5 * motorSpeedLimit, 0.0);
  return std::clamp(torqueLimit - deratingSlope * excess, 0.0, torqueLimit);
}

double seaTorque(const SeaParams& params, double target, double jointPos,
                 double jointVel, SeaState& state) {
  const double command =
      params.kp * (target - jointPos) - params.kd * jointVel;
  // implicit-Euler lag update, stable for any time constant
  const double alpha = kActuatorDt / (params.effectiveLag() + kActuatorDt);
  state.laggedTorque += alpha * (command - state.laggedTorque);
  const double available = params.availableTorque(jointVel);
  return std::clamp(state.laggedTorque, -available, available);
}

void JointHistory::fill(double error, double velocity) {
  errors_.fill(error);
  velocities_.fill(velocity);
  head_ = 0;
}

void JointHistory::push(double error, double velocity) {
  head_ = (head_ + 1) % kDepth;
  errors_[head_] = error;
  velocities_[head_] = velocity;
}

double JointHistory::errorAgo(int ticks) const {
  if (ticks < 0 || ticks >= kDepth) {
    throw std::invalid_argument("history tap out of range");
  }
  return errors_[(head_ - ticks + kDepth) % kDepth];
}

double JointHistory::velocityAgo(int ticks) const {
  if (ticks < 0 || ticks >= kDepth) {
    throw std::invalid_argument("history tap out of range");
  }
  return velocities_[(head_ - ticks + kDepth) % kDepth];
}

VecX actuatorFeatures(double target, const JointHistory& history) {
  VecX features(kActuatorFeatureDim);
  features(0) = target;
  const int taps = static_cast<int>(kActuatorTaps.size());
  for (int i = 0; i < taps; ++i) {
    features(1 + i) = history.errorAgo(kActuatorTaps[i]);
    features(1 + taps + i) = history.velocityAgo(kActuatorTaps[i]);
  }
  return features;
}

}  // namespace upright
