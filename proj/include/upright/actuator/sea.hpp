#pragma once

#include <array>

#include "upright/physics/types.hpp"

namespace upright {

/// Inner-loop period of the actuator drive and its histories, 400 Hz. The
/// simulation integrates at the same rate so one physics step advances one
/// history slot.
constexpr double kActuatorDt = 1.0 / 400.0;

/// Lumped series-elastic-actuator drive. The PD command passes through a
/// first-order lag whose time constant grows with spring compliance, then
/// through a symmetric torque-speed derating curve. One joint, one state.
struct SeaParams {
  double kp = 50.0;              ///< position gain [N m / rad]
  double kd = 0.4;               ///< velocity gain [N m s / rad]
  double springStiffness = 500.0;  ///< spring rate between motor and joint [N m / rad]
  double gearRatio = 50.0;       ///< motor speed per joint speed
  double torqueLimit = 40.0;     ///< joint-side torque ceiling [N m]
  double motorSpeedLimit = 600.0;  ///< motor-side speed ceiling [rad / s]
  double deratingSlope = 0.2;    ///< torque lost per motor rad/s beyond half speed
  double lagTime = 0.01;         ///< motor current loop time constant [s]

  void validate() const;

  /// Command-to-torque lag: a softer spring stretches the response.
  double effectiveLag() const { return lagTime * (1.0 + kp / springStiffness); }

  /// Torque ceiling at the given joint speed. Full up to half the motor
  /// speed limit, then falls linearly to zero.
  double availableTorque(double jointVel) const;
};

/// Per-joint drive state, owned by the caller.
struct SeaState {
  double laggedTorque = 0.0;
};

/// One 400 Hz drive update: PD command, lag, derating, clamp. Deterministic
/// in (params, inputs, state).
double seaTorque(const SeaParams& params, double target, double jointPos,
                 double jointVel, SeaState& state);

/// Fixed-depth ring buffer of one joint's tracking error (position target
/// minus measured position) and velocity, sampled at 400 Hz. Covers 0.05 s.
class JointHistory {
 public:
  static constexpr int kDepth = 20;

  /// Seeds every slot, the prefill used when entering a control mode.
  void fill(double error, double velocity);
  void push(double error, double velocity);

  /// Sample from `ticks` updates ago; 0 is the most recent push.
  double errorAgo(int ticks) const;
  double velocityAgo(int ticks) const;

 private:
  std::array<double, kDepth> errors_{};
  std::array<double, kDepth> velocities_{};
  int head_ = 0;
};

/// History taps feeding the drive network: now, 0.01 s ago, 0.02 s ago.
constexpr std::array<int, 3> kActuatorTaps = {0, 4, 8};
constexpr int kActuatorFeatureDim = 1 + 2 * static_cast<int>(kActuatorTaps.size());

/// Network input layout: target, error taps, velocity taps.
VecX actuatorFeatures(double target, const JointHistory& history);

}  // namespace upright
