#pragma once

#include "upright/common/behavior.hpp"
#include "upright/common/rng.hpp"
#include "upright/env/observation.hpp"
#include "upright/physics/model.hpp"

namespace upright {

/// Per-episode model jitter and per-observation measurement noise bounds.
/// All noise is uniform and additive; it touches observations only, never
/// the state the reward is computed from.
struct RandomizationConfig {
  double massFraction = 0.10;  ///< relative body mass jitter bound
  double comShift = 0.03;      ///< m, base COM offset bound per axis
  double shapeFraction = 0.05; ///< relative collision shape jitter bound
  double frictionLow = 0.8;
  double frictionHigh = 2.0;

  double noiseLinVel = 0.2;    ///< m/s on the base linear velocity
  double noiseAngVel = 0.25;   ///< rad/s on the pitch rate
  double noiseJointVel = 0.5;  ///< rad/s per joint
  double noiseJointPos = 0.05; ///< rad per joint
  double noiseHeight = 0.02;   ///< m on the measured base height
  double airborneFactor = 3.0; ///< scales linear-velocity and height noise
                               ///< while nothing touches the ground

  void validate() const;  ///< throws std::invalid_argument on bad bounds
};

/// Draw an episode model: body masses scaled by 1 + U(-massFraction,
/// +massFraction) with inertias following, base COM shifted per axis, base
/// box and link capsule shapes scaled, and an initial friction draw. Field
/// draw order is fixed, so equal seeds give equal models.
RobotModel randomizeModel(const RobotModel& nominal,
                          const RandomizationConfig& cfg, Rng& rng);

/// Ground friction coefficient, redrawn every control step.
double sampleFriction(const RandomizationConfig& cfg, Rng& rng);

/// Forward velocity command in m/s, uniform on [-1, 1].
double sampleVelocityCommand(Rng& rng);

/// Additive uniform noise on the measured blocks of a policy observation
/// (base velocity, pitch rate, joint positions, joint velocities). Airborne
/// scales the base-velocity amplitude. Blocks with zero amplitude pass
/// through bitwise unchanged.
VecX perturbObservation(BehaviorId behavior, const VecX& obs, bool airborne,
                        const RandomizationConfig& cfg, Rng& rng);

/// Same for the height-estimator input (joint positions and velocities).
VecX perturbHeightObservation(const VecX& obs, const RandomizationConfig& cfg,
                              Rng& rng);

}  // namespace upright
