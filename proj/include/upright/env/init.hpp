#pragma once

#include "upright/common/behavior.hpp"
#include "upright/common/rng.hpp"
#include "upright/physics/sim.hpp"

namespace upright {

/// Episode start distributions per task.
struct InitStateConfig {
  double dropHeight = 0.5;      ///< m, base height at fall release
  double dropJointRange = 2.0;  ///< rad, uniform joint angle bound at release
  double settleTime = 1.2;      ///< s of passive drop before the episode
  double settleDamping = 1.0;   ///< N*m*s/rad joint damping during the drop

  double standUpPitchRange = 0.4;  ///< rad around upright
  double standUpJointRange = 0.5;  ///< rad around the sitting configuration
  double standUpSettleTime = 0.5;  ///< s

  double jointSigma = 0.1;  ///< rad, locomotion start around standing
  double baseSigma = 0.02;  ///< m
  double pitchSigma = 0.05; ///< rad

  void validate() const;  ///< throws std::invalid_argument on bad values
};

/// Fall release state for the self-righting task: base at the drop height
/// with uniform random pitch and joint angles, at rest. Draw order is pitch
/// then joints.
SimState preDropState(const InitStateConfig& cfg, Rng& rng);

/// Draw an episode start for one task on an already randomized model.
/// Self-righting drops from preDropState and settles passively; standing up
/// starts near the sitting pose with a short settle; locomotion perturbs the
/// standing pose with Gaussian noise and no settle; the selector mixes the
/// three uniformly. The settled states are re-timed to zero with velocities
/// cleared and the base recentred at x = 0. componentOut, when given,
/// receives the task whose distribution produced the draw.
SimState sampleInitialState(const RobotModel& model, BehaviorId behavior,
                            const InitStateConfig& cfg, Rng& rng,
                            BehaviorId* componentOut = nullptr);

}  // namespace upright
