#pragma once

#include "upright/behaviors/task.hpp"
#include "upright/env/environment.hpp"
#include "upright/nets/distributions.hpp"

namespace upright {

/// Success criteria for deterministic policy rollouts. uprightCo bounds the
/// gravity-direction distance cO, which equals 2 sin(|pitch| / 2) on the
/// plane, so the default 0.3 admits roughly 17 degrees of lean.
struct BehaviorEvalThresholds {
  double uprightCo = 0.3;
  double sittingJointTol = 0.6;  ///< mean joint angle to sitting, self-right
  double heightBandLow = 0.45;   ///< stand-up terminal base height band
  double heightBandHigh = 0.6;
  double velocityTol = 0.25;     ///< mean |vx - command| over the scored tail
  double scoreFraction = 0.25;   ///< trailing fraction of the episode scored

  void validate() const;  ///< throws std::invalid_argument on bad values
};

struct BehaviorEvalMetrics {
  double successRate = 0.0;
  double meanTerminalCo = 0.0;
  /// Locomotion: tail-mean velocity error. Others: mean terminal joint angle
  /// to the behavior's goal posture (sitting or standing).
  double meanTrackingError = 0.0;
  /// First control time with cO below uprightCo, the episode time limit when
  /// the base never comes upright.
  double meanTimeToUpright = 0.0;
  int episodes = 0;
};

/// Rolls out the policy mean over fresh episodes and scores each against the
/// behavior's goal: self-right must end upright near the sitting posture,
/// stand-up upright inside the height band, locomotion must survive to the
/// time limit while tracking the commanded velocity. Deterministic per seed.
BehaviorEvalMetrics evaluateBehavior(const GaussianPolicy& policy,
                                     BehaviorId task, const RobotModel& model,
                                     const EnvConfig& env, int episodes,
                                     uint64_t seed,
                                     const BehaviorEvalThresholds& thresholds = {});

}  // namespace upright
