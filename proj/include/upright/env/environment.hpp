#pragma once

#include <array>
#include <functional>
#include <optional>

#include "upright/actuator/actuator_net.hpp"
#include "upright/actuator/sea.hpp"
#include "upright/behaviors/task.hpp"
#include "upright/common/rng.hpp"
#include "upright/costs/costs.hpp"
#include "upright/env/init.hpp"
#include "upright/env/observation.hpp"
#include "upright/env/randomization.hpp"
#include "upright/nets/distributions.hpp"
#include "upright/physics/sim.hpp"

namespace upright {

struct EnvConfig {
  RandomizationConfig randomization{};
  InitStateConfig init{};
  SeaParams sea{};
  SimParams sim{};
  CostWeights weights{};

  double timeLimit = 6.0;      ///< s per episode
  double fallHeight = 0.25;    ///< m, locomotion failure threshold
  double fallPitch = 1.0;      ///< rad, locomotion failure threshold
  double fallDuration = 0.2;   ///< s the failure condition must persist
  double curriculumFactor = 0.3;
  bool observationNoise = true;

  void validate() const;  ///< throws std::invalid_argument on bad values
};

/// Cost weights per task. Values are a tuning surface, not a contract; the
/// orientation weight leads for self-righting so the base rights itself as
/// fast as possible.
CostWeights defaultWeights(BehaviorId task);

/// Weights plus the per-task episode time limit (6, 3, 8, and 10 s).
EnvConfig defaultEnvConfig(BehaviorId task);

/// One episode generator for a task: randomized model and settled start
/// state per reset, friction redrawn every control step, series-elastic or
/// learned actuation at the base rate, rewards from the true state, and
/// noisy observations drawn from a dedicated stream so measurement noise
/// never reaches the reward path.
///
/// A selector task nests the three behavior controllers: the chosen one
/// acts at its own rate inside the selector period, starting immediately
/// on a switch.
class Environment {
 public:
  struct StepResult {
    VecX observation;
    double reward = 0.0;
    bool done = false;       ///< episode over
    bool truncated = false;  ///< over by the time limit rather than failure
    CostTermValues terms{};
    double time = 0.0;
  };

  Environment(BehaviorId task, RobotModel nominal, EnvConfig config,
              uint64_t seed);

  /// Torque from the learned actuator instead of the analytic drive.
  void setActuatorNet(Mlp net);
  void useAnalyticDrive();

  /// Inner controllers, required before stepping a selector task.
  void setBehaviorPolicy(BehaviorId id, GaussianPolicy policy);

  /// Replaces the true base height in observations; receives the current
  /// noisy height-estimator input.
  void setHeightProvider(std::function<double(const VecX&)> provider);

  void setCurriculumFactor(double kc);
  void setVelocityCommand(double command);

  /// Base impulse (N*s) applied at the start of the next step.
  void queueImpulse(const Vec2& impulse);

  /// Testing hook: replace the true state in place. Histories and drive
  /// states are left alone.
  void overrideState(const SimState& state);

  VecX reset();
  StepResult step(const VecX& action);

  BehaviorId task() const { return task_; }
  int observationSize() const;
  int actionSize() const {
    return task_ == BehaviorId::Selector ? 1 : kNumJoints;
  }
  const SimState& state() const { return state_; }
  const RobotModel& episodeModel() const { return model_; }
  const ContactReport& contacts() const { return report_; }
  double time() const { return state_.time; }
  double velocityCommand() const { return command_; }
  double trueHeight() const { return state_.q[1]; }
  bool airborne() const { return report_.external.empty(); }
  /// Noisy estimator input captured at the latest observation build.
  const VecX& lastHeightObservation() const { return lastHeightObs_; }
  const std::array<JointHistory, kNumJoints>& histories() const {
    return hist_;
  }

 private:
  ObservationInputs inputsNow(const VecX& prevAction, int prevBehavior,
                              double height);
  double captureHeightObs();
  VecX policyObservation(BehaviorId behavior, const VecX& prevAction,
                         int prevBehavior);
  void substep(const PlanarSim& sim, const VecX& targets, VecX& tauSum,
               VecX& tauSqSum);
  CostTargets costTargets() const;
  StepResult finishStep(const VecX& prevCostAction, const VecX& costAction,
                        const VecX& tauSum, const VecX& tauSqSum,
                        const VecX& jointVelBefore, int substeps);
  StepResult primitiveStep(const VecX& action);
  StepResult selectorStep(const VecX& action);

  BehaviorId task_;
  RobotModel nominal_;
  EnvConfig cfg_;
  BehaviorTask taskInfo_;
  Rng rng_;       ///< model, start states, commands, friction
  Rng noiseRng_;  ///< observation noise only

  RobotModel model_;
  SimState state_;
  ContactReport report_;
  std::array<SeaState, kNumJoints> sea_{};
  std::array<JointHistory, kNumJoints> hist_{};

  Mlp actuatorNet_;
  bool useNet_ = false;
  std::array<std::optional<GaussianPolicy>, 3> policies_{};
  std::function<double(const VecX&)> heightProvider_;

  double kC_;
  double command_ = 0.0;
  long limitTicks_ = 0;
  long tick_ = 0;
  long fallTicks_ = 0;
  bool started_ = false;
  bool done_ = false;

  VecX prevAction_;         ///< last joint-space policy output applied
  VecX prevChoiceOneHot_;   ///< selector task: last choice as one-hot
  int prevBehavior_ = -1;
  int activeBehavior_ = -1;
  long behaviorPhase_ = 0;
  VecX currentTargets_;
  Vec2 pendingImpulse_ = Vec2::Zero();
  VecX lastHeightObs_;
};

}  // namespace upright
