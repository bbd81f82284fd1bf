#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "upright/actuator/sea.hpp"
#include "upright/common/behavior.hpp"
#include "upright/env/init.hpp"
#include "upright/nets/distributions.hpp"
#include "upright/nets/mlp.hpp"
#include "upright/physics/sim.hpp"
#include "upright/runtime/drift.hpp"
#include "upright/selector/fsm.hpp"
#include "upright/selector/selector.hpp"

namespace upright {

/// Wraps an angle into [-pi, pi). Joint positions pass through this before
/// entering any observation, so a joint that wound past a full turn during
/// self-righting still reads as a nearby posture; targets and drive torques
/// keep the unwrapped coordinate.
double wrapAngle(double angle);

/// Everything the deployed controller runs: the three behavior policies, an
/// arbiter (learned selector or the handcrafted rules), the height
/// estimator, and the drive model. An empty drive network selects the
/// analytic drive.
struct DeploymentStack {
  std::array<GaussianPolicy, 3> behaviors;
  CategoricalPolicy selector;
  FsmConfig fsm{};
  bool useFsm = false;
  Mlp heightEstimator;
  Mlp actuatorNet;
  DriftConfig drift{};

  void validate() const;  ///< throws std::invalid_argument on missing or
                          ///< misshapen pieces
};

struct DeploymentConfig {
  double duration = 10.0;        ///< s of closed-loop control after the boot
                                 ///< freeze
  double velocityCommand = 0.5;  ///< m/s forward command
  std::uint64_t seed = 1;        ///< drives the odometry drift draws
  SimState initialState;         ///< caller-provided start, e.g. a fall pose
  SimParams sim{};               ///< base step must match the actuator tick
  SeaParams sea{};
  double kickTime = -1.0;  ///< s after control start; negative disables
  Vec2 kickImpulse = Vec2::Zero();  ///< N*s on the base at the kick tick

  void validate() const;
};

/// One base-rate tick of the deployed loop, as logged to the trace.
struct DeploymentStep {
  std::int64_t tick = 0;
  double time = 0.0;  ///< s from control start; freeze ticks are negative
  bool freeze = false;
  BehaviorId behavior = BehaviorId::SelfRight;
  bool behaviorEvaluated = false;  ///< fresh policy output this tick
  bool selectorEvaluated = false;  ///< arbiter decision this tick
  SimState trueState;
  SimState estimatedState;
  double estimatedHeight = 0.0;  ///< NaN until the history window fills
  double co = 0.0;               ///< true-state gravity distance
  VecX probabilities = VecX::Zero(3);
  VecX jointTargets = VecX::Zero(kNumJoints);
  VecX torques = VecX::Zero(kNumJoints);
};

struct DeploymentTrace {
  double dt = 0.0;
  double velocityCommand = 0.0;
  int freezeTicks = 0;
  std::vector<DeploymentStep> steps;  ///< freeze ticks first, then control
  std::vector<SelectorDecision> decisions;
  std::vector<std::int64_t> switchTicks;
  SimState finalState;
};

/// Runs the full multi-rate control loop against the simulation: a
/// history-filling freeze at the initial posture, then per tick the drifting
/// odometry, the height estimate, the arbiter at 50 Hz, the active behavior
/// at its own rate (with fresh output on the switch tick itself), and the
/// drive at the base rate. Byte-identical per (stack, model, config).
DeploymentTrace runDeployment(const DeploymentStack& stack,
                              const RobotModel& model,
                              const DeploymentConfig& cfg);

/// One row per tick with true and estimated base states, the active
/// behavior, the arbiter distribution, targets, and torques.
void writeTraceCsv(const std::string& path, const DeploymentTrace& trace);

/// What counts as recovered: a sustained window that is upright, inside the
/// standing height band, and tracking the velocity command.
struct RecoveryThresholds {
  double uprightCo = 0.3;
  double heightLow = 0.45;
  double heightHigh = 0.6;
  double velocityTol = 0.25;  ///< m/s mean |vx - command| over the window
  double window = 1.0;        ///< s the posture conditions must hold

  void validate() const;
};

struct TraceEvaluation {
  bool success = false;
  double successTime = -1.0;  ///< start of the first qualifying window, s
};

/// Scans the control portion of a trace for the first window of `window`
/// seconds whose every tick is upright and inside the height band and whose
/// mean velocity error beats the tolerance. Windows starting before
/// earliestStart (s from control start) are ignored, which lets kick trials
/// demand recovery after the kick.
TraceEvaluation evaluateTrace(const DeploymentTrace& trace,
                              const RecoveryThresholds& thresholds,
                              double earliestStart = 0.0);

struct BenchmarkConfig {
  int fallTrials = 50;  ///< recoveries from settled random fall postures
  int kickTrials = 50;  ///< recoveries from a base impulse while walking
  double duration = 10.0;
  double velocityCommand = 0.5;
  std::uint64_t seed = 1;
  double kickTime = 1.0;        ///< s after control start
  double kickImpulseLow = 30.0;   ///< N*s magnitude range, sign randomized
  double kickImpulseHigh = 60.0;
  InitStateConfig init{};
  RecoveryThresholds thresholds{};
  SimParams sim{};
  SeaParams sea{};

  void validate() const;
};

struct TrialOutcome {
  int trial = 0;
  bool kicked = false;
  bool success = false;
  double successTime = -1.0;      ///< s from control start
  double timeToRecovery = -1.0;   ///< s from control start or from the kick
  double finalHeight = 0.0;
  double finalCo = 0.0;
  SimState initialState;
  std::string note;  ///< nonempty when the trial aborted
};

struct BenchmarkResult {
  int trials = 0;
  int successes = 0;
  double successRate = 0.0;
  double meanTimeToRecovery = -1.0;  ///< over successful trials, -1 if none
  std::vector<TrialOutcome> outcomes;
};

/// Runs the trial set against one stack. Trial setups (fall postures, kick
/// impulses) are drawn from per-trial streams of the benchmark seed and do
/// not depend on the stack, so runs with different stacks under the same
/// seed face identical trials.
BenchmarkResult benchmarkRecovery(const DeploymentStack& stack,
                                  const RobotModel& model,
                                  const BenchmarkConfig& cfg);

}  // namespace upright
