#include <exception>
#include <stdexcept>

#include "upright/physics/kinematics.hpp"
#include "upright/runtime/deploy.hpp"

namespace upright {

namespace {

constexpr std::uint64_t kTrialSetupStream = 1000;
constexpr std::uint64_t kTrialDriftStream = 2000;

}  // namespace

void BenchmarkConfig::validate() const {
  if (fallTrials < 0 || kickTrials < 0)
    throw std::invalid_argument("trial counts must be >= 0");
  if (fallTrials + kickTrials < 1)
    throw std::invalid_argument("benchmark needs at least one trial");
  if (duration <= 0.0) throw std::invalid_argument("duration must be > 0");
  if (kickTrials > 0) {
    if (kickTime < 0.0 || kickTime >= duration)
      throw std::invalid_argument("kick time must fall inside the trial");
    if (kickImpulseLow < 0.0 || kickImpulseHigh < kickImpulseLow)
      throw std::invalid_argument("kick impulse range must be ordered and >= 0");
  }
  init.validate();
  thresholds.validate();
  sea.validate();
}

BenchmarkResult benchmarkRecovery(const DeploymentStack& stack,
                                  const RobotModel& model,
                                  const BenchmarkConfig& cfg) {
  stack.validate();
  cfg.validate();

  BenchmarkResult result;
  result.trials = cfg.fallTrials + cfg.kickTrials;
  result.outcomes.reserve(static_cast<std::size_t>(result.trials));
  double recoverySum = 0.0;

  for (int i = 0; i < result.trials; ++i) {
    const bool kickTrial = i >= cfg.fallTrials;
    Rng setup(streamSeed(cfg.seed, kTrialSetupStream + static_cast<std::uint64_t>(i)));

    DeploymentConfig run;
    run.duration = cfg.duration;
    run.velocityCommand = cfg.velocityCommand;
    run.seed = streamSeed(cfg.seed, kTrialDriftStream + static_cast<std::uint64_t>(i));
    run.sim = cfg.sim;
    run.sea = cfg.sea;
    if (kickTrial) {
      run.initialState.q = standingPose(model);
      run.initialState.u = VecX::Zero(kDof);
      const double magnitude =
          setup.uniform(cfg.kickImpulseLow, cfg.kickImpulseHigh);
      const double sign = setup.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      run.kickTime = cfg.kickTime;
      run.kickImpulse = Vec2(sign * magnitude, 0.0);
    } else {
      run.initialState =
          sampleInitialState(model, BehaviorId::SelfRight, cfg.init, setup);
    }

    TrialOutcome outcome;
    outcome.trial = i;
    outcome.kicked = kickTrial;
    outcome.initialState = run.initialState;
    try {
      const DeploymentTrace trace = runDeployment(stack, model, run);
      const double earliest = kickTrial ? cfg.kickTime : 0.0;
      const TraceEvaluation eval =
          evaluateTrace(trace, cfg.thresholds, earliest);
      outcome.success = eval.success;
      outcome.successTime = eval.successTime;
      if (eval.success)
        outcome.timeToRecovery =
            eval.successTime - (kickTrial ? cfg.kickTime : 0.0);
      outcome.finalHeight = trace.finalState.q[1];
      outcome.finalCo =
          (Vec2(0.0, -1.0) - gravityVector(trace.finalState.q)).norm();
    } catch (const std::exception& e) {
      outcome.note = e.what();
    }
    if (outcome.success) {
      ++result.successes;
      recoverySum += outcome.timeToRecovery;
    }
    result.outcomes.push_back(std::move(outcome));
  }

  result.successRate =
      static_cast<double>(result.successes) / static_cast<double>(result.trials);
  if (result.successes > 0)
    result.meanTimeToRecovery = recoverySum / result.successes;
  return result;
}

}  // namespace upright
