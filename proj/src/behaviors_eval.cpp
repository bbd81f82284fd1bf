#include "upright/behaviors/evaluate.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "upright/costs/costs.hpp"

namespace upright {

void BehaviorEvalThresholds::validate() const {
  if (!(uprightCo > 0.0))
    throw std::invalid_argument("BehaviorEvalThresholds: uprightCo must be positive");
  if (!(sittingJointTol > 0.0) || !(velocityTol > 0.0))
    throw std::invalid_argument("BehaviorEvalThresholds: tolerances must be positive");
  if (!(heightBandLow > 0.0) || !(heightBandHigh > heightBandLow))
    throw std::invalid_argument("BehaviorEvalThresholds: bad height band");
  if (!(scoreFraction > 0.0) || scoreFraction > 1.0)
    throw std::invalid_argument("BehaviorEvalThresholds: scoreFraction in (0, 1]");
}

BehaviorEvalMetrics evaluateBehavior(const GaussianPolicy& policy,
                                     BehaviorId task, const RobotModel& model,
                                     const EnvConfig& envCfg, int episodes,
                                     uint64_t seed,
                                     const BehaviorEvalThresholds& thresholds) {
  thresholds.validate();
  if (episodes < 1)
    throw std::invalid_argument("evaluateBehavior: episodes must be positive");
  if (task == BehaviorId::Selector)
    throw std::invalid_argument("evaluateBehavior: scores joint-space policies");

  Environment env(task, model, envCfg, seed);
  Rng rng(streamSeed(seed, 1));  ///< unused by the deterministic rollouts

  const std::array<double, kNumJoints>& goalJoints =
      task == BehaviorId::SelfRight ? model.sittingJoints
                                    : model.nominalJoints;

  BehaviorEvalMetrics m;
  m.episodes = episodes;
  for (int ep = 0; ep < episodes; ++ep) {
    VecX obs = env.reset();
    std::vector<double> velocityError;
    double terminalCo = 0.0;
    double timeToUpright = -1.0;
    bool failed = false;
    while (true) {
      VecX action = policy.sample(obs, rng, true);
      Environment::StepResult r = env.step(action);
      obs = r.observation;
      terminalCo = r.terms.cO;
      if (timeToUpright < 0.0 && r.terms.cO < thresholds.uprightCo)
        timeToUpright = r.time;
      if (task == BehaviorId::Locomotion)
        velocityError.push_back(
            std::abs(env.state().u[0] - env.velocityCommand()));
      if (r.done) {
        failed = !r.truncated;
        break;
      }
    }

    double trackingError = 0.0;
    if (task == BehaviorId::Locomotion) {
      size_t tail = static_cast<size_t>(
          std::ceil(thresholds.scoreFraction * velocityError.size()));
      for (size_t i = velocityError.size() - tail; i < velocityError.size(); ++i)
        trackingError += velocityError[i];
      trackingError /= tail;
    } else {
      for (int j = 0; j < kNumJoints; ++j)
        trackingError += angleDiff(env.state().q[3 + j], goalJoints[j]);
      trackingError /= kNumJoints;
    }

    bool success = false;
    switch (task) {
      case BehaviorId::SelfRight:
        success = terminalCo < thresholds.uprightCo &&
                  trackingError < thresholds.sittingJointTol;
        break;
      case BehaviorId::StandUp:
        success = terminalCo < thresholds.uprightCo &&
                  env.trueHeight() >= thresholds.heightBandLow &&
                  env.trueHeight() <= thresholds.heightBandHigh;
        break;
      case BehaviorId::Locomotion:
        success = !failed && trackingError < thresholds.velocityTol;
        break;
      case BehaviorId::Selector:
        break;
    }

    m.successRate += success ? 1.0 : 0.0;
    m.meanTerminalCo += terminalCo;
    m.meanTrackingError += trackingError;
    m.meanTimeToUpright +=
        timeToUpright >= 0.0 ? timeToUpright : envCfg.timeLimit;
  }

  m.successRate /= episodes;
  m.meanTerminalCo /= episodes;
  m.meanTrackingError /= episodes;
  m.meanTimeToUpright /= episodes;
  return m;
}

}  // namespace upright
