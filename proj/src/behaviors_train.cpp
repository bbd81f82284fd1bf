#include "upright/behaviors/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <json.hpp>
#include <stdexcept>

#include "upright/nets/checkpoint.hpp"

namespace upright {

namespace {

constexpr uint64_t kPolicyInitStream = 7;
constexpr uint64_t kEnvStreamBase = 100;
constexpr uint64_t kActionStreamBase = 200;

struct WaveStats {
  double returnSum = 0.0;
  double lengthSum = 0.0;
  int episodes = 0;
};

/// Gather up to `budget` control steps of on-policy experience from one
/// environment, whole episodes first, bootstrapping a cut-off tail.
void collectFromEnv(Environment& env, const GaussianPolicy& policy,
                    Rng& actionRng, int budget, int& episodeId,
                    TrajectoryBatch& batch, WaveStats& stats) {
  int collected = 0;
  while (collected < budget) {
    VecX obs = env.reset();
    int id = episodeId++;
    double episodeReturn = 0.0;
    int length = 0;
    while (true) {
      VecX mean = policy.mean.forward(obs);
      VecX action = mean;
      for (int i = 0; i < action.size(); ++i)
        action[i] += std::exp(policy.logStd[i]) * actionRng.normal();
      double logProb = gaussianLogProb(mean, policy.logStd, action);

      Environment::StepResult r = env.step(action);
      if (!std::isfinite(r.reward))
        throw std::runtime_error("non-finite reward from the environment");

      bool terminal = r.done && !r.truncated;
      batch.addStep(id, obs, action, logProb, r.reward, terminal);
      ++collected;
      ++length;
      episodeReturn += r.reward;
      obs = r.observation;

      if (r.done) {
        batch.finishEpisode(obs);
        stats.returnSum += episodeReturn;
        stats.lengthSum += length;
        ++stats.episodes;
        break;
      }
      if (collected >= budget) {
        batch.finishEpisode(obs);
        break;
      }
    }
  }
}

void writeLogLine(std::ofstream& out, const IterationStats& s) {
  nlohmann::json j{{"iteration", s.iteration},
                   {"mean_return", s.meanReturn},
                   {"mean_episode_length", s.meanEpisodeLength},
                   {"episodes", s.episodes},
                   {"kl", s.kl},
                   {"surrogate_gain", s.surrogateGain},
                   {"step_scale", s.stepScale},
                   {"entropy", s.entropy},
                   {"value_loss", s.valueLoss},
                   {"curriculum", s.curriculum},
                   {"accepted", s.accepted}};
  out << j.dump() << "\n";
  out.flush();
}

std::vector<int> netSizes(int inputSize, const std::vector<int>& hidden,
                          int outputSize) {
  std::vector<int> sizes{inputSize};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(outputSize);
  return sizes;
}

}  // namespace

void TrainBehaviorConfig::validate() const {
  if (iterations < 0)
    throw std::invalid_argument("TrainBehaviorConfig: iterations must be >= 0");
  if (stepsPerIteration < 1)
    throw std::invalid_argument(
        "TrainBehaviorConfig: stepsPerIteration must be positive");
  if (numEnvs < 1)
    throw std::invalid_argument("TrainBehaviorConfig: numEnvs must be positive");
  if (stepsPerIteration < numEnvs)
    throw std::invalid_argument(
        "TrainBehaviorConfig: fewer steps than rollout streams");
  if (!(policyInitScale > 0.0))
    throw std::invalid_argument(
        "TrainBehaviorConfig: policyInitScale must be positive");
  if (!(gamma >= 0.0) || gamma > 1.0 || !(lambda >= 0.0) || lambda > 1.0)
    throw std::invalid_argument("TrainBehaviorConfig: gamma/lambda in [0, 1]");
  if (checkpointEvery < 0)
    throw std::invalid_argument(
        "TrainBehaviorConfig: checkpointEvery must be >= 0");
  trpo.validate();
  env.validate();
}

TrainBehaviorResult trainBehavior(BehaviorId task, const RobotModel& model,
                                  const TrainBehaviorConfig& cfg) {
  cfg.validate();
  if (task == BehaviorId::Selector)
    throw std::invalid_argument(
        "trainBehavior: the selector has its own trainer");

  const BehaviorTask taskInfo = behaviorTask(task);
  const int obsDim = observationSpec(task).dim();
  const std::vector<int>& hidden =
      cfg.hiddenSizes.empty() ? taskInfo.hiddenSizes : cfg.hiddenSizes;

  TrainBehaviorResult result;
  Rng initRng(streamSeed(cfg.seed, kPolicyInitStream));
  result.policy = GaussianPolicy(netSizes(obsDim, hidden, kNumJoints),
                                 Activation::Tanh, cfg.initLogStd);
  result.policy.mean.init(initRng, cfg.policyInitScale);
  result.valueFunction =
      Mlp(netSizes(obsDim, cfg.valueHiddenSizes, 1), Activation::Tanh);
  result.valueFunction.init(initRng, 0.01);

  Mlp actuatorNet;
  if (!cfg.actuatorNetPath.empty())
    actuatorNet = loadNet(cfg.actuatorNetPath).net;

  std::vector<std::unique_ptr<Environment>> envs;
  std::vector<Rng> actionRngs;
  for (int w = 0; w < cfg.numEnvs; ++w) {
    envs.push_back(std::make_unique<Environment>(
        task, model, cfg.env, streamSeed(cfg.seed, kEnvStreamBase + w)));
    if (!cfg.actuatorNetPath.empty()) envs.back()->setActuatorNet(actuatorNet);
    actionRngs.emplace_back(streamSeed(cfg.seed, kActionStreamBase + w));
  }

  std::ofstream logFile;
  const bool writeFiles = !cfg.outputDir.empty();
  if (writeFiles) {
    std::filesystem::create_directories(cfg.outputDir);
    logFile.open(cfg.outputDir + "/train_log.jsonl");
    if (!logFile)
      throw std::runtime_error("trainBehavior: cannot write to " +
                               cfg.outputDir);
  }

  CurriculumState curriculum;
  const int perEnv = cfg.stepsPerIteration / cfg.numEnvs;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    TrajectoryBatch batch;
    batch.gamma = cfg.gamma;
    batch.lambda = cfg.lambda;
    WaveStats wave;
    int episodeId = 0;

    try {
      for (int w = 0; w < cfg.numEnvs; ++w) {
        envs[w]->setCurriculumFactor(curriculum.kC);
        collectFromEnv(*envs[w], result.policy, actionRngs[w], perEnv,
                       episodeId, batch, wave);
      }
    } catch (const std::exception& e) {
      result.diverged = true;
      result.note = std::string("iteration ") + std::to_string(iter) + ": " +
                    e.what();
      break;
    }

    TrpoDiagnostics d = trpoStep(result.policy, result.valueFunction, batch,
                                 cfg.trpo);
    if (!d.gradientFinite) {
      result.diverged = true;
      result.note = "iteration " + std::to_string(iter) +
                    ": non-finite policy gradient";
      break;
    }
    std::vector<double> lossTrace =
        fitValue(result.valueFunction, batch, cfg.trpo);

    IterationStats s;
    s.iteration = iter;
    s.meanReturn = wave.episodes > 0 ? wave.returnSum / wave.episodes : 0.0;
    s.meanEpisodeLength =
        wave.episodes > 0 ? wave.lengthSum / wave.episodes : 0.0;
    s.episodes = wave.episodes;
    s.kl = d.kl;
    s.surrogateGain = d.surrogateGain;
    s.stepScale = d.stepScale;
    s.entropy = d.entropy;
    s.valueLoss = lossTrace.back();
    s.curriculum = curriculum.kC;
    s.accepted = d.accepted;
    result.log.push_back(s);
    if (writeFiles) writeLogLine(logFile, s);

    if (writeFiles && cfg.checkpointEvery > 0 &&
        (iter + 1) % cfg.checkpointEvery == 0)
      saveNet(cfg.outputDir + "/policy_" + std::to_string(iter + 1) + ".net",
              result.policy.mean, result.policy.logStd);

    curriculum = advanceCurriculum(curriculum);
  }

  if (writeFiles) {
    saveNet(cfg.outputDir + "/policy.net", result.policy.mean,
            result.policy.logStd);
    saveNet(cfg.outputDir + "/value.net", result.valueFunction);
  }
  return result;
}

}  // namespace upright
