#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <stdexcept>

#include "upright/nets/checkpoint.hpp"
#include "upright/selector/selector.hpp"

namespace upright {

namespace {

constexpr uint64_t kPolicyInitStream = 7;
constexpr uint64_t kEstimatorInitStream = 8;
constexpr uint64_t kReplayStream = 9;
constexpr uint64_t kEnvStreamBase = 100;
constexpr uint64_t kActionStreamBase = 200;

struct WaveStats {
  double returnSum = 0.0;
  double lengthSum = 0.0;
  int episodes = 0;
  double heightSum = 0.0;
  int64_t heightCount = 0;
};

/// Selector rollouts: every state the policy acts on lands in the replay
/// memory next to the true height of the same instant.
void collectFromEnv(Environment& env, const CategoricalPolicy& policy,
                    Rng& actionRng, int budget, int heightOffset,
                    int& episodeId, TrajectoryBatch& batch,
                    ReplayMemory& replay, WaveStats& stats) {
  int collected = 0;
  while (collected < budget) {
    VecX obs = env.reset();
    int id = episodeId++;
    double episodeReturn = 0.0;
    int length = 0;
    while (true) {
      replay.append(env.lastHeightObservation(), env.trueHeight());
      stats.heightSum += obs[heightOffset];
      ++stats.heightCount;

      int choice = policy.sample(obs, actionRng);
      double logProb = logSoftmax(policy.logits.forward(obs))(choice);
      VecX action(1);
      action[0] = choice;

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

double batchMse(const Mlp& estimator, const ReplayMemory::Batch& batch) {
  double acc = 0.0;
  const int n = static_cast<int>(batch.heights.size());
  for (int j = 0; j < n; ++j) {
    const double e = estimator.forward(batch.observations[j])(0) - batch.heights[j];
    acc += e * e;
  }
  return acc / n;
}

/// Full-batch descent on the sampled pairs with step halving, mirroring the
/// value fit; the committed loss never increases.
void fitHeightBatch(Mlp& estimator, const ReplayMemory::Batch& batch,
                    double initialStep, int epochs, double& lossBefore,
                    double& lossAfter) {
  const int n = static_cast<int>(batch.heights.size());
  lossBefore = batchMse(estimator, batch);
  lossAfter = lossBefore;
  VecX theta = estimator.params();
  for (int epoch = 0; epoch < epochs; ++epoch) {
    VecX grad = VecX::Zero(estimator.paramCount());
    for (int j = 0; j < n; ++j) {
      Mlp::Trace tr;
      const double out = estimator.forward(batch.observations[j], tr)(0);
      VecX og(1);
      og(0) = 2.0 * (out - batch.heights[j]) / n;
      grad += estimator.backward(tr, og);
    }
    if (!grad.allFinite()) break;

    double step = initialStep;
    bool moved = false;
    for (int attempt = 0; attempt < 12; ++attempt, step *= 0.5) {
      estimator.setParams(theta - step * grad);
      const double candidate = batchMse(estimator, batch);
      if (std::isfinite(candidate) && candidate < lossAfter) {
        theta = estimator.params();
        lossAfter = candidate;
        moved = true;
        break;
      }
    }
    if (!moved) {
      estimator.setParams(theta);
      break;
    }
  }
}

void writeLogLine(std::ofstream& out, const SelectorIterationStats& s) {
  nlohmann::json j{{"iteration", s.iteration},
                   {"mean_return", s.meanReturn},
                   {"mean_episode_length", s.meanEpisodeLength},
                   {"episodes", s.episodes},
                   {"kl", s.kl},
                   {"surrogate_gain", s.surrogateGain},
                   {"step_scale", s.stepScale},
                   {"entropy", s.entropy},
                   {"value_loss", s.valueLoss},
                   {"regression_loss_before", s.regressionLossBefore},
                   {"regression_loss_after", s.regressionLossAfter},
                   {"mean_observed_height", s.meanObservedHeight},
                   {"using_estimate", s.usingEstimate},
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

void SelectorConfig::validate() const {
  if (warmupIterations < 0)
    throw std::invalid_argument("SelectorConfig: warmupIterations must be >= 0");
  if (regressionBatch < 1)
    throw std::invalid_argument("SelectorConfig: regressionBatch must be positive");
  if (replayCapacity < 1)
    throw std::invalid_argument("SelectorConfig: replayCapacity must be positive");
  if (rateHz != behaviorTask(BehaviorId::Selector).controlRate())
    throw std::invalid_argument(
        "SelectorConfig: rateHz disagrees with the task table");
  if (!(estimatorStep > 0.0))
    throw std::invalid_argument("SelectorConfig: estimatorStep must be positive");
  if (estimatorEpochs < 0)
    throw std::invalid_argument("SelectorConfig: estimatorEpochs must be >= 0");
}

void TrainSelectorConfig::validate() const {
  selector.validate();
  if (iterations < 0)
    throw std::invalid_argument("TrainSelectorConfig: iterations must be >= 0");
  if (stepsPerIteration < 1)
    throw std::invalid_argument(
        "TrainSelectorConfig: stepsPerIteration must be positive");
  if (numEnvs < 1)
    throw std::invalid_argument("TrainSelectorConfig: numEnvs must be positive");
  if (stepsPerIteration < numEnvs)
    throw std::invalid_argument(
        "TrainSelectorConfig: fewer steps than rollout streams");
  if (!(policyInitScale > 0.0))
    throw std::invalid_argument(
        "TrainSelectorConfig: policyInitScale must be positive");
  if (!(gamma >= 0.0) || gamma > 1.0 || !(lambda >= 0.0) || lambda > 1.0)
    throw std::invalid_argument("TrainSelectorConfig: gamma/lambda in [0, 1]");
  if (checkpointEvery < 0)
    throw std::invalid_argument(
        "TrainSelectorConfig: checkpointEvery must be >= 0");
  if (initialEstimator.paramCount() > 0 &&
      (initialEstimator.inputSize() != heightEstimatorSpec().dim() ||
       initialEstimator.outputSize() != 1))
    throw std::invalid_argument(
        "TrainSelectorConfig: initialEstimator has the wrong shape");
  trpo.validate();
  env.validate();
}

TrainSelectorResult trainSelector(const std::array<GaussianPolicy, 3>& behaviors,
                                  const RobotModel& model,
                                  const TrainSelectorConfig& cfg) {
  cfg.validate();
  for (int i = 0; i < 3; ++i) {
    const BehaviorId id = static_cast<BehaviorId>(i);
    if (behaviors[i].mean.paramCount() == 0)
      throw std::invalid_argument("trainSelector: missing behavior policy " +
                                  std::string(behaviorName(id)));
    if (behaviors[i].mean.inputSize() != observationSpec(id).dim() ||
        behaviors[i].mean.outputSize() != kNumJoints)
      throw std::invalid_argument(
          "trainSelector: behavior policy shape mismatch for " +
          std::string(behaviorName(id)));
  }

  const int obsDim = observationSpec(BehaviorId::Selector).dim();
  const int heightOffset =
      observationSpec(BehaviorId::Selector).offsetOf("height");
  const std::vector<int>& hidden =
      cfg.hiddenSizes.empty() ? behaviorTask(BehaviorId::Selector).hiddenSizes
                              : cfg.hiddenSizes;

  TrainSelectorResult result;
  Rng initRng(streamSeed(cfg.seed, kPolicyInitStream));
  result.selector =
      CategoricalPolicy(netSizes(obsDim, hidden, 3), Activation::Tanh);
  result.selector.logits.init(initRng, cfg.policyInitScale);
  result.valueFunction =
      Mlp(netSizes(obsDim, cfg.valueHiddenSizes, 1), Activation::Tanh);
  result.valueFunction.init(initRng, 0.01);

  if (cfg.initialEstimator.paramCount() > 0) {
    result.heightEstimator = cfg.initialEstimator;
  } else {
    Rng estimatorRng(streamSeed(cfg.seed, kEstimatorInitStream));
    result.heightEstimator =
        Mlp(netSizes(heightEstimatorSpec().dim(),
                     cfg.selector.estimatorHiddenSizes, 1),
            Activation::Softsign);
    result.heightEstimator.init(estimatorRng, 0.1);
  }

  Mlp actuatorNet;
  if (!cfg.actuatorNetPath.empty()) actuatorNet = loadNet(cfg.actuatorNetPath).net;

  std::vector<std::unique_ptr<Environment>> envs;
  std::vector<Rng> actionRngs;
  for (int w = 0; w < cfg.numEnvs; ++w) {
    envs.push_back(std::make_unique<Environment>(
        BehaviorId::Selector, model, cfg.env,
        streamSeed(cfg.seed, kEnvStreamBase + w)));
    for (int i = 0; i < 3; ++i)
      envs.back()->setBehaviorPolicy(static_cast<BehaviorId>(i), behaviors[i]);
    if (!cfg.actuatorNetPath.empty()) envs.back()->setActuatorNet(actuatorNet);
    actionRngs.emplace_back(streamSeed(cfg.seed, kActionStreamBase + w));
  }

  std::ofstream logFile;
  const bool writeFiles = !cfg.outputDir.empty();
  if (writeFiles) {
    std::filesystem::create_directories(cfg.outputDir);
    logFile.open(cfg.outputDir + "/train_log.jsonl");
    if (!logFile)
      throw std::runtime_error("trainSelector: cannot write to " +
                               cfg.outputDir);
  }

  ReplayMemory replay(cfg.selector.replayCapacity);
  Rng replayRng(streamSeed(cfg.seed, kReplayStream));
  CurriculumState curriculum;
  const int perEnv = cfg.stepsPerIteration / cfg.numEnvs;
  bool providerInstalled = false;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const bool usingEstimate = iter > cfg.selector.warmupIterations;
    if (usingEstimate && !providerInstalled) {
      Mlp& estimator = result.heightEstimator;
      for (auto& env : envs)
        env->setHeightProvider(
            [&estimator](const VecX& s) { return estimator.forward(s)(0); });
      providerInstalled = true;
    }

    TrajectoryBatch batch;
    batch.gamma = cfg.gamma;
    batch.lambda = cfg.lambda;
    WaveStats wave;
    int episodeId = 0;

    try {
      for (int w = 0; w < cfg.numEnvs; ++w) {
        envs[w]->setCurriculumFactor(curriculum.kC);
        collectFromEnv(*envs[w], result.selector, actionRngs[w], perEnv,
                       heightOffset, episodeId, batch, replay, wave);
      }
    } catch (const std::exception& e) {
      result.diverged = true;
      result.note = std::string("iteration ") + std::to_string(iter) + ": " +
                    e.what();
      break;
    }

    SelectorIterationStats s;
    ReplayMemory::Batch pairs =
        replay.sample(cfg.selector.regressionBatch, replayRng);
    fitHeightBatch(result.heightEstimator, pairs, cfg.selector.estimatorStep,
                   cfg.selector.estimatorEpochs, s.regressionLossBefore,
                   s.regressionLossAfter);

    TrpoDiagnostics d =
        trpoStep(result.selector, result.valueFunction, batch, cfg.trpo);
    if (!d.gradientFinite) {
      result.diverged = true;
      result.note = "iteration " + std::to_string(iter) +
                    ": non-finite policy gradient";
      break;
    }
    std::vector<double> lossTrace =
        fitValue(result.valueFunction, batch, cfg.trpo);

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
    s.meanObservedHeight =
        wave.heightCount > 0 ? wave.heightSum / wave.heightCount : 0.0;
    s.usingEstimate = usingEstimate;
    s.curriculum = curriculum.kC;
    s.accepted = d.accepted;
    result.log.push_back(s);
    if (writeFiles) writeLogLine(logFile, s);

    if (writeFiles && cfg.checkpointEvery > 0 &&
        (iter + 1) % cfg.checkpointEvery == 0)
      saveNet(cfg.outputDir + "/selector_" + std::to_string(iter + 1) + ".net",
              result.selector.logits);

    curriculum = advanceCurriculum(curriculum);
  }

  if (writeFiles) {
    saveNet(cfg.outputDir + "/selector.net", result.selector.logits);
    saveNet(cfg.outputDir + "/height_estimator.net", result.heightEstimator);
    saveNet(cfg.outputDir + "/value.net", result.valueFunction);
  }
  return result;
}

BehaviorChoice selectBehavior(const CategoricalPolicy& selector, const VecX& obs,
                              SelectMode mode, Rng* rng) {
  BehaviorChoice choice;
  choice.probabilities = selector.probs(obs);
  if (mode == SelectMode::Argmax) {
    for (int i = 1; i < choice.probabilities.size(); ++i)
      if (choice.probabilities[i] > choice.probabilities[choice.behavior])
        choice.behavior = i;
    return choice;
  }
  if (rng == nullptr)
    throw std::invalid_argument("selectBehavior: sample mode needs an rng");
  double u = rng->uniform(0.0, 1.0);
  for (int i = 0; i < choice.probabilities.size(); ++i) {
    u -= choice.probabilities[i];
    if (u <= 0.0) {
      choice.behavior = i;
      return choice;
    }
  }
  choice.behavior = static_cast<int>(choice.probabilities.size()) - 1;
  return choice;
}

double estimateHeight(const Mlp& estimator, const VecX& obs) {
  if (estimator.outputSize() != 1)
    throw std::invalid_argument("estimateHeight: estimator must be scalar");
  return estimator.forward(obs)(0);
}

void writeDecisionLog(const std::string& path,
                      const std::vector<SelectorDecision>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("writeDecisionLog: cannot write " + path);
  out << "time,p0,p1,p2,behavior\n";
  out << std::setprecision(10);
  for (const SelectorDecision& row : rows) {
    if (row.probabilities.size() != 3)
      throw std::invalid_argument("writeDecisionLog: expected 3 probabilities");
    out << row.time << ',' << row.probabilities[0] << ','
        << row.probabilities[1] << ',' << row.probabilities[2] << ','
        << row.behavior << "\n";
  }
}

}  // namespace upright
