#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "upright/behaviors/evaluate.hpp"
#include "upright/behaviors/train.hpp"
#include "upright/nets/checkpoint.hpp"

using namespace upright;

namespace {

bool bitwiseEqual(const VecX& a, const VecX& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  }
  return true;
}

RandomizationConfig zeroRandomization() {
  RandomizationConfig cfg;
  cfg.massFraction = 0.0;
  cfg.comShift = 0.0;
  cfg.shapeFraction = 0.0;
  cfg.frictionLow = cfg.frictionHigh = 1.0;
  cfg.noiseLinVel = cfg.noiseAngVel = 0.0;
  cfg.noiseJointVel = cfg.noiseJointPos = 0.0;
  cfg.noiseHeight = 0.0;
  return cfg;
}

EnvConfig quietConfig(BehaviorId task) {
  EnvConfig cfg = defaultEnvConfig(task);
  cfg.randomization = zeroRandomization();
  cfg.observationNoise = false;
  return cfg;
}

/// Two updates on short stand-up episodes, small enough to keep every
/// training test under a second.
TrainBehaviorConfig smokeConfig() {
  TrainBehaviorConfig cfg;
  cfg.iterations = 2;
  cfg.stepsPerIteration = 100;
  cfg.numEnvs = 2;
  cfg.hiddenSizes = {16};
  cfg.valueHiddenSizes = {16};
  cfg.seed = 11;
  cfg.trpo.valueEpochs = 5;
  cfg.env = quietConfig(BehaviorId::StandUp);
  cfg.env.timeLimit = 0.25;
  return cfg;
}

GaussianPolicy tinyPolicy(BehaviorId task, uint64_t seed) {
  int obsDim = observationSpec(task).dim();
  GaussianPolicy policy({obsDim, 16, kNumJoints}, Activation::Tanh);
  Rng rng(streamSeed(seed, 7));
  policy.mean.init(rng, 0.1);
  return policy;
}

}  // namespace

TEST_SUITE("behaviors") {

TEST_CASE("training loop accounts complete episodes exactly") {
  RobotModel model;
  TrainBehaviorConfig cfg = smokeConfig();
  TrainBehaviorResult result = trainBehavior(BehaviorId::StandUp, model, cfg);

  REQUIRE(!result.diverged);
  REQUIRE(result.log.size() == 2);
  CurriculumState expected;
  for (size_t i = 0; i < result.log.size(); ++i) {
    const IterationStats& s = result.log[i];
    CHECK(s.iteration == static_cast<int>(i));
    /// 0.25 s at 100 Hz is 25 control steps, so a 50-step budget per stream
    /// holds exactly two full episodes.
    CHECK(s.episodes == 4);
    CHECK(s.meanEpisodeLength == 25.0);
    CHECK(std::isfinite(s.meanReturn));
    CHECK(std::isfinite(s.kl));
    CHECK(std::isfinite(s.valueLoss));
    CHECK(s.valueLoss >= 0.0);
    CHECK(s.curriculum == expected.kC);
    expected = advanceCurriculum(expected);
  }
}

TEST_CASE("training is bitwise deterministic per seed") {
  RobotModel model;
  TrainBehaviorConfig cfg = smokeConfig();
  TrainBehaviorResult a = trainBehavior(BehaviorId::StandUp, model, cfg);
  TrainBehaviorResult b = trainBehavior(BehaviorId::StandUp, model, cfg);

  CHECK(bitwiseEqual(a.policy.mean.params(), b.policy.mean.params()));
  CHECK(bitwiseEqual(a.policy.logStd, b.policy.logStd));
  CHECK(bitwiseEqual(a.valueFunction.params(), b.valueFunction.params()));
  REQUIRE(a.log.size() == b.log.size());
  for (size_t i = 0; i < a.log.size(); ++i) {
    CHECK(std::memcmp(&a.log[i].meanReturn, &b.log[i].meanReturn,
                      sizeof(double)) == 0);
    CHECK(std::memcmp(&a.log[i].kl, &b.log[i].kl, sizeof(double)) == 0);
  }

  cfg.seed = 12;
  TrainBehaviorResult c = trainBehavior(BehaviorId::StandUp, model, cfg);
  CHECK(!bitwiseEqual(a.policy.mean.params(), c.policy.mean.params()));
}

TEST_CASE("checkpoints and the training log land on disk") {
  namespace fs = std::filesystem;
  RobotModel model;
  fs::path dir = fs::temp_directory_path() / "upright_behaviors_train_test";
  fs::remove_all(dir);

  TrainBehaviorConfig cfg = smokeConfig();
  cfg.iterations = 4;
  cfg.checkpointEvery = 2;
  cfg.outputDir = dir.string();
  TrainBehaviorResult result = trainBehavior(BehaviorId::StandUp, model, cfg);

  CHECK(fs::exists(dir / "policy_2.net"));
  CHECK(fs::exists(dir / "policy_4.net"));
  CHECK(!fs::exists(dir / "policy_1.net"));

  LoadedNet policy = loadNet((dir / "policy.net").string());
  CHECK(bitwiseEqual(policy.net.params(), result.policy.mean.params()));
  CHECK(bitwiseEqual(policy.extra, result.policy.logStd));
  LoadedNet value = loadNet((dir / "value.net").string());
  CHECK(bitwiseEqual(value.net.params(), result.valueFunction.params()));
  CHECK(value.extra.size() == 0);

  std::ifstream log(dir / "train_log.jsonl");
  REQUIRE(log.good());
  std::string line;
  int rows = 0;
  while (std::getline(log, line)) {
    nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j.at("iteration").get<int>() == rows);
    CHECK(j.at("episodes").get<int>() > 0);
    CHECK(j.contains("kl"));
    CHECK(j.contains("value_loss"));
    ++rows;
  }
  CHECK(rows == 4);
  fs::remove_all(dir);
}

TEST_CASE("network sizes default to the task table") {
  RobotModel model;
  TrainBehaviorConfig cfg;
  cfg.iterations = 0;
  cfg.env = quietConfig(BehaviorId::StandUp);
  TrainBehaviorResult result = trainBehavior(BehaviorId::StandUp, model, cfg);

  CHECK(result.policy.mean.sizes() == std::vector<int>{33, 128, 128, 4});
  CHECK(result.valueFunction.sizes() == std::vector<int>{33, 64, 64, 1});
  CHECK(result.policy.logStd.size() == kNumJoints);
  CHECK(bitwiseEqual(result.policy.logStd, VecX::Zero(kNumJoints)));

  cfg.hiddenSizes = {16};
  cfg.initLogStd = -0.5;
  TrainBehaviorResult small = trainBehavior(BehaviorId::StandUp, model, cfg);
  CHECK(small.policy.mean.sizes() == std::vector<int>{33, 16, 4});
  CHECK(bitwiseEqual(small.policy.logStd, VecX::Constant(kNumJoints, -0.5)));
}

TEST_CASE("exploding actions abort with a diagnostic instead of throwing") {
  RobotModel model;
  TrainBehaviorConfig cfg = smokeConfig();
  cfg.initLogStd = 1000.0;  ///< exp overflows, the sampled action is infinite
  TrainBehaviorResult result = trainBehavior(BehaviorId::StandUp, model, cfg);

  CHECK(result.diverged);
  CHECK(result.note.find("iteration 0") != std::string::npos);
  CHECK(result.log.empty());
}

TEST_CASE("evaluation is deterministic and bounded") {
  RobotModel model;
  GaussianPolicy policy = tinyPolicy(BehaviorId::StandUp, 5);
  EnvConfig env = quietConfig(BehaviorId::StandUp);
  env.timeLimit = 0.5;

  BehaviorEvalMetrics a =
      evaluateBehavior(policy, BehaviorId::StandUp, model, env, 5, 3);
  BehaviorEvalMetrics b =
      evaluateBehavior(policy, BehaviorId::StandUp, model, env, 5, 3);
  CHECK(a.successRate == b.successRate);
  CHECK(std::memcmp(&a.meanTerminalCo, &b.meanTerminalCo, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.meanTrackingError, &b.meanTrackingError,
                    sizeof(double)) == 0);
  CHECK(a.episodes == 5);
  CHECK(a.successRate >= 0.0);
  CHECK(a.successRate <= 1.0);
  CHECK(a.meanTimeToUpright <= env.timeLimit + 1e-12);
  CHECK(a.meanTerminalCo >= 0.0);
}

TEST_CASE("an untrained policy does not self-right") {
  RobotModel model;
  GaussianPolicy policy = tinyPolicy(BehaviorId::SelfRight, 9);
  EnvConfig env = defaultEnvConfig(BehaviorId::SelfRight);
  env.timeLimit = 2.0;

  BehaviorEvalMetrics m =
      evaluateBehavior(policy, BehaviorId::SelfRight, model, env, 20, 4);
  CHECK(m.successRate <= 0.15);
}

TEST_CASE("impossible and trivial thresholds bracket the success rate") {
  RobotModel model;
  GaussianPolicy policy = tinyPolicy(BehaviorId::SelfRight, 9);
  EnvConfig env = quietConfig(BehaviorId::SelfRight);
  env.timeLimit = 1.0;

  BehaviorEvalThresholds impossible;
  impossible.uprightCo = 1e-9;
  BehaviorEvalMetrics worst = evaluateBehavior(policy, BehaviorId::SelfRight,
                                               model, env, 10, 4, impossible);
  CHECK(worst.successRate == 0.0);

  /// cO is at most 2 and a joint angle difference at most pi, so these
  /// bounds cannot fail.
  BehaviorEvalThresholds loose;
  loose.uprightCo = 2.1;
  loose.sittingJointTol = 10.0;
  BehaviorEvalMetrics best = evaluateBehavior(policy, BehaviorId::SelfRight,
                                              model, env, 10, 4, loose);
  CHECK(best.successRate == 1.0);
}

TEST_CASE("invalid configurations are rejected") {
  RobotModel model;
  TrainBehaviorConfig cfg = smokeConfig();

  cfg.iterations = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = smokeConfig();
  cfg.stepsPerIteration = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = smokeConfig();
  cfg.numEnvs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = smokeConfig();
  cfg.stepsPerIteration = 3;
  cfg.numEnvs = 4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = smokeConfig();
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = smokeConfig();
  cfg.checkpointEvery = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = smokeConfig();
  cfg.policyInitScale = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = smokeConfig();
  CHECK_THROWS_AS(trainBehavior(BehaviorId::Selector, model, cfg),
                  std::invalid_argument);

  GaussianPolicy policy = tinyPolicy(BehaviorId::StandUp, 5);
  EnvConfig env = quietConfig(BehaviorId::StandUp);
  CHECK_THROWS_AS(
      evaluateBehavior(policy, BehaviorId::StandUp, model, env, 0, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      evaluateBehavior(policy, BehaviorId::Selector, model, env, 1, 1),
      std::invalid_argument);

  BehaviorEvalThresholds bad;
  bad.scoreFraction = 0.0;
  CHECK_THROWS_AS(
      evaluateBehavior(policy, BehaviorId::StandUp, model, env, 1, 1, bad),
      std::invalid_argument);
  bad = BehaviorEvalThresholds{};
  bad.heightBandHigh = bad.heightBandLow - 0.1;
  CHECK_THROWS_AS(
      evaluateBehavior(policy, BehaviorId::StandUp, model, env, 1, 1, bad),
      std::invalid_argument);
}

}  // TEST_SUITE
