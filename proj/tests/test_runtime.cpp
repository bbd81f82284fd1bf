#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "upright/behaviors/task.hpp"
#include "upright/env/observation.hpp"
#include "upright/runtime/deploy.hpp"
#include "upright/runtime/drift.hpp"
#include "upright/runtime/history.hpp"
#include "upright/runtime/schedule.hpp"

using namespace upright;

namespace {

bool bitwiseEqual(const VecX& a, const VecX& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  }
  return true;
}

GaussianPolicy tinyBehavior(BehaviorId task, uint64_t seed) {
  int obsDim = observationSpec(task).dim();
  GaussianPolicy policy({obsDim, 8, kNumJoints}, Activation::Tanh);
  Rng rng(streamSeed(seed, 7));
  policy.mean.init(rng, 0.1);
  return policy;
}

std::array<GaussianPolicy, 3> tinyBehaviors(uint64_t seed) {
  return {tinyBehavior(BehaviorId::SelfRight, seed),
          tinyBehavior(BehaviorId::StandUp, seed + 1),
          tinyBehavior(BehaviorId::Locomotion, seed + 2)};
}

/// Single linear layer emitting a fixed value regardless of input.
Mlp constantNet(int inputDim, double value) {
  Mlp net({inputDim, 1}, Activation::Softsign);
  VecX flat = VecX::Zero(net.paramCount());
  flat[net.paramCount() - 1] = value;
  net.setParams(flat);
  return net;
}

/// Linear self-righting policy whose output copies the joint-position block
/// of its observation, exposing exactly what the policy was shown.
GaussianPolicy jointEchoPolicy() {
  const ObservationSpec spec = observationSpec(BehaviorId::SelfRight);
  const int dim = spec.dim();
  const int off = spec.offsetOf("joint_positions");
  GaussianPolicy policy({dim, kNumJoints}, Activation::Tanh);
  VecX flat = VecX::Zero(policy.mean.paramCount());
  for (int j = 0; j < kNumJoints; ++j) flat[j * dim + off + j] = 1.0;
  policy.mean.setParams(flat);
  return policy;
}

DeploymentStack selectorStack(uint64_t seed) {
  DeploymentStack stack;
  stack.behaviors = tinyBehaviors(seed);
  stack.selector = CategoricalPolicy({kSelectorObsDim, 8, 3}, Activation::Tanh);
  Rng selRng(streamSeed(seed, 5));
  stack.selector.logits.init(selRng, 0.1);
  stack.heightEstimator = Mlp({kHeightObsDim, 8, 1}, Activation::Tanh);
  Rng estRng(streamSeed(seed, 6));
  stack.heightEstimator.init(estRng, 0.1);
  return stack;
}

/// Rules-driven stack whose uprightness bound is unreachably strict, so the
/// arbiter never leaves self-righting.
DeploymentStack selfRightForeverStack(uint64_t seed) {
  DeploymentStack stack = selectorStack(seed);
  stack.useFsm = true;
  stack.fsm.uprightCo = 1e-6;
  return stack;
}

SimState standingState(const RobotModel& model) {
  SimState state;
  state.q = standingPose(model);
  state.u = VecX::Zero(kDof);
  return state;
}

DeploymentConfig quickConfig(const RobotModel& model, double duration) {
  DeploymentConfig cfg;
  cfg.duration = duration;
  cfg.initialState = standingState(model);
  return cfg;
}

/// Every behavior evaluation must land on the active behavior's own grid,
/// phase-anchored to the most recent switch (or to control start), and every
/// switch tick must produce fresh output immediately.
void checkCadence(const DeploymentTrace& trace) {
  const std::array<int, 3> divisors{
      behaviorTask(BehaviorId::SelfRight).substeps,
      behaviorTask(BehaviorId::StandUp).substeps,
      behaviorTask(BehaviorId::Locomotion).substeps};
  const std::set<std::int64_t> switches(trace.switchTicks.begin(),
                                        trace.switchTicks.end());
  std::int64_t alignTick = trace.freezeTicks;
  int failures = 0;
  for (const DeploymentStep& s : trace.steps) {
    if (s.freeze) {
      if (s.behaviorEvaluated) ++failures;
      continue;
    }
    if (switches.count(s.tick)) alignTick = s.tick;
    const int div = divisors[static_cast<int>(s.behavior)];
    const bool due = (s.tick - alignTick) % div == 0;
    if (s.behaviorEvaluated != due) ++failures;
  }
  CHECK(failures == 0);
}

DeploymentTrace syntheticTrace(const std::vector<std::array<double, 3>>& rows) {
  DeploymentTrace trace;
  trace.dt = 0.0025;
  trace.velocityCommand = 0.5;
  trace.freezeTicks = 20;
  for (int i = 0; i < trace.freezeTicks; ++i) {
    DeploymentStep s;
    s.tick = i;
    s.time = (i - trace.freezeTicks) * trace.dt;
    s.freeze = true;
    trace.steps.push_back(s);
  }
  int k = 0;
  for (const auto& r : rows) {
    DeploymentStep s;
    s.tick = trace.freezeTicks + k;
    s.time = k * trace.dt;
    s.co = r[0];
    s.trueState.q[1] = r[1];
    s.trueState.u[0] = r[2];
    trace.steps.push_back(s);
    ++k;
  }
  return trace;
}

/// Reference evaluation: direct scan of every window, no running sums.
TraceEvaluation naiveEvaluate(const DeploymentTrace& trace,
                              const RecoveryThresholds& th, double earliest) {
  std::vector<const DeploymentStep*> rows;
  for (const DeploymentStep& s : trace.steps)
    if (!s.freeze) rows.push_back(&s);
  const auto window = static_cast<std::size_t>(std::llround(th.window / trace.dt));
  TraceEvaluation result;
  for (std::size_t s = 0; s + window <= rows.size(); ++s) {
    if (rows[s]->time < earliest) continue;
    bool ok = true;
    double verr = 0.0;
    for (std::size_t k = 0; k < window; ++k) {
      const DeploymentStep& r = *rows[s + k];
      if (!(r.co < th.uprightCo && r.trueState.q[1] >= th.heightLow &&
            r.trueState.q[1] <= th.heightHigh)) {
        ok = false;
        break;
      }
      verr += std::abs(r.trueState.u[0] - trace.velocityCommand);
    }
    if (ok && verr / static_cast<double>(window) < th.velocityTol) {
      result.success = true;
      result.successTime = rows[s]->time;
      return result;
    }
  }
  return result;
}

}  // namespace

TEST_SUITE("runtime") {

TEST_CASE("scheduler fires each task at its exact rate") {
  RateScheduler sched({1, 2, 4, 8, 20});
  std::array<int, 5> counts{};
  for (int t = 0; t < 400; ++t) {
    for (int task = 0; task < 5; ++task) {
      if (sched.poll(task)) {
        ++counts[task];
        CHECK(sched.tick() % sched.divisor(task) == 0);
      }
    }
    sched.advance();
  }
  CHECK(counts[0] == 400);
  CHECK(counts[1] == 200);
  CHECK(counts[2] == 100);
  CHECK(counts[3] == 50);
  CHECK(counts[4] == 20);

  CHECK_THROWS_AS(RateScheduler{std::vector<int>{}}, std::invalid_argument);
  CHECK_THROWS_AS((RateScheduler{std::vector<int>{4, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(sched.poll(5), std::invalid_argument);
  CHECK_THROWS_AS(sched.poll(-1), std::invalid_argument);
  CHECK_THROWS_AS(sched.divisor(7), std::invalid_argument);
  CHECK_THROWS_AS(sched.realign(9), std::invalid_argument);
}

TEST_CASE("scheduler realign re-phases a task to the current tick") {
  RateScheduler sched({20});
  std::vector<std::int64_t> fired;
  for (int t = 0; t < 100; ++t) {
    if (t == 13) sched.realign(0);
    if (sched.poll(0)) fired.push_back(sched.tick());
    sched.advance();
  }
  const std::vector<std::int64_t> expected{0, 13, 33, 53, 73, 93};
  CHECK(fired == expected);
}

TEST_CASE("history buffer rejects queries until a full window") {
  HistoryBuffer buffer;
  CHECK_FALSE(buffer.filled());
  CHECK(buffer.count() == 0);
  CHECK_THROWS_AS(buffer.histories(), std::logic_error);

  for (int t = 0; t < JointHistory::kDepth - 1; ++t) {
    buffer.push(VecX::Constant(kNumJoints, 0.1 * t),
                VecX::Constant(kNumJoints, -0.01 * t));
  }
  CHECK_FALSE(buffer.filled());
  CHECK_THROWS_AS(buffer.histories(), std::logic_error);

  buffer.push(VecX::Constant(kNumJoints, 0.1 * (JointHistory::kDepth - 1)),
              VecX::Constant(kNumJoints, -0.01 * (JointHistory::kDepth - 1)));
  CHECK(buffer.filled());
  const auto& hist = buffer.histories();
  CHECK(hist[0].errorAgo(0) == doctest::Approx(1.9).epsilon(1e-12));
  CHECK(hist[2].errorAgo(8) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(hist[3].velocityAgo(4) == doctest::Approx(-0.15).epsilon(1e-12));

  CHECK_THROWS_AS(buffer.push(VecX::Zero(3), VecX::Zero(kNumJoints)),
                  std::invalid_argument);

  buffer.clear();
  CHECK_FALSE(buffer.filled());
  CHECK_THROWS_AS(buffer.histories(), std::logic_error);

  buffer.push(VecX::Constant(kNumJoints, 0.7), VecX::Constant(kNumJoints, 0.2));
  CHECK(buffer.joint(0).errorAgo(0) == doctest::Approx(0.7));
  CHECK(buffer.joint(0).errorAgo(1) == 0.0);
  CHECK(buffer.joint(3).velocityAgo(0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(buffer.joint(kNumJoints), std::invalid_argument);
}

TEST_CASE("drift with zero sigma tracks truth bitwise and draws nothing") {
  DriftConfig cfg;
  cfg.positionSigma = 0.0;
  cfg.velocitySigma = 0.0;
  DriftingEstimator drift(cfg, kActuatorDt);
  Rng rng(31);
  Rng control(31);
  Rng truthRng(77);
  for (int t = 0; t < 100; ++t) {
    SimState truth;
    for (int i = 0; i < kDof; ++i) {
      truth.q[i] = truthRng.uniform(-2.0, 2.0);
      truth.u[i] = truthRng.uniform(-3.0, 3.0);
    }
    const SimState est = drift.step(truth, t % 3 != 0, rng);
    CHECK(bitwiseEqual(est.q, truth.q));
    CHECK(bitwiseEqual(est.u, truth.u));
  }
  CHECK(drift.positionError().norm() == 0.0);
  CHECK(drift.velocityError().norm() == 0.0);
  CHECK(rng.normal(0.0, 1.0) == control.normal(0.0, 1.0));
}

TEST_CASE("drift perturbs only the base translation channels") {
  DriftingEstimator drift(DriftConfig{}, kActuatorDt);
  Rng rng(5);
  SimState truth;
  truth.q << 0.3, 0.5, 0.7, 0.4, -0.8, -0.4, 0.8;
  truth.u << 1.0, -0.5, 2.0, 0.1, 0.2, 0.3, 0.4;
  for (int t = 0; t < 50; ++t) drift.step(truth, false, rng);
  const SimState est = drift.step(truth, false, rng);
  CHECK(est.q[2] == truth.q[2]);
  CHECK(est.u[2] == truth.u[2]);
  for (int j = 0; j < kNumJoints; ++j) {
    CHECK(est.q[3 + j] == truth.q[3 + j]);
    CHECK(est.u[3 + j] == truth.u[3 + j]);
  }
  CHECK(std::abs(est.q[0] - truth.q[0]) > 0.0);
  CHECK(std::abs(est.q[1] - truth.q[1]) > 0.0);
  CHECK(std::abs(est.u[0] - truth.u[0]) > 0.0);
  CHECK(std::abs(est.u[1] - truth.u[1]) > 0.0);

  drift.reset();
  CHECK(drift.positionError().norm() == 0.0);
  CHECK(drift.velocityError().norm() == 0.0);
}

TEST_CASE("drift variance grows with the airborne tick budget") {
  // 800 airborne ticks of a 0.001 * 10 per-tick walk give a variance of
  // 800 * 0.01^2 = 0.08 on each channel; the grounded walk with decay
  // settles near sigma^2 / (1 - k^2) which is three orders smaller.
  DriftConfig cfg;
  const int ticks = 800;
  const int trials = 400;
  double airborneSq = 0.0;
  double groundedSq = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    DriftingEstimator air(cfg, kActuatorDt);
    DriftingEstimator ground(cfg, kActuatorDt);
    Rng rngAir(streamSeed(400, trial));
    Rng rngGround(streamSeed(900, trial));
    SimState truth;
    for (int t = 0; t < ticks; ++t) {
      air.step(truth, false, rngAir);
      ground.step(truth, true, rngGround);
    }
    airborneSq += air.positionError().x() * air.positionError().x();
    groundedSq += ground.positionError().x() * ground.positionError().x();
  }
  airborneSq /= trials;
  groundedSq /= trials;
  CHECK(airborneSq > 0.06);
  CHECK(airborneSq < 0.10);
  CHECK(groundedSq < 0.001);
}

TEST_CASE("drift under contact converges to the stationary band") {
  // The grounded error is an AR(1) process with k = exp(-dt / tau); its
  // stationary variance sigma^2 / (1 - k^2) pins the decay constant. A pure
  // walk (no decay) would reach 2000 * sigma^2, twenty times larger.
  DriftConfig cfg;
  const double k = std::exp(-kActuatorDt / cfg.convergenceTau);
  const double stationary =
      cfg.positionSigma * cfg.positionSigma / (1.0 - k * k);
  const int trials = 400;
  double meanSq = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    DriftingEstimator drift(cfg, kActuatorDt);
    Rng rng(streamSeed(1300, trial));
    SimState truth;
    for (int t = 0; t < 2000; ++t) drift.step(truth, true, rng);
    meanSq += drift.positionError().x() * drift.positionError().x();
  }
  meanSq /= trials;
  CHECK(meanSq > 0.75 * stationary);
  CHECK(meanSq < 1.3 * stationary);

  // A drifted-off estimate pulls back toward truth once contact persists.
  for (int trial = 0; trial < 20; ++trial) {
    DriftingEstimator drift(cfg, kActuatorDt);
    Rng rng(streamSeed(1700, trial));
    SimState truth;
    for (int t = 0; t < 800; ++t) drift.step(truth, false, rng);
    const double lost = drift.positionError().norm();
    for (int t = 0; t < 2000; ++t) drift.step(truth, true, rng);
    const double recovered = drift.positionError().norm();
    CHECK(recovered < 0.5 * std::max(lost, 0.2));
  }
}

TEST_CASE("drift is byte-identical per seed") {
  SimState truth;
  truth.q << 0.0, 0.4, 0.1, 0.4, -0.8, -0.4, 0.8;
  auto run = [&](uint64_t seed) {
    DriftingEstimator drift(DriftConfig{}, kActuatorDt);
    Rng rng(seed);
    SimState last;
    for (int t = 0; t < 300; ++t) last = drift.step(truth, t % 5 != 0, rng);
    return last;
  };
  const SimState a = run(12);
  const SimState b = run(12);
  const SimState c = run(13);
  CHECK(bitwiseEqual(a.q, b.q));
  CHECK(bitwiseEqual(a.u, b.u));
  CHECK_FALSE(bitwiseEqual(a.q, c.q));

  CHECK_THROWS_AS(DriftingEstimator(DriftConfig{-0.1, 0.001, 10.0, 0.5},
                                    kActuatorDt),
                  std::invalid_argument);
  CHECK_THROWS_AS(DriftingEstimator(DriftConfig{0.001, 0.001, 0.5, 0.5},
                                    kActuatorDt),
                  std::invalid_argument);
  CHECK_THROWS_AS(DriftingEstimator(DriftConfig{0.001, 0.001, 10.0, 0.0},
                                    kActuatorDt),
                  std::invalid_argument);
  CHECK_THROWS_AS(DriftingEstimator(DriftConfig{}, 0.0), std::invalid_argument);
}

TEST_CASE("wrap maps angles into the half-open pi range") {
  CHECK(wrapAngle(0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(wrapAngle(0.3 + 2.0 * M_PI) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(wrapAngle(0.3 - 4.0 * M_PI) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(wrapAngle(-0.8 - 2.0 * M_PI) == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(wrapAngle(M_PI) == doctest::Approx(-M_PI));
  CHECK(wrapAngle(-M_PI) == doctest::Approx(-M_PI));
  CHECK(wrapAngle(-1.5 * M_PI) == doctest::Approx(0.5 * M_PI));
  CHECK(wrapAngle(0.0) == 0.0);
  for (double a = -9.0; a < 9.0; a += 0.37) {
    const double w = wrapAngle(a);
    CHECK(w >= -M_PI);
    CHECK(w < M_PI);
    CHECK(std::abs(std::remainder(a - w, 2.0 * M_PI)) < 1e-9);
  }
}

TEST_CASE("deployment trace has exact shape, rates, and determinism") {
  RobotModel model;
  const DeploymentStack stack = selectorStack(41);
  DeploymentConfig cfg = quickConfig(model, 0.5);
  cfg.seed = 4;

  const DeploymentTrace trace = runDeployment(stack, model, cfg);
  CHECK(trace.freezeTicks == JointHistory::kDepth);
  CHECK(trace.steps.size() == 220);
  CHECK(trace.dt == doctest::Approx(kActuatorDt));

  for (int t = 0; t < trace.freezeTicks; ++t) {
    const DeploymentStep& s = trace.steps[t];
    CHECK(s.freeze);
    CHECK(s.time < 0.0);
    CHECK(std::isnan(s.estimatedHeight));
    CHECK_FALSE(s.behaviorEvaluated);
    CHECK_FALSE(s.selectorEvaluated);
    CHECK(s.behavior == BehaviorId::SelfRight);
  }
  CHECK(trace.steps[trace.freezeTicks].time == 0.0);
  CHECK(trace.steps[trace.freezeTicks].behaviorEvaluated);
  CHECK(trace.steps[trace.freezeTicks].selectorEvaluated);

  int selectorCount = 0;
  for (const DeploymentStep& s : trace.steps) {
    if (s.freeze) continue;
    CHECK(std::isfinite(s.estimatedHeight));
    if (s.selectorEvaluated) {
      ++selectorCount;
      CHECK((s.tick - trace.freezeTicks) % 8 == 0);
    }
    CHECK(s.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(selectorCount == 25);
  CHECK(trace.decisions.size() == 25);
  checkCadence(trace);

  const DeploymentTrace again = runDeployment(stack, model, cfg);
  REQUIRE(again.steps.size() == trace.steps.size());
  CHECK(bitwiseEqual(trace.finalState.q, again.finalState.q));
  CHECK(bitwiseEqual(trace.finalState.u, again.finalState.u));
  for (std::size_t i : {std::size_t{0}, std::size_t{57}, std::size_t{219}}) {
    CHECK(bitwiseEqual(trace.steps[i].torques, again.steps[i].torques));
    CHECK(bitwiseEqual(trace.steps[i].estimatedState.q,
                       again.steps[i].estimatedState.q));
  }

  DeploymentConfig other = cfg;
  other.seed = 5;
  const DeploymentTrace different = runDeployment(stack, model, other);
  CHECK(different.steps.back().estimatedState.q[0] !=
        trace.steps.back().estimatedState.q[0]);
}

TEST_CASE("self-righting runs at twenty hertz when it stays active") {
  RobotModel model;
  const DeploymentStack stack = selfRightForeverStack(43);
  DeploymentConfig cfg = quickConfig(model, 1.0);
  cfg.initialState.q[1] = 0.5;
  cfg.initialState.q[2] = 0.5 * M_PI;

  const DeploymentTrace trace = runDeployment(stack, model, cfg);
  CHECK(trace.switchTicks.empty());
  int evals = 0;
  for (const DeploymentStep& s : trace.steps) {
    if (s.freeze) continue;
    CHECK(s.behavior == BehaviorId::SelfRight);
    if (s.behaviorEvaluated) {
      ++evals;
      CHECK((s.tick - trace.freezeTicks) % 20 == 0);
    }
    CHECK(s.probabilities[0] == 1.0);
  }
  CHECK(evals == 20);
  CHECK(trace.decisions.size() == 50);
  checkCadence(trace);
}

TEST_CASE("switches produce fresh output on the switch tick itself") {
  RobotModel model;
  DeploymentStack stack = selectorStack(47);
  stack.useFsm = true;
  stack.fsm.selfRightWait = 0.0;
  stack.fsm.standHeightLow = 0.1;
  stack.fsm.standHeightHigh = 5.0;
  stack.heightEstimator = constantNet(kHeightObsDim, 0.5);
  stack.drift.positionSigma = 0.0;
  stack.drift.velocitySigma = 0.0;

  DeploymentConfig cfg = quickConfig(model, 1.0);
  cfg.kickTime = 0.2;  // knocks the robot over mid-locomotion
  cfg.kickImpulse = Vec2(-150.0, 60.0);

  const DeploymentTrace trace = runDeployment(stack, model, cfg);
  REQUIRE(trace.switchTicks.size() >= 2);

  // First decision: upright with no settling wait, so locomotion takes over
  // on the very first selector tick.
  CHECK(trace.switchTicks[0] == trace.freezeTicks);
  // The tip-over then re-arms self-righting on a tick that is off the
  // twenty-tick boot grid, which is what forces the re-phasing.
  const std::int64_t backToSelfRight = trace.switchTicks[1];
  REQUIRE((backToSelfRight - trace.freezeTicks) % 20 != 0);

  const std::set<std::int64_t> switches(trace.switchTicks.begin(),
                                        trace.switchTicks.end());
  for (const DeploymentStep& s : trace.steps) {
    if (switches.count(s.tick)) {
      CHECK(s.behaviorEvaluated);
      CHECK(s.selectorEvaluated);
    }
  }
  const DeploymentStep& flip = trace.steps[static_cast<std::size_t>(backToSelfRight)];
  CHECK(flip.behavior == BehaviorId::SelfRight);
  checkCadence(trace);
}

TEST_CASE("policies see wrapped joint positions, actuation the true ones") {
  RobotModel model;
  DeploymentStack stack = selectorStack(53);
  stack.useFsm = true;
  stack.fsm.uprightCo = 1e-6;
  stack.behaviors[0] = jointEchoPolicy();
  stack.heightEstimator = constantNet(kHeightObsDim, 0.5);

  DeploymentConfig cfg = quickConfig(model, 0.1);
  cfg.initialState.q[1] = 1.0;
  cfg.initialState.q[2] = 0.3;
  cfg.initialState.q[3] = 0.3 + 2.0 * M_PI;
  cfg.initialState.q[4] = -0.8 - 2.0 * M_PI;
  cfg.initialState.q[5] = 2.1 - 2.0 * M_PI;
  cfg.initialState.q[6] = 0.5;

  const DeploymentTrace trace = runDeployment(stack, model, cfg);
  const DeploymentStep& first = trace.steps[static_cast<std::size_t>(trace.freezeTicks)];
  REQUIRE(first.behaviorEvaluated);
  REQUIRE(first.behavior == BehaviorId::SelfRight);

  // The freeze held the wound posture, so the raw coordinates still sit a
  // full turn out while the wrapped view is near the origin.
  CHECK(std::abs(first.trueState.q[3]) > 4.0);
  CHECK(std::abs(first.trueState.q[4]) > 4.0);

  const BehaviorTask task = behaviorTask(BehaviorId::SelfRight);
  for (int j = 0; j < kNumJoints; ++j) {
    const double raw = first.trueState.q[3 + j];
    CHECK(first.estimatedState.q[3 + j] == raw);
    const double expected = task.actionScale * wrapAngle(raw) + raw;
    CHECK(first.jointTargets[j] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("height estimate lands in the trace and the selector path") {
  RobotModel model;
  DeploymentStack stack = selectorStack(59);
  stack.heightEstimator = constantNet(kHeightObsDim, 0.42);

  const DeploymentTrace trace =
      runDeployment(stack, model, quickConfig(model, 0.2));
  for (const DeploymentStep& s : trace.steps) {
    if (s.freeze) {
      CHECK(std::isnan(s.estimatedHeight));
    } else {
      CHECK(s.estimatedHeight == doctest::Approx(0.42).epsilon(1e-12));
    }
  }
  REQUIRE(!trace.decisions.empty());
  for (const SelectorDecision& d : trace.decisions) {
    CHECK(d.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.behavior >= 0);
    CHECK(d.behavior < 3);
  }
}

TEST_CASE("kick impulse lands at the configured time") {
  RobotModel model;
  const DeploymentStack stack = selfRightForeverStack(61);
  DeploymentConfig cfg = quickConfig(model, 0.3);
  cfg.kickTime = 0.05;
  cfg.kickImpulse = Vec2(-80.0, 0.0);

  const DeploymentTrace trace = runDeployment(stack, model, cfg);
  const auto kickTick =
      static_cast<std::size_t>(trace.freezeTicks + std::llround(0.05 / trace.dt));
  const double before = trace.steps[kickTick].trueState.u[0];
  const double after = trace.steps[kickTick + 1].trueState.u[0];
  CHECK(std::abs(before) < 0.5);
  CHECK(after < -1.0);
}

TEST_CASE("deployment validation rejects broken stacks and configs") {
  RobotModel model;
  const DeploymentConfig good = quickConfig(model, 0.1);

  DeploymentStack missing = selectorStack(67);
  missing.behaviors[1] = GaussianPolicy{};
  CHECK_THROWS_AS(runDeployment(missing, model, good), std::invalid_argument);

  DeploymentStack wrongShape = selectorStack(67);
  wrongShape.behaviors[0] = tinyBehavior(BehaviorId::StandUp, 3);
  CHECK_THROWS_AS(wrongShape.validate(), std::invalid_argument);

  DeploymentStack noSelector = selectorStack(67);
  noSelector.selector = CategoricalPolicy{};
  CHECK_THROWS_AS(noSelector.validate(), std::invalid_argument);
  noSelector.useFsm = true;
  CHECK_NOTHROW(noSelector.validate());

  DeploymentStack noEstimator = selectorStack(67);
  noEstimator.heightEstimator = Mlp{};
  CHECK_THROWS_AS(noEstimator.validate(), std::invalid_argument);

  DeploymentStack badDrive = selectorStack(67);
  badDrive.actuatorNet = Mlp({6, 1}, Activation::Softsign);
  CHECK_THROWS_AS(badDrive.validate(), std::invalid_argument);

  DeploymentConfig zeroDuration = good;
  zeroDuration.duration = 0.0;
  CHECK_THROWS_AS(zeroDuration.validate(), std::invalid_argument);

  DeploymentConfig wrongRate = good;
  wrongRate.sim.dt = 0.001;
  CHECK_THROWS_AS(wrongRate.validate(), std::invalid_argument);

  DeploymentConfig badState = good;
  badState.initialState.q = VecX::Zero(5);
  CHECK_THROWS_AS(badState.validate(), std::invalid_argument);

  DeploymentConfig nanState = good;
  nanState.initialState.q[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nanState.validate(), std::invalid_argument);

  DeploymentConfig nanKick = good;
  nanKick.kickImpulse[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nanKick.validate(), std::invalid_argument);
}

TEST_CASE("trace CSV has one row per tick and a stable column count") {
  RobotModel model;
  const DeploymentTrace trace = runDeployment(selectorStack(71), model,
                                              quickConfig(model, 0.1));
  const std::string path = "runtime_trace_test.csv";
  writeTraceCsv(path, trace);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("tick,time,freeze,behavior", 0) == 0);
  int expectedFields = 1;
  for (char c : header)
    if (c == ',') ++expectedFields;
  CHECK(expectedFields == 37);

  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    int fields = 1;
    for (char c : line)
      if (c == ',') ++fields;
    CHECK(fields == expectedFields);
  }
  CHECK(rows == static_cast<int>(trace.steps.size()));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(writeTraceCsv("/nonexistent/dir/trace.csv", trace),
                  std::runtime_error);
}

TEST_CASE("recovery evaluation finds exactly the sustained windows") {
  const RecoveryThresholds th;
  std::vector<std::array<double, 3>> rows;
  for (int i = 0; i < 400; ++i) rows.push_back({1.5, 0.2, 0.0});
  for (int i = 0; i < 800; ++i) rows.push_back({0.1, 0.5, 0.5});
  const DeploymentTrace good = syntheticTrace(rows);

  const TraceEvaluation hit = evaluateTrace(good, th);
  CHECK(hit.success);
  CHECK(hit.successTime == doctest::Approx(1.0).epsilon(1e-12));

  const TraceEvaluation late = evaluateTrace(good, th, 2.0);
  CHECK(late.success);
  CHECK(late.successTime == doctest::Approx(2.0).epsilon(1e-9));

  // The window must fit: 400 nominal ticks succeed, 399 cannot.
  std::vector<std::array<double, 3>> exact(400, {0.1, 0.5, 0.5});
  CHECK(evaluateTrace(syntheticTrace(exact), th).success);
  std::vector<std::array<double, 3>> short1(399, {0.1, 0.5, 0.5});
  CHECK_FALSE(evaluateTrace(syntheticTrace(short1), th).success);

  // One bad tick in the middle poisons every window that could contain it.
  std::vector<std::array<double, 3>> holed(500, {0.1, 0.5, 0.5});
  holed[250] = {0.1, 0.9, 0.5};
  CHECK_FALSE(evaluateTrace(syntheticTrace(holed), th).success);

  // The velocity test is a window mean, not per tick.
  std::vector<std::array<double, 3>> wobble;
  for (int i = 0; i < 500; ++i)
    wobble.push_back({0.1, 0.5, i % 2 == 0 ? 0.4 : 0.6});
  CHECK(evaluateTrace(syntheticTrace(wobble), th).success);
  std::vector<std::array<double, 3>> slow(500, {0.1, 0.5, 0.2});
  CHECK_FALSE(evaluateTrace(syntheticTrace(slow), th).success);

  // The incremental scan matches a naive full rescan on every variant.
  for (const auto* rowsPtr : {&rows, &exact, &short1, &holed, &wobble, &slow}) {
    const DeploymentTrace t = syntheticTrace(*rowsPtr);
    for (double earliest : {0.0, 1.0, 2.0}) {
      const TraceEvaluation a = evaluateTrace(t, th, earliest);
      const TraceEvaluation b = naiveEvaluate(t, th, earliest);
      CHECK(a.success == b.success);
      CHECK(a.successTime == doctest::Approx(b.successTime).epsilon(1e-12));
    }
  }

  RecoveryThresholds bad;
  bad.heightLow = 0.7;
  bad.heightHigh = 0.6;
  CHECK_THROWS_AS(evaluateTrace(good, bad), std::invalid_argument);
}

TEST_CASE("benchmark pairs trials across stacks under one seed") {
  RobotModel model;
  BenchmarkConfig cfg;
  cfg.fallTrials = 2;
  cfg.kickTrials = 2;
  cfg.duration = 0.4;
  cfg.kickTime = 0.1;
  cfg.seed = 17;
  cfg.init.settleTime = 0.1;

  DeploymentStack learned = selectorStack(73);
  DeploymentStack rules = selectorStack(73);
  rules.useFsm = true;

  const BenchmarkResult a = benchmarkRecovery(learned, model, cfg);
  const BenchmarkResult b = benchmarkRecovery(rules, model, cfg);
  REQUIRE(a.outcomes.size() == 4);
  REQUIRE(b.outcomes.size() == 4);
  CHECK(a.trials == 4);

  for (int i = 0; i < 4; ++i) {
    CHECK(a.outcomes[i].kicked == (i >= 2));
    CHECK(a.outcomes[i].note.empty());
    CHECK(bitwiseEqual(a.outcomes[i].initialState.q,
                       b.outcomes[i].initialState.q));
    CHECK(bitwiseEqual(a.outcomes[i].initialState.u,
                       b.outcomes[i].initialState.u));
  }
  // Fall postures differ from each other and from the standing kick start.
  CHECK_FALSE(bitwiseEqual(a.outcomes[0].initialState.q,
                           a.outcomes[1].initialState.q));
  CHECK(bitwiseEqual(a.outcomes[2].initialState.q,
                     a.outcomes[3].initialState.q));

  // A one-second window cannot fit in a 0.4 second trial.
  CHECK(a.successes == 0);
  CHECK(a.successRate == 0.0);
  CHECK(a.meanTimeToRecovery == -1.0);

  BenchmarkConfig none = cfg;
  none.fallTrials = 0;
  none.kickTrials = 0;
  CHECK_THROWS_AS(none.validate(), std::invalid_argument);

  BenchmarkConfig lateKick = cfg;
  lateKick.kickTime = 0.4;
  CHECK_THROWS_AS(lateKick.validate(), std::invalid_argument);
  lateKick.kickTrials = 0;
  CHECK_NOTHROW(lateKick.validate());
}

}  // TEST_SUITE
