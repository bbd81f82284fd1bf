#include "upright/runtime/deploy.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "upright/actuator/actuator_net.hpp"
#include "upright/behaviors/task.hpp"
#include "upright/env/observation.hpp"
#include "upright/physics/kinematics.hpp"
#include "upright/runtime/history.hpp"
#include "upright/runtime/schedule.hpp"

namespace upright {

namespace {

constexpr std::uint64_t kDriftStream = 300;
constexpr int kSelectorSlot = 3;

double gravityDistance(const VecX& q) {
  return (Vec2(0.0, -1.0) - gravityVector(q)).norm();
}

}  // namespace

double wrapAngle(double angle) {
  const double twoPi = 2.0 * M_PI;
  double w = std::fmod(angle + M_PI, twoPi);
  if (w < 0.0) w += twoPi;
  return w - M_PI;
}

void DeploymentStack::validate() const {
  for (int b = 0; b < 3; ++b) {
    const auto id = static_cast<BehaviorId>(b);
    const GaussianPolicy& p = behaviors[b];
    if (p.mean.paramCount() == 0)
      throw std::invalid_argument(std::string("missing behavior policy ") +
                                  behaviorName(id));
    if (p.mean.inputSize() != observationSpec(id).dim() ||
        p.mean.outputSize() != kNumJoints)
      throw std::invalid_argument(
          std::string("behavior policy shape mismatch: ") + behaviorName(id));
  }
  if (useFsm) {
    fsm.validate();
  } else {
    if (selector.logits.paramCount() == 0)
      throw std::invalid_argument("missing selector network");
    if (selector.logits.inputSize() != kSelectorObsDim ||
        selector.numClasses() != 3)
      throw std::invalid_argument("selector network shape mismatch");
  }
  if (heightEstimator.paramCount() == 0)
    throw std::invalid_argument("missing height estimator");
  if (heightEstimator.inputSize() != kHeightObsDim ||
      heightEstimator.outputSize() != 1)
    throw std::invalid_argument("height estimator shape mismatch");
  if (actuatorNet.paramCount() > 0 &&
      (actuatorNet.inputSize() != kActuatorFeatureDim ||
       actuatorNet.outputSize() != 1))
    throw std::invalid_argument("drive network shape mismatch");
  drift.validate();
}

void DeploymentConfig::validate() const {
  if (duration <= 0.0) throw std::invalid_argument("duration must be > 0");
  if (!std::isfinite(velocityCommand))
    throw std::invalid_argument("velocity command must be finite");
  if (initialState.q.size() != kDof || initialState.u.size() != kDof)
    throw std::invalid_argument("initial state has wrong dimension");
  if (!initialState.finite())
    throw std::invalid_argument("initial state must be finite");
  if (std::abs(sim.dt - kActuatorDt) > 1e-12)
    throw std::invalid_argument("base step must match the actuator tick");
  if (!kickImpulse.allFinite())
    throw std::invalid_argument("kick impulse must be finite");
  sea.validate();
}

DeploymentTrace runDeployment(const DeploymentStack& stack,
                              const RobotModel& model,
                              const DeploymentConfig& cfg) {
  stack.validate();
  cfg.validate();

  const PlanarSim sim(model, cfg.sim);
  const double dt = cfg.sim.dt;
  const int freezeTicks = JointHistory::kDepth;
  const auto controlTicks =
      static_cast<std::int64_t>(std::llround(cfg.duration / dt));

  const std::array<BehaviorTask, 3> tasks{behaviorTask(BehaviorId::SelfRight),
                                          behaviorTask(BehaviorId::StandUp),
                                          behaviorTask(BehaviorId::Locomotion)};
  const BehaviorTask selectorTask = behaviorTask(BehaviorId::Selector);
  RateScheduler sched({tasks[0].substeps, tasks[1].substeps, tasks[2].substeps,
                       selectorTask.substeps});

  Rng driftRng(streamSeed(cfg.seed, kDriftStream));
  DriftingEstimator drift(stack.drift, dt);
  HistoryBuffer history;
  FsmSelector fsm(stack.fsm);

  SimState state = cfg.initialState;
  std::array<SeaState, kNumJoints> sea{};
  VecX prevAction = VecX::Zero(kNumJoints);
  VecX targets = state.q.segment(3, kNumJoints);
  BehaviorId active = BehaviorId::SelfRight;
  VecX lastProbs = VecX::Zero(3);
  lastProbs[static_cast<int>(active)] = 1.0;
  double heightEstimate = std::numeric_limits<double>::quiet_NaN();
  bool grounded = true;
  bool kicked = false;
  const bool useNet = stack.actuatorNet.paramCount() > 0;

  DeploymentTrace trace;
  trace.dt = dt;
  trace.velocityCommand = cfg.velocityCommand;
  trace.freezeTicks = freezeTicks;
  trace.steps.reserve(static_cast<std::size_t>(freezeTicks + controlTicks));

  for (std::int64_t t = 0; t < freezeTicks + controlTicks; ++t) {
    const bool freeze = t < freezeTicks;
    const double time = static_cast<double>(t - freezeTicks) * dt;
    const SimState estimated = drift.step(state, grounded, driftRng);

    DeploymentStep row;
    row.tick = t;
    row.time = time;
    row.freeze = freeze;

    if (!freeze) {
      ObservationInputs in;
      in.gravityBody = gravityVector(estimated.q);
      in.pitchRate = estimated.u[2];
      in.jointPos = estimated.q.segment(3, kNumJoints);
      for (int j = 0; j < kNumJoints; ++j)
        in.jointPos[j] = wrapAngle(in.jointPos[j]);
      in.jointVel = estimated.u.segment(3, kNumJoints);
      in.histories = &history.histories();
      in.prevAction = prevAction;
      in.baseVelBody = rotateToBase(estimated.q[2], estimated.u.head<2>());
      in.command = cfg.velocityCommand;

      heightEstimate =
          estimateHeight(stack.heightEstimator, buildHeightObservation(in));
      in.height = heightEstimate;

      if (sched.poll(kSelectorSlot)) {
        row.selectorEvaluated = true;
        BehaviorId choice;
        if (stack.useFsm) {
          FsmInputs fin;
          fin.gravityBody = in.gravityBody;
          fin.height = heightEstimate;
          fin.jointPositions = in.jointPos;
          choice = fsm.update(fin, selectorTask.substeps * dt);
          lastProbs.setZero();
          lastProbs[static_cast<int>(choice)] = 1.0;
        } else {
          in.prevBehavior = static_cast<int>(active);
          const VecX obs = buildObservation(BehaviorId::Selector, in);
          const BehaviorChoice c =
              selectBehavior(stack.selector, obs, SelectMode::Argmax);
          choice = static_cast<BehaviorId>(c.behavior);
          lastProbs = c.probabilities;
        }
        trace.decisions.push_back({time, lastProbs, static_cast<int>(choice)});
        if (choice != active) {
          trace.switchTicks.push_back(t);
          active = choice;
          sched.realign(static_cast<int>(active));
        }
      }

      if (sched.poll(static_cast<int>(active))) {
        row.behaviorEvaluated = true;
        const VecX obs = buildObservation(active, in);
        const VecX out = stack.behaviors[static_cast<int>(active)].mean.forward(obs);
        targets = mapAction(tasks[static_cast<int>(active)], model, out,
                            state.q.segment(3, kNumJoints));
        prevAction = out;
      }
      sched.advance();
    }

    row.behavior = active;
    row.trueState = state;
    row.estimatedState = estimated;
    row.estimatedHeight = heightEstimate;
    row.co = gravityDistance(state.q);
    row.probabilities = lastProbs;
    row.jointTargets = targets;

    history.push(targets - state.q.segment(3, kNumJoints),
                 state.u.segment(3, kNumJoints));
    VecX tau = VecX::Zero(kNumJoints);
    for (int j = 0; j < kNumJoints; ++j) {
      if (useNet) {
        tau[j] = actuatorNetTorque(stack.actuatorNet,
                                   actuatorFeatures(targets[j], history.joint(j)),
                                   model.torqueLimit);
      } else {
        tau[j] = seaTorque(cfg.sea, targets[j], state.q[3 + j],
                           state.u[3 + j], sea[j]);
      }
    }
    row.torques = tau;

    if (!freeze && !kicked && cfg.kickTime >= 0.0 && time >= cfg.kickTime) {
      VecX imp = VecX::Zero(kDof);
      imp.head<2>() = cfg.kickImpulse;
      state.u += sim.massMatrix(state.q).ldlt().solve(imp);
      kicked = true;
    }

    const ContactReport report = sim.step(state, tau);
    grounded = !report.external.empty();
    trace.steps.push_back(std::move(row));
  }

  trace.finalState = state;
  return trace;
}

void writeTraceCsv(const std::string& path, const DeploymentTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  out << "tick,time,freeze,behavior,behavior_evaluated,selector_evaluated";
  out << ",x,z,pitch";
  for (int j = 0; j < kNumJoints; ++j) out << ",q" << j;
  out << ",vx,vz,pitch_rate";
  for (int j = 0; j < kNumJoints; ++j) out << ",dq" << j;
  out << ",est_x,est_z,est_vx,est_vz,est_height,co,p0,p1,p2";
  for (int j = 0; j < kNumJoints; ++j) out << ",target" << j;
  for (int j = 0; j < kNumJoints; ++j) out << ",torque" << j;
  out << "\n";
  out << std::setprecision(10);
  for (const DeploymentStep& s : trace.steps) {
    out << s.tick << "," << s.time << "," << (s.freeze ? 1 : 0) << ","
        << static_cast<int>(s.behavior) << "," << (s.behaviorEvaluated ? 1 : 0)
        << "," << (s.selectorEvaluated ? 1 : 0);
    out << "," << s.trueState.q[0] << "," << s.trueState.q[1] << ","
        << s.trueState.q[2];
    for (int j = 0; j < kNumJoints; ++j) out << "," << s.trueState.q[3 + j];
    out << "," << s.trueState.u[0] << "," << s.trueState.u[1] << ","
        << s.trueState.u[2];
    for (int j = 0; j < kNumJoints; ++j) out << "," << s.trueState.u[3 + j];
    out << "," << s.estimatedState.q[0] << "," << s.estimatedState.q[1] << ","
        << s.estimatedState.u[0] << "," << s.estimatedState.u[1];
    out << "," << s.estimatedHeight << "," << s.co;
    for (int i = 0; i < 3; ++i) out << "," << s.probabilities[i];
    for (int j = 0; j < kNumJoints; ++j) out << "," << s.jointTargets[j];
    for (int j = 0; j < kNumJoints; ++j) out << "," << s.torques[j];
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing trace file " + path);
}

void RecoveryThresholds::validate() const {
  if (uprightCo <= 0.0) throw std::invalid_argument("upright bound must be > 0");
  if (heightLow >= heightHigh)
    throw std::invalid_argument("height band must have low < high");
  if (velocityTol <= 0.0)
    throw std::invalid_argument("velocity tolerance must be > 0");
  if (window <= 0.0) throw std::invalid_argument("window must be > 0");
}

TraceEvaluation evaluateTrace(const DeploymentTrace& trace,
                              const RecoveryThresholds& thresholds,
                              double earliestStart) {
  thresholds.validate();
  if (trace.dt <= 0.0) throw std::invalid_argument("trace has no time base");
  const auto window =
      static_cast<std::ptrdiff_t>(std::llround(thresholds.window / trace.dt));
  if (window < 1) throw std::invalid_argument("window shorter than one tick");

  std::vector<const DeploymentStep*> rows;
  rows.reserve(trace.steps.size());
  for (const DeploymentStep& s : trace.steps)
    if (!s.freeze) rows.push_back(&s);

  TraceEvaluation result;
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
  if (n < window) return result;

  std::ptrdiff_t postureOk = 0;
  double velErrSum = 0.0;
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    const DeploymentStep& in = *rows[e];
    const bool ok = in.co < thresholds.uprightCo &&
                    in.trueState.q[1] >= thresholds.heightLow &&
                    in.trueState.q[1] <= thresholds.heightHigh;
    postureOk += ok ? 1 : 0;
    velErrSum += std::abs(in.trueState.u[0] - trace.velocityCommand);
    if (e >= window) {
      const DeploymentStep& gone = *rows[e - window];
      const bool wasOk = gone.co < thresholds.uprightCo &&
                         gone.trueState.q[1] >= thresholds.heightLow &&
                         gone.trueState.q[1] <= thresholds.heightHigh;
      postureOk -= wasOk ? 1 : 0;
      velErrSum -= std::abs(gone.trueState.u[0] - trace.velocityCommand);
    }
    if (e < window - 1) continue;
    const double startTime = rows[e - window + 1]->time;
    if (startTime < earliestStart) continue;
    if (postureOk == window &&
        velErrSum / static_cast<double>(window) < thresholds.velocityTol) {
      result.success = true;
      result.successTime = startTime;
      break;
    }
  }
  return result;
}

}  // namespace upright
