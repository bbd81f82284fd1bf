#include "upright/env/environment.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "upright/physics/kinematics.hpp"

namespace upright {

namespace {
constexpr uint64_t kDynamicsStream = 0;
constexpr uint64_t kNoiseStream = 1;
}  // namespace

void EnvConfig::validate() const {
  randomization.validate();
  init.validate();
  sea.validate();
  weights.validate();
  if (!(sim.dt > 0.0))
    throw std::invalid_argument("EnvConfig: sim.dt must be positive");
  if (!(timeLimit > 0.0))
    throw std::invalid_argument("EnvConfig: timeLimit must be positive");
  if (!(fallHeight > 0.0) || !(fallPitch > 0.0) || !(fallDuration >= 0.0))
    throw std::invalid_argument("EnvConfig: bad fall thresholds");
  if (!(curriculumFactor > 0.0) || curriculumFactor > 1.0)
    throw std::invalid_argument("EnvConfig: curriculumFactor in (0, 1] required");
}

CostWeights defaultWeights(BehaviorId task) {
  CostWeights w;
  w.alphaA = 1.5;
  w.alphaL = 2.5;
  w.kAd = 0.3;
  w.kJslim = 1.0;
  w.kTau = 0.002;
  switch (task) {
    case BehaviorId::SelfRight:
      w.kO = 6.0;
      w.kJp = 0.5;
      w.kBi = 0.5;
      w.kBs = 0.25;
      w.kCin = 0.5;
      w.kA = 2e-5;
      break;
    case BehaviorId::StandUp:
      w.kO = 6.0;
      w.kJp = 1.0;
      w.kH = 3.0;
      w.kA = 2e-5;
      break;
    case BehaviorId::Locomotion:
      w.kOmega = 2.0;
      w.kV = 5.0;
      w.kO = 3.0;
      w.kFc = 1.0;
      w.kFs = 0.3;
      break;
    case BehaviorId::Selector:
      w.kOmega = 2.0;
      w.kV = 5.0;
      w.kO = 3.0;
      w.kH = 3.0;
      w.kPw = 0.004;
      break;
  }
  return w;
}

EnvConfig defaultEnvConfig(BehaviorId task) {
  EnvConfig cfg;
  cfg.weights = defaultWeights(task);
  switch (task) {
    case BehaviorId::SelfRight: cfg.timeLimit = 6.0; break;
    case BehaviorId::StandUp: cfg.timeLimit = 3.0; break;
    case BehaviorId::Locomotion: cfg.timeLimit = 8.0; break;
    case BehaviorId::Selector: cfg.timeLimit = 10.0; break;
  }
  return cfg;
}

Environment::Environment(BehaviorId task, RobotModel nominal, EnvConfig config,
                         uint64_t seed)
    : task_(task),
      nominal_(std::move(nominal)),
      cfg_(std::move(config)),
      taskInfo_(behaviorTask(task)),
      rng_(streamSeed(seed, kDynamicsStream)),
      noiseRng_(streamSeed(seed, kNoiseStream)),
      kC_(cfg_.curriculumFactor) {
  nominal_.validate();
  cfg_.validate();
  limitTicks_ = std::lround(cfg_.timeLimit / cfg_.sim.dt);
  model_ = nominal_;
  prevAction_ = VecX::Zero(kNumJoints);
  prevChoiceOneHot_ = VecX::Zero(3);
  currentTargets_ = VecX::Zero(kNumJoints);
  lastHeightObs_ = VecX::Zero(kHeightObsDim);
}

void Environment::setActuatorNet(Mlp net) {
  if (net.inputSize() != kActuatorFeatureDim || net.outputSize() != 1)
    throw std::invalid_argument("Environment: actuator net shape mismatch");
  actuatorNet_ = std::move(net);
  useNet_ = true;
}

void Environment::useAnalyticDrive() { useNet_ = false; }

void Environment::setBehaviorPolicy(BehaviorId id, GaussianPolicy policy) {
  int i = static_cast<int>(id);
  if (i < 0 || i > 2)
    throw std::invalid_argument("Environment: not a behavior id");
  policies_[i] = std::move(policy);
}

void Environment::setHeightProvider(
    std::function<double(const VecX&)> provider) {
  heightProvider_ = std::move(provider);
}

void Environment::setCurriculumFactor(double kc) {
  if (!(kc > 0.0) || kc > 1.0)
    throw std::invalid_argument("Environment: curriculum factor in (0, 1]");
  kC_ = kc;
}

void Environment::setVelocityCommand(double command) { command_ = command; }

void Environment::queueImpulse(const Vec2& impulse) {
  pendingImpulse_ += impulse;
}

void Environment::overrideState(const SimState& state) {
  if (state.q.size() != kDof || state.u.size() != kDof)
    throw std::invalid_argument("Environment: state dimension mismatch");
  state_ = state;
}

int Environment::observationSize() const {
  return observationSpec(task_).dim();
}

VecX Environment::reset() {
  model_ = randomizeModel(nominal_, cfg_.randomization, rng_);
  BehaviorId component = task_;
  state_ = sampleInitialState(model_, task_, cfg_.init, rng_, &component);
  bool usesCommand =
      task_ == BehaviorId::Locomotion || task_ == BehaviorId::Selector;
  command_ = usesCommand ? sampleVelocityCommand(rng_) : 0.0;

  for (auto& s : sea_) s = SeaState{};
  for (int j = 0; j < kNumJoints; ++j) hist_[j].fill(0.0, state_.u[3 + j]);
  prevAction_ = VecX::Zero(kNumJoints);
  prevChoiceOneHot_ = VecX::Zero(3);
  prevBehavior_ = -1;
  if (task_ == BehaviorId::Selector) {
    prevBehavior_ = static_cast<int>(component);
    prevChoiceOneHot_[prevBehavior_] = 1.0;
  }
  activeBehavior_ = -1;
  behaviorPhase_ = 0;
  currentTargets_ = state_.q.segment(3, kNumJoints);
  report_ = ContactReport{};
  pendingImpulse_.setZero();
  tick_ = 0;
  fallTicks_ = 0;
  started_ = true;
  done_ = false;
  return policyObservation(task_, prevAction_, prevBehavior_);
}

ObservationInputs Environment::inputsNow(const VecX& prevAction,
                                         int prevBehavior, double height) {
  ObservationInputs in;
  in.gravityBody = gravityVector(state_.q);
  in.pitchRate = state_.u[2];
  in.jointPos = state_.q.segment(3, kNumJoints);
  in.jointVel = state_.u.segment(3, kNumJoints);
  in.histories = &hist_;
  in.prevAction = prevAction;
  in.baseVelBody = rotateToBase(state_.q[2], Vec2(state_.u[0], state_.u[1]));
  in.command = command_;
  in.height = height;
  in.prevBehavior = prevBehavior;
  return in;
}

double Environment::captureHeightObs() {
  VecX clean = buildHeightObservation(inputsNow(prevAction_, -1, 0.0));
  lastHeightObs_ =
      cfg_.observationNoise
          ? perturbHeightObservation(clean, cfg_.randomization, noiseRng_)
          : clean;
  double h = trueHeight();
  if (cfg_.observationNoise) {
    double amp = cfg_.randomization.noiseHeight *
                 (airborne() ? cfg_.randomization.airborneFactor : 1.0);
    if (amp > 0.0) h += noiseRng_.uniform(-amp, amp);
  }
  if (heightProvider_) h = heightProvider_(lastHeightObs_);
  return h;
}

VecX Environment::policyObservation(BehaviorId behavior,
                                    const VecX& prevAction, int prevBehavior) {
  double h = captureHeightObs();
  VecX obs = buildObservation(behavior, inputsNow(prevAction, prevBehavior, h));
  if (cfg_.observationNoise)
    obs = perturbObservation(behavior, obs, airborne(), cfg_.randomization,
                             noiseRng_);
  return obs;
}

void Environment::substep(const PlanarSim& sim, const VecX& targets,
                          VecX& tauSum, VecX& tauSqSum) {
  VecX tau(kNumJoints);
  for (int j = 0; j < kNumJoints; ++j) {
    hist_[j].push(targets[j] - state_.q[3 + j], state_.u[3 + j]);
    if (useNet_) {
      tau[j] = actuatorNetTorque(
          actuatorNet_, actuatorFeatures(targets[j], hist_[j]),
          model_.torqueLimit);
    } else {
      tau[j] = seaTorque(cfg_.sea, targets[j], state_.q[3 + j],
                         state_.u[3 + j], sea_[j]);
    }
  }
  if (pendingImpulse_.squaredNorm() > 0.0) {
    VecX imp = VecX::Zero(kDof);
    imp.head<2>() = pendingImpulse_;
    state_.u += sim.massMatrix(state_.q).ldlt().solve(imp);
    pendingImpulse_.setZero();
  }
  report_ = sim.step(state_, tau);
  tauSum += tau;
  tauSqSum += tau.cwiseProduct(tau);
  ++tick_;
}

CostTargets Environment::costTargets() const {
  CostTargets t;
  t.joints = VecX(kNumJoints);
  const auto& joints = task_ == BehaviorId::SelfRight ? model_.sittingJoints
                                                      : model_.nominalJoints;
  for (int j = 0; j < kNumJoints; ++j) t.joints[j] = joints[j];
  if (task_ == BehaviorId::Locomotion || task_ == BehaviorId::Selector)
    t.v = Vec2(command_, 0.0);
  return t;
}

Environment::StepResult Environment::finishStep(
    const VecX& prevCostAction, const VecX& costAction, const VecX& tauSum,
    const VecX& tauSqSum, const VecX& jointVelBefore, int substeps) {
  StepResult r;
  // torque magnitude as the per-joint RMS over the step, signed by the mean,
  // so the squared-torque cost averages the instantaneous one exactly
  VecX tau(kNumJoints);
  for (int j = 0; j < kNumJoints; ++j) {
    double rms = std::sqrt(tauSqSum[j] / substeps);
    tau[j] = std::copysign(rms, tauSum[j]);
  }
  double period = substeps * cfg_.sim.dt;
  VecX accel = (state_.u.segment(3, kNumJoints) - jointVelBefore) / period;

  r.terms = evalCostTerms(model_, state_, report_, tau, accel, prevCostAction,
                          costAction, costTargets(), cfg_.weights);
  r.reward = -compositeCost(task_, r.terms, cfg_.weights, kC_);
  r.time = state_.time;

  bool failed = false;
  if (task_ == BehaviorId::Locomotion) {
    for (int j = 0; j < kNumJoints; ++j)
      if (std::abs(state_.q[3 + j]) > model_.jointLimit) failed = true;
    bool falling = trueHeight() < cfg_.fallHeight ||
                   std::abs(state_.q[2]) > cfg_.fallPitch;
    fallTicks_ = falling ? fallTicks_ + substeps : 0;
    if (fallTicks_ * cfg_.sim.dt > cfg_.fallDuration) failed = true;
  }
  if (failed) {
    r.done = true;
  } else if (tick_ >= limitTicks_) {
    r.done = true;
    r.truncated = true;
  }
  done_ = r.done;
  return r;
}

Environment::StepResult Environment::primitiveStep(const VecX& action) {
  VecX targets =
      mapAction(taskInfo_, model_, action, state_.q.segment(3, kNumJoints));
  PlanarSim sim(model_, cfg_.sim);
  VecX jointVelBefore = state_.u.segment(3, kNumJoints);
  VecX tauSum = VecX::Zero(kNumJoints);
  VecX tauSqSum = VecX::Zero(kNumJoints);
  for (int s = 0; s < taskInfo_.substeps; ++s)
    substep(sim, targets, tauSum, tauSqSum);

  StepResult r = finishStep(prevAction_, action, tauSum, tauSqSum,
                            jointVelBefore, taskInfo_.substeps);
  prevAction_ = action;
  r.observation = policyObservation(task_, prevAction_, prevBehavior_);
  return r;
}

Environment::StepResult Environment::selectorStep(const VecX& action) {
  int choice = static_cast<int>(std::lround(action[0]));
  if (choice < 0 || choice > 2)
    throw std::invalid_argument("Environment: selector choice out of range");
  if (!policies_[choice])
    throw std::logic_error("Environment: behavior policy missing");

  VecX onehot = VecX::Zero(3);
  onehot[choice] = 1.0;
  if (choice != activeBehavior_) {
    activeBehavior_ = choice;
    behaviorPhase_ = 0;
  }
  BehaviorTask inner = behaviorTask(static_cast<BehaviorId>(choice));
  PlanarSim sim(model_, cfg_.sim);
  VecX jointVelBefore = state_.u.segment(3, kNumJoints);
  VecX tauSum = VecX::Zero(kNumJoints);
  VecX tauSqSum = VecX::Zero(kNumJoints);
  for (int s = 0; s < taskInfo_.substeps; ++s) {
    if (behaviorPhase_ % inner.substeps == 0) {
      VecX obs = policyObservation(static_cast<BehaviorId>(choice),
                                   prevAction_, -1);
      VecX out = policies_[choice]->sample(obs, rng_, true);
      currentTargets_ =
          mapAction(inner, model_, out, state_.q.segment(3, kNumJoints));
      prevAction_ = out;
    }
    substep(sim, currentTargets_, tauSum, tauSqSum);
    ++behaviorPhase_;
  }

  StepResult r = finishStep(prevChoiceOneHot_, onehot, tauSum, tauSqSum,
                            jointVelBefore, taskInfo_.substeps);
  prevChoiceOneHot_ = onehot;
  prevBehavior_ = choice;
  r.observation = policyObservation(task_, prevAction_, prevBehavior_);
  return r;
}

Environment::StepResult Environment::step(const VecX& action) {
  if (!started_) throw std::logic_error("Environment: reset required");
  if (done_) throw std::logic_error("Environment: step after episode end");
  if (action.size() != actionSize())
    throw std::invalid_argument("Environment: action dimension mismatch");
  if (!action.allFinite())
    throw std::invalid_argument("Environment: non-finite action");

  model_.friction = sampleFriction(cfg_.randomization, rng_);
  return task_ == BehaviorId::Selector ? selectorStep(action)
                                       : primitiveStep(action);
}

}  // namespace upright
