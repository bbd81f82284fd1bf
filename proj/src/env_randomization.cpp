#include "upright/env/randomization.hpp"

#include <stdexcept>

namespace upright {

namespace {

void requireNonNegative(double v, const char* name) {
  if (!(v >= 0.0))
    throw std::invalid_argument(std::string("RandomizationConfig: ") + name +
                                " must be non-negative");
}

double jitter(double bound, Rng& rng) {
  return bound > 0.0 ? rng.uniform(-bound, bound) : 0.0;
}

void addNoise(VecX& obs, int offset, int size, double amplitude, Rng& rng) {
  if (amplitude <= 0.0) return;
  for (int i = 0; i < size; ++i)
    obs[offset + i] += rng.uniform(-amplitude, amplitude);
}

}  // namespace

void RandomizationConfig::validate() const {
  requireNonNegative(massFraction, "massFraction");
  if (massFraction >= 1.0)
    throw std::invalid_argument("RandomizationConfig: massFraction < 1 required");
  requireNonNegative(comShift, "comShift");
  requireNonNegative(shapeFraction, "shapeFraction");
  if (shapeFraction >= 1.0)
    throw std::invalid_argument("RandomizationConfig: shapeFraction < 1 required");
  if (!(frictionLow > 0.0) || !(frictionHigh >= frictionLow))
    throw std::invalid_argument("RandomizationConfig: bad friction range");
  requireNonNegative(noiseLinVel, "noiseLinVel");
  requireNonNegative(noiseAngVel, "noiseAngVel");
  requireNonNegative(noiseJointVel, "noiseJointVel");
  requireNonNegative(noiseJointPos, "noiseJointPos");
  requireNonNegative(noiseHeight, "noiseHeight");
  if (!(airborneFactor >= 1.0))
    throw std::invalid_argument("RandomizationConfig: airborneFactor >= 1 required");
}

RobotModel randomizeModel(const RobotModel& nominal,
                          const RandomizationConfig& cfg, Rng& rng) {
  cfg.validate();
  RobotModel m = nominal;

  // masses first, inertias scale with them so density stays plausible
  double fBase = 1.0 + jitter(cfg.massFraction, rng);
  double fThigh = 1.0 + jitter(cfg.massFraction, rng);
  double fShank = 1.0 + jitter(cfg.massFraction, rng);
  m.baseMass *= fBase;
  m.baseInertia *= fBase;
  m.thigh.mass *= fThigh;
  m.thigh.inertia *= fThigh;
  m.shank.mass *= fShank;
  m.shank.inertia *= fShank;

  m.baseCom.x() += jitter(cfg.comShift, rng);
  m.baseCom.y() += jitter(cfg.comShift, rng);

  m.baseHalfExtents.x() *= 1.0 + jitter(cfg.shapeFraction, rng);
  m.baseHalfExtents.y() *= 1.0 + jitter(cfg.shapeFraction, rng);
  m.thigh.radius *= 1.0 + jitter(cfg.shapeFraction, rng);
  m.shank.radius *= 1.0 + jitter(cfg.shapeFraction, rng);
  m.footRadius *= 1.0 + jitter(cfg.shapeFraction, rng);

  m.friction = sampleFriction(cfg, rng);
  m.validate();
  return m;
}

double sampleFriction(const RandomizationConfig& cfg, Rng& rng) {
  if (cfg.frictionHigh == cfg.frictionLow) return cfg.frictionLow;
  return rng.uniform(cfg.frictionLow, cfg.frictionHigh);
}

double sampleVelocityCommand(Rng& rng) { return rng.uniform(-1.0, 1.0); }

VecX perturbObservation(BehaviorId behavior, const VecX& obs, bool airborne,
                        const RandomizationConfig& cfg, Rng& rng) {
  ObservationSpec spec = observationSpec(behavior);
  if (obs.size() != spec.dim())
    throw std::invalid_argument("perturbObservation: dimension mismatch");

  double air = airborne ? cfg.airborneFactor : 1.0;
  VecX out = obs;
  int i = 0;
  for (const auto& block : spec.blocks) {
    if (block.name == "base_velocity")
      addNoise(out, i, block.size, cfg.noiseLinVel * air, rng);
    else if (block.name == "angular_velocity")
      addNoise(out, i, block.size, cfg.noiseAngVel, rng);
    else if (block.name == "joint_positions")
      addNoise(out, i, block.size, cfg.noiseJointPos, rng);
    else if (block.name == "joint_velocities")
      addNoise(out, i, block.size, cfg.noiseJointVel, rng);
    i += block.size;
  }
  return out;
}

VecX perturbHeightObservation(const VecX& obs, const RandomizationConfig& cfg,
                              Rng& rng) {
  ObservationSpec spec = heightEstimatorSpec();
  if (obs.size() != spec.dim())
    throw std::invalid_argument("perturbHeightObservation: dimension mismatch");

  VecX out = obs;
  addNoise(out, spec.offsetOf("joint_positions"), kNumJoints,
           cfg.noiseJointPos, rng);
  addNoise(out, spec.offsetOf("joint_velocities"), kNumJoints,
           cfg.noiseJointVel, rng);
  return out;
}

}  // namespace upright
