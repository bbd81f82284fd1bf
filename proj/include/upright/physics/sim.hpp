#pragma once

#include "upright/physics/collision.hpp"
#include "upright/physics/model.hpp"
#include "upright/physics/solver.hpp"
#include "upright/physics/types.hpp"

namespace upright {

struct SimParams {
  double dt = 0.0025;  ///< 400 Hz base step

  PgsSettings pgs{};
  double baumgarte = 0.2;             ///< penetration recovery gain
  double slop = 1e-3;                 ///< penetration tolerated without pushback
  double maxCorrectionVelocity = 0.5; ///< cap on the pushback speed [m/s]
  double contactMargin = 0.05;        ///< candidates beyond this gap are dropped
};

/// Sagittal-plane articulated rigid body simulation on a flat ground plane.
///
/// Dynamics are integrated at velocity level: joint torques and bias forces
/// produce a free velocity, contact impulses project it onto the admissible
/// set, and positions advance with the midpoint of the old and new velocity
/// (which keeps ballistic trajectories exact).
class PlanarSim {
 public:
  explicit PlanarSim(RobotModel model, SimParams params = {});

  /// Advance one step under the given joint torques (clamped to the model's
  /// torque limit). Throws std::runtime_error if the state goes non-finite.
  ContactReport step(SimState& state, const VecX& jointTorques) const;

  MatX massMatrix(const VecX& q) const;

  /// Gravity plus velocity-product generalized forces, sign such that
  /// M du = S^T tau - h + J^T lambda.
  VecX nonlinearEffects(const VecX& q, const VecX& u) const;

  /// Total mechanical energy (kinetic + gravitational, ground at zero).
  double energy(const SimState& state) const;

  /// Generalized momentum M u; rows 0/1 are linear momentum.
  VecX momentum(const SimState& state) const;

  double totalMass() const;

  const RobotModel& model() const { return model_; }
  const SimParams& params() const { return params_; }

 private:
  RobotModel model_;
  SimParams params_;
};

}  // namespace upright
