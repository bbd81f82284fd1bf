#pragma once

#include "upright/common/rng.hpp"
#include "upright/physics/types.hpp"

namespace upright {

/// Odometry error model for the deployed state estimate. Base translation
/// and translational velocity accumulate a random walk that inflates while
/// the robot is airborne and decays toward truth under sustained ground
/// contact; pitch, pitch rate, and joint channels come from the IMU and
/// encoders and pass through untouched.
struct DriftConfig {
  double positionSigma = 0.001;  ///< m of walk per sqrt(tick) on the ground
  double velocitySigma = 0.001;  ///< m/s of walk per sqrt(tick) on the ground
  double airborneFactor = 10.0;  ///< walk scale with no external contact
  double convergenceTau = 0.5;   ///< s, error decay constant while grounded

  void validate() const;  ///< throws std::invalid_argument on bad values
};

class DriftingEstimator {
 public:
  /// dt is the base-rate period the per-tick sigmas are calibrated to.
  DriftingEstimator(DriftConfig cfg, double dt);

  /// One base-rate update. Grounded ticks first decay the stored error by
  /// exp(-dt / tau), then both regimes add fresh walk noise (scaled by the
  /// airborne factor when not grounded). Draw order is x, z position then
  /// x, z velocity; a channel with zero sigma draws nothing. Returns the
  /// truth with the accumulated error added onto the base translation.
  SimState step(const SimState& truth, bool grounded, Rng& rng);

  Vec2 positionError() const { return posErr_; }
  Vec2 velocityError() const { return velErr_; }
  void reset();

 private:
  DriftConfig cfg_;
  double dt_;
  Vec2 posErr_ = Vec2::Zero();
  Vec2 velErr_ = Vec2::Zero();
};

}  // namespace upright
