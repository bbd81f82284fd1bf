#include "upright/runtime/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace upright {

void DriftConfig::validate() const {
  if (positionSigma < 0.0 || velocitySigma < 0.0)
    throw std::invalid_argument("drift sigma must be >= 0");
  if (airborneFactor < 1.0)
    throw std::invalid_argument("airborne factor must be >= 1");
  if (convergenceTau <= 0.0)
    throw std::invalid_argument("convergence tau must be > 0");
}

DriftingEstimator::DriftingEstimator(DriftConfig cfg, double dt)
    : cfg_(cfg), dt_(dt) {
  cfg_.validate();
  if (dt <= 0.0) throw std::invalid_argument("drift dt must be > 0");
}

SimState DriftingEstimator::step(const SimState& truth, bool grounded,
                                 Rng& rng) {
  if (truth.q.size() != kDof || truth.u.size() != kDof)
    throw std::invalid_argument("drift input state has wrong dimension");
  if (grounded) {
    const double decay = std::exp(-dt_ / cfg_.convergenceTau);
    posErr_ *= decay;
    velErr_ *= decay;
  }
  const double scale = grounded ? 1.0 : cfg_.airborneFactor;
  if (cfg_.positionSigma > 0.0) {
    const double s = scale * cfg_.positionSigma;
    posErr_.x() += rng.normal(0.0, s);
    posErr_.y() += rng.normal(0.0, s);
  }
  if (cfg_.velocitySigma > 0.0) {
    const double s = scale * cfg_.velocitySigma;
    velErr_.x() += rng.normal(0.0, s);
    velErr_.y() += rng.normal(0.0, s);
  }
  SimState est = truth;
  est.q[0] += posErr_.x();
  est.q[1] += posErr_.y();
  est.u[0] += velErr_.x();
  est.u[1] += velErr_.y();
  return est;
}

void DriftingEstimator::reset() {
  posErr_.setZero();
  velErr_.setZero();
}

}  // namespace upright
