#include "upright/selector/fsm.hpp"

#include <stdexcept>

namespace upright {

void FsmConfig::validate() const {
  if (!(uprightCo > 0.0))
    throw std::invalid_argument("FsmConfig: uprightCo must be positive");
  if (uprightHysteresis < 0.0 || heightHysteresis < 0.0)
    throw std::invalid_argument("FsmConfig: hysteresis must be >= 0");
  if (!(standHeightLow > 0.0) || !(standHeightHigh > standHeightLow))
    throw std::invalid_argument("FsmConfig: bad standing height band");
  if (selfRightWait < 0.0)
    throw std::invalid_argument("FsmConfig: selfRightWait must be >= 0");
}

FsmSelector::FsmSelector(FsmConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void FsmSelector::reset() {
  current_ = BehaviorId::SelfRight;
  upright_ = false;
  uprightTime_ = 0.0;
}

bool FsmSelector::inStandBand(double height) const {
  return height >= cfg_.standHeightLow && height <= cfg_.standHeightHigh;
}

BehaviorId FsmSelector::update(const FsmInputs& in, double dt) {
  if (dt < 0.0) throw std::invalid_argument("FsmSelector: dt must be >= 0");

  const double co = (Vec2(0.0, -1.0) - in.gravityBody).norm();
  if (upright_) {
    if (co > cfg_.uprightCo + cfg_.uprightHysteresis) upright_ = false;
  } else {
    if (co < cfg_.uprightCo) upright_ = true;
  }

  if (!upright_) {
    current_ = BehaviorId::SelfRight;
    uprightTime_ = 0.0;
    return current_;
  }

  switch (current_) {
    case BehaviorId::SelfRight:
      uprightTime_ += dt;
      if (uprightTime_ >= cfg_.selfRightWait)
        current_ = inStandBand(in.height) ? BehaviorId::Locomotion
                                          : BehaviorId::StandUp;
      break;
    case BehaviorId::StandUp:
      if (inStandBand(in.height)) current_ = BehaviorId::Locomotion;
      break;
    case BehaviorId::Locomotion:
      if (in.height < cfg_.standHeightLow - cfg_.heightHysteresis ||
          in.height > cfg_.standHeightHigh + cfg_.heightHysteresis)
        current_ = BehaviorId::StandUp;
      break;
    case BehaviorId::Selector:
      break;
  }
  return current_;
}

}  // namespace upright
