#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "upright/actuator/actuator_net.hpp"
#include "upright/common/rng.hpp"

namespace upright {

ActuatorDataset generateActuatorDataset(const SeaParams& params, int samples,
                                        uint64_t seed) {
  params.validate();
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  Rng rng(seed);

  ActuatorDataset data;
  data.features.resize(samples, kActuatorFeatureDim);
  data.torques.resize(samples);

  const double inertia = 0.08;  // lumped link inertia seen by one joint
  const double viscous = 0.4;
  const int episodeTicks = 1000;

  int produced = 0;
  while (produced < samples) {
    double pos = rng.uniform(-1.5, 1.5);
    double vel = rng.uniform(-2.0, 2.0);
    SeaState drive;
    JointHistory history;
    history.fill(0.0, vel);

    const double f0 = rng.uniform(0.2, 1.0);
    const double f1 = rng.uniform(1.0, 8.0);
    const double amplitude = rng.uniform(0.2, 1.2);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    double offset = rng.uniform(-1.0, 1.0);

    for (int k = 0; k < episodeTicks && produced < samples; ++k) {
      const double t = k * kActuatorDt;
      const double sweep = f0 + (f1 - f0) * t / (episodeTicks * kActuatorDt);
      if (rng.uniform(0.0, 1.0) < 0.004) offset = rng.uniform(-1.5, 1.5);
      const double target =
          offset + amplitude * std::sin(2.0 * M_PI * sweep * t + phase);

      history.push(target - pos, vel);
      const double torque = seaTorque(params, target, pos, vel, drive);
      if (k >= JointHistory::kDepth && k % 3 == 0) {
        data.features.row(produced) =
            actuatorFeatures(target, history).transpose();
        data.torques(produced) = torque;
        ++produced;
      }
      const double accel = (torque - viscous * vel) / inertia;
      vel += kActuatorDt * accel;
      pos += kActuatorDt * vel;
    }
  }
  return data;
}

void writeActuatorDatasetCsv(const ActuatorDataset& dataset,
                             const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "target,e0,e1,e2,v0,v1,v2,torque\n");
  for (int i = 0; i < dataset.features.rows(); ++i) {
    for (int j = 0; j < dataset.features.cols(); ++j) {
      std::fprintf(f, "%.17g,", dataset.features(i, j));
    }
    std::fprintf(f, "%.17g\n", dataset.torques(i));
  }
  std::fclose(f);
}

}  // namespace upright
