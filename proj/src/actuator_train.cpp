#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "upright/actuator/actuator_net.hpp"
#include "upright/common/rng.hpp"
#include "upright/nets/adam.hpp"

namespace upright {

namespace {

/// Rewrites the first layer to absorb (x - mu) / sigma and the last layer to
/// absorb the output scale, so the net runs on raw units afterwards.
void foldNormalization(Mlp& net, const VecX& mu, const VecX& sigma,
                       double outScale) {
  const auto& sizes = net.sizes();
  VecX flat = net.params();

  const int rows0 = sizes[1], cols0 = sizes[0];
  for (int i = 0; i < rows0; ++i) {
    double shift = 0.0;
    for (int j = 0; j < cols0; ++j) {
      double& w = flat(i * cols0 + j);
      w /= sigma(j);
      shift += w * mu(j);
    }
    flat(rows0 * cols0 + i) -= shift;
  }

  int lastOffset = 0;
  for (size_t l = 0; l + 2 < sizes.size(); ++l) {
    lastOffset += sizes[l + 1] * sizes[l] + sizes[l + 1];
  }
  const int lastCount =
      sizes.back() * sizes[sizes.size() - 2] + sizes.back();
  flat.segment(lastOffset, lastCount) *= outScale;

  net.setParams(flat);
}

double rmsError(const Mlp& net, const ActuatorDataset& data,
                const std::vector<int>& idx, double torqueLimit) {
  double acc = 0.0;
  for (int i : idx) {
    const double pred =
        actuatorNetTorque(net, data.features.row(i).transpose(), torqueLimit);
    const double e = pred - data.torques(i);
    acc += e * e;
  }
  return std::sqrt(acc / idx.size());
}

}  // namespace

double actuatorNetTorque(const Mlp& net, const VecX& features,
                         double torqueLimit) {
  if (features.size() != net.inputSize() || net.outputSize() != 1) {
    throw std::invalid_argument("actuator net dimension mismatch");
  }
  return std::clamp(net.forward(features)(0), -torqueLimit, torqueLimit);
}

ActuatorTrainResult trainActuatorNet(const ActuatorDataset& dataset,
                                     const SeaParams& params, uint64_t seed,
                                     const ActuatorTrainConfig& cfg) {
  params.validate();
  const int n = static_cast<int>(dataset.features.rows());
  if (n < 2) throw std::invalid_argument("dataset too small to split");
  if (dataset.features.cols() != kActuatorFeatureDim ||
      dataset.torques.size() != n) {
    throw std::invalid_argument("dataset shape mismatch");
  }

  Rng rng(seed);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  const int testCount =
      std::clamp(static_cast<int>(std::lround(cfg.testFraction * n)), 1, n - 1);
  std::vector<int> testIdx(perm.begin(), perm.begin() + testCount);
  std::vector<int> trainIdx(perm.begin() + testCount, perm.end());

  VecX mu = VecX::Zero(kActuatorFeatureDim);
  for (int i : trainIdx) mu += dataset.features.row(i).transpose();
  mu /= trainIdx.size();
  VecX sigma = VecX::Zero(kActuatorFeatureDim);
  for (int i : trainIdx) {
    sigma += (dataset.features.row(i).transpose() - mu).array().square().matrix();
  }
  sigma = (sigma / trainIdx.size()).cwiseSqrt().cwiseMax(1e-9);

  ActuatorTrainResult result;
  result.net = Mlp({kActuatorFeatureDim, 32, 32, 1}, Activation::Softsign);
  Rng initRng = rng.split();
  result.net.init(initRng, 0.1);

  Adam adam(result.net.paramCount(), cfg.learningRate);
  std::vector<int> order = trainIdx;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double epochLoss = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batchSize)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(cfg.batchSize));
      const int batch = static_cast<int>(stop - start);
      VecX grad = VecX::Zero(result.net.paramCount());
      for (size_t s = start; s < stop; ++s) {
        const int i = order[s];
        const VecX x =
            (dataset.features.row(i).transpose() - mu).cwiseQuotient(sigma);
        Mlp::Trace trace;
        const double out = result.net.forward(x, trace)(0);
        const double err = out - dataset.torques(i) / params.torqueLimit;
        VecX og(1);
        og(0) = 2.0 * err / batch;
        grad += result.net.backward(trace, og);
        epochLoss += err * err;
      }
      result.net.setParams(adam.step(result.net.params(), grad));
    }
    result.epochLoss.push_back(epochLoss / order.size());
  }

  foldNormalization(result.net, mu, sigma, params.torqueLimit);
  result.trainRms = rmsError(result.net, dataset, trainIdx, params.torqueLimit);
  result.testRms = rmsError(result.net, dataset, testIdx, params.torqueLimit);
  return result;
}

}  // namespace upright
