#include "upright/nets/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

namespace upright {

namespace {
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

double applyActivation(Activation act, double x) {
  switch (act) {
    case Activation::Tanh: return std::tanh(x);
    case Activation::Softsign: return x / (1.0 + std::abs(x));
  }
  return x;
}

double activationDerivative(Activation act, double x) {
  switch (act) {
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Softsign: {
      const double d = 1.0 + std::abs(x);
      return 1.0 / (d * d);
    }
  }
  return 1.0;
}

Mlp::Mlp(std::vector<int> sizes, Activation act)
    : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 sizes");
  for (int s : sizes_)
    if (s <= 0) throw std::invalid_argument("Mlp sizes must be positive");
  paramCount_ = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.emplace_back(MatX::Zero(sizes_[l + 1], sizes_[l]));
    biases_.emplace_back(VecX::Zero(sizes_[l + 1]));
    paramCount_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

VecX Mlp::forward(const VecX& input) const {
  Trace trace;
  return forward(input, trace);
}

VecX Mlp::forward(const VecX& input, Trace& trace) const {
  if (input.size() != sizes_.front())
    throw std::invalid_argument("Mlp input size mismatch");
  const size_t L = weights_.size();
  trace.pre.resize(L);
  trace.post.resize(L + 1);
  trace.post[0] = input;
  for (size_t l = 0; l < L; ++l) {
    trace.pre[l].noalias() = weights_[l] * trace.post[l];
    trace.pre[l] += biases_[l];
    if (l + 1 < L) {
      trace.post[l + 1] = trace.pre[l].unaryExpr(
          [this](double x) { return applyActivation(act_, x); });
    } else {
      trace.post[l + 1] = trace.pre[l];
    }
  }
  return trace.post[L];
}

VecX Mlp::backward(const Trace& trace, const VecX& outputGrad) const {
  const size_t L = weights_.size();
  if (outputGrad.size() != sizes_.back())
    throw std::invalid_argument("Mlp output grad size mismatch");

  VecX grad = VecX::Zero(paramCount_);
  VecX delta = outputGrad;

  // walk the layers backwards; the flat layout is front-to-back, so place
  // each block at its forward offset
  std::vector<int> offsets(L);
  int off = 0;
  for (size_t l = 0; l < L; ++l) {
    offsets[l] = off;
    off += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }

  for (size_t li = L; li-- > 0;) {
    const int rows = sizes_[li + 1], cols = sizes_[li];
    Eigen::Map<RowMat>(grad.data() + offsets[li], rows, cols).noalias() =
        delta * trace.post[li].transpose();
    grad.segment(offsets[li] + rows * cols, rows) = delta;
    if (li > 0) {
      VecX back = weights_[li].transpose() * delta;
      delta = back.cwiseProduct(trace.pre[li - 1].unaryExpr(
          [this](double x) { return activationDerivative(act_, x); }));
    }
  }
  return grad;
}

VecX Mlp::jvp(const Trace& trace, const VecX& paramDir) const {
  const size_t L = weights_.size();
  if (paramDir.size() != paramCount_)
    throw std::invalid_argument("Mlp param direction size mismatch");

  VecX da = VecX::Zero(sizes_.front());
  int off = 0;
  for (size_t l = 0; l < L; ++l) {
    const int rows = sizes_[l + 1], cols = sizes_[l];
    Eigen::Map<const RowMat> dW(paramDir.data() + off, rows, cols);
    Eigen::Map<const VecX> db(paramDir.data() + off + rows * cols, rows);
    off += rows * cols + rows;

    VecX dz = dW * trace.post[l] + db;
    dz.noalias() += weights_[l] * da;
    if (l + 1 < L) {
      da = dz.cwiseProduct(trace.pre[l].unaryExpr(
          [this](double x) { return activationDerivative(act_, x); }));
    } else {
      da = dz;
    }
  }
  return da;
}

VecX Mlp::params() const {
  VecX flat(paramCount_);
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    const int rows = weights_[l].rows(), cols = weights_[l].cols();
    Eigen::Map<RowMat>(flat.data() + off, rows, cols) = weights_[l];
    flat.segment(off + rows * cols, rows) = biases_[l];
    off += rows * cols + rows;
  }
  return flat;
}

void Mlp::setParams(const VecX& flat) {
  if (flat.size() != paramCount_)
    throw std::invalid_argument("Mlp flat parameter size mismatch");
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    const int rows = weights_[l].rows(), cols = weights_[l].cols();
    weights_[l] = Eigen::Map<const RowMat>(flat.data() + off, rows, cols);
    biases_[l] = flat.segment(off + rows * cols, rows);
    off += rows * cols + rows;
  }
}

void Mlp::init(Rng& rng, double finalScale) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    const int rows = weights_[l].rows(), cols = weights_[l].cols();
    // orthogonalize a Gaussian draw; transpose when the matrix is wide so
    // the QR factor has the right shape
    const bool tall = rows >= cols;
    MatX a(tall ? rows : cols, tall ? cols : rows);
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
    Eigen::HouseholderQR<MatX> qr(a);
    MatX q = qr.householderQ() * MatX::Identity(a.rows(), a.cols());
    MatX r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for (int j = 0; j < q.cols(); ++j)
      if (r(j, j) < 0) q.col(j) *= -1.0;
    weights_[l] = tall ? q : MatX(q.transpose());
    if (l + 1 == weights_.size()) weights_[l] *= finalScale;
    biases_[l].setZero();
  }
}

}  // namespace upright
