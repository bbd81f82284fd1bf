#pragma once

#include <vector>

#include "upright/common/rng.hpp"
#include "upright/physics/types.hpp"

namespace upright {

enum class Activation { Tanh = 0, Softsign = 1 };

double applyActivation(Activation act, double x);
double activationDerivative(Activation act, double x);  ///< in terms of pre-activation

/// Fully connected network. Hidden layers share one activation, the output
/// layer is linear. Parameters expose a flat view laid out layer by layer as
/// row-major weights followed by biases.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation act);

  /// Per-layer pre- and post-activation cache from a forward pass, consumed
  /// by backward and jvp.
  struct Trace {
    std::vector<VecX> pre;   ///< z_l, one per layer
    std::vector<VecX> post;  ///< a_l with a_0 = input
  };

  VecX forward(const VecX& input) const;
  VecX forward(const VecX& input, Trace& trace) const;

  /// Flat parameter gradient of dot(outputGrad, output) for the traced pass.
  VecX backward(const Trace& trace, const VecX& outputGrad) const;

  /// Directional derivative of the output along a flat parameter direction,
  /// input held fixed.
  VecX jvp(const Trace& trace, const VecX& paramDir) const;

  int paramCount() const { return paramCount_; }
  VecX params() const;
  void setParams(const VecX& flat);

  /// Orthogonal rows/columns per layer; the output layer is scaled by
  /// finalScale on top of its unit gain.
  void init(Rng& rng, double finalScale = 1.0);

  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  int inputSize() const { return sizes_.front(); }
  int outputSize() const { return sizes_.back(); }

 private:
  std::vector<int> sizes_;
  Activation act_ = Activation::Tanh;
  std::vector<MatX> weights_;
  std::vector<VecX> biases_;
  int paramCount_ = 0;
};

}  // namespace upright
