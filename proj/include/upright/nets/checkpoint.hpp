#pragma once

#include <string>

#include "upright/nets/mlp.hpp"

namespace upright {

/// Binary network checkpoint. Little-endian byte layout:
///
///   bytes 0..7    magic "UPRNET01"
///   u32           format version (1)
///   u32           activation id (0 tanh, 1 softsign)
///   u32           number of layer sizes N
///   u32 * N       layer sizes, input first
///   u64           parameter count P (consistent with sizes)
///   u64           extra count E
///   f64 * P       flat parameters, per layer row-major weights then bias
///   f64 * E       extra vector (e.g. log standard deviations), may be empty
void saveNet(const std::string& path, const Mlp& net,
             const VecX& extra = VecX());

struct LoadedNet {
  Mlp net;
  VecX extra;
};

/// Throws std::runtime_error on magic/version/shape mismatch or truncation.
LoadedNet loadNet(const std::string& path);

}  // namespace upright
