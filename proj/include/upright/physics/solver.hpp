#pragma once

#include <vector>

#include "upright/physics/types.hpp"

namespace upright {

/// One velocity-level contact constraint row pair handed to the solver.
struct SolverContact {
  Eigen::Matrix<double, 1, kDof> Jn;  ///< relative normal velocity row
  Eigen::Matrix<double, 1, kDof> Jt;  ///< relative tangent velocity row
  double vMin = 0.0;  ///< lower bound on post-solve normal velocity
  double mu = 0.0;    ///< Coulomb friction coefficient

  double lambdaN = 0.0;  ///< resolved normal impulse, >= 0
  double lambdaT = 0.0;  ///< resolved tangent impulse, |.| <= mu * lambdaN
};

struct PgsSettings {
  int iterations = 500;     ///< cap; typical steps exit after a few sweeps
  double tolerance = 1e-8;  ///< converged when a sweep moves u less than this
};

struct PgsResult {
  VecX u;  ///< post-impulse generalized velocity
  bool converged = true;
  int iterations = 0;
};

/// Projected Gauss-Seidel over the contact impulses: complementarity on the
/// normals (v_n >= vMin, lambda_n >= 0) and a friction box
/// |lambda_t| <= mu * lambda_n re-centered on the current normal impulse
/// every sweep. Impulses are written back into `contacts`.
PgsResult solveContacts(const MatX& M, const VecX& uFree,
                        std::vector<SolverContact>& contacts,
                        const PgsSettings& settings);

}  // namespace upright
