#include "upright/physics/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace upright {

PgsResult solveContacts(const MatX& M, const VecX& uFree,
                        std::vector<SolverContact>& contacts,
                        const PgsSettings& settings) {
  PgsResult out;
  out.u = uFree;
  if (contacts.empty()) return out;

  const int m = static_cast<int>(contacts.size());
  Eigen::LDLT<MatX> ldlt(M);

  // W = M^{-1} J^T, one column per constraint row (normal, tangent)
  MatX Wn(kDof, m), Wt(kDof, m);
  VecX diagN(m), diagT(m);
  for (int i = 0; i < m; ++i) {
    Wn.col(i) = ldlt.solve(contacts[i].Jn.transpose());
    Wt.col(i) = ldlt.solve(contacts[i].Jt.transpose());
    diagN[i] = contacts[i].Jn * Wn.col(i);
    diagT[i] = contacts[i].Jt * Wt.col(i);
  }

  VecX u = uFree;
  for (int i = 0; i < m; ++i) {
    contacts[i].lambdaN = 0.0;
    contacts[i].lambdaT = 0.0;
  }

  out.converged = false;
  for (int it = 0; it < settings.iterations; ++it) {
    const VecX uSweepStart = u;
    for (int i = 0; i < m; ++i) {
      SolverContact& c = contacts[i];

      if (diagN[i] > 0.0) {
        const double vn = c.Jn * u;
        double next = c.lambdaN - (vn - c.vMin) / diagN[i];
        next = std::max(next, 0.0);
        const double d = next - c.lambdaN;
        if (d != 0.0) {
          u += Wn.col(i) * d;
          c.lambdaN = next;
        }
      }

      if (diagT[i] > 0.0 && c.mu > 0.0) {
        const double vt = c.Jt * u;
        double next = c.lambdaT - vt / diagT[i];
        const double bound = c.mu * c.lambdaN;
        next = std::clamp(next, -bound, bound);
        const double d = next - c.lambdaT;
        if (d != 0.0) {
          u += Wt.col(i) * d;
          c.lambdaT = next;
        }
      }
    }
    out.iterations = it + 1;
    // impulse redistribution between redundant contacts does not move the
    // velocity, so convergence is judged on the velocity itself
    if ((u - uSweepStart).cwiseAbs().maxCoeff() < settings.tolerance) {
      out.converged = true;
      break;
    }
  }

  out.u = u;
  return out;
}

}  // namespace upright
