#pragma once

#include <functional>
#include <vector>

#include "dtph/matcore.hpp"

namespace dtph {

/// Orthonormal (Frobenius) basis of the real vector space of n x n Hermitian
/// matrices; symmetric real matrices only when real_only is set.
std::vector<Matrix> hermitian_basis(Index n, bool real_only);

/// Coordinates of a Hermitian matrix in hermitian_basis(n, real_only).
RealVector hermitian_coordinates(const Matrix& x, bool real_only);

/// F_k(y) = F_k0 + sum_i y_i F_ki for every block k, all Hermitian.
struct AffineLmi {
  std::vector<Matrix> constant;
  std::vector<std::vector<Matrix>> coefficients;  // [block][variable]

  Index variables() const { return coefficients.empty() ? 0 : static_cast<Index>(coefficients.front().size()); }
  /// Sum of block sizes; the barrier parameter of -sum log det F_k.
  Index barrier_degree() const;
  Matrix block(std::size_t k, const RealVector& y) const;
  /// Smallest eigenvalue over all blocks at y.
  double min_eigenvalue(const RealVector& y) const;
};

struct BarrierOptions {
  double mu_initial = 1.0;
  double mu_factor = 8.0;
  double mu_min = 1e-14;
  int max_newton = 80;
  /// Called after each centering with the iterate value and an upper bound on
  /// the optimum; returning true ends the run.
  std::function<bool(double value, double upper_bound, const RealVector& y)> stop;
};

struct BarrierResult {
  RealVector y;
  double value = 0.0;
  double upper_bound = 0.0;
  double mu = 0.0;
  bool stopped_early = false;
  int newton_steps = 0;
};

/// Path-following log-barrier method for max c^T y subject to F_k(y) > 0,
/// started from a strictly feasible y0. Throws NumericalFailure if y0 is not
/// strictly feasible.
BarrierResult maximize_linear(const AffineLmi& lmi, const RealVector& c, const RealVector& y0,
                              const BarrierOptions& opts = {});

}  // namespace dtph
