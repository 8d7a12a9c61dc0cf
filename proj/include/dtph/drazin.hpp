#pragma once

#include <vector>

#include "dtph/matcore.hpp"

namespace dtph {

struct DrazinResult {
  Matrix inverse;
  int index = 0;      // smallest k with rank M^k = rank M^{k+1}
  int core_rank = 0;  // rank of M^index
  /// Smallest core singular value and largest discarded one of M^index,
  /// both relative to the largest.
  double core_level = 1.0;
  double nilpotent_level = 0.0;
  /// Largest relative residual of the three defining identities.
  double axiom_residual = 0.0;
};

/// Core-nilpotent split M = T diag(C, N) T^{-1}, M^D = T diag(C^{-1}, 0) T^{-1}.
/// Throws NumericalFailure when the split is ambiguous (core level within
/// 1e3 of the discarded level) or the identities fail afterwards.
DrazinResult drazin(const Matrix& m, double tol_rank = kTolRank);
Matrix drazin_inverse(const Matrix& m, double tol_rank = kTolRank);

/// Commuting coefficients (s E - A)^{-1} E, (s E - A)^{-1} A with their
/// Drazin inverses.
struct DrazinPair {
  Scalar shift;
  Matrix resolvent;  // s E - A
  Matrix E_hat, A_hat, ED, AD;
  int nu = 0;
};

/// Throws IrregularPencil.
DrazinPair drazin_pair(const Matrix& E, const Matrix& A, double tol_rank = kTolRank);

struct DaeSolution {
  std::vector<Vector> x;  // x_0 .. x_K
  int nu = 0;
  double max_residual = 0.0;  // max_k |E x_{k+1} - A x_k - f_k| / (1 + |x_k| + |f_k|)
};

/// Explicit solution of E x_{k+1} = A x_k + f_k for k = 0..K-1 from the free
/// vector v. Needs f_0 .. f_{K+nu-1}; throws InsufficientInput otherwise.
DaeSolution solve_dae(const Matrix& E, const Matrix& A, const std::vector<Vector>& f, const Vector& v, int horizon,
                      double tol_rank = kTolRank);

struct ConsistencyResult {
  bool consistent = false;
  Vector v;  // minimal-norm free vector reproducing x0
  double residual = 0.0;
  int nu = 0;
};

/// Whether x0 is reachable as x_0 of some solution driven by f_0 .. f_{nu-1}.
ConsistencyResult check_consistency(const Matrix& E, const Matrix& A, const Vector& x0, const std::vector<Vector>& f,
                                    double tol = 1e-8, double tol_rank = kTolRank);

}  // namespace dtph
