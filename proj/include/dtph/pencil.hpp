#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph {

inline constexpr double kCondMax = 1e8;

struct PencilAnalysis {
  bool regular = false;
  std::optional<int> index;  // empty when irregular; 0 when E is invertible
  std::vector<Scalar> finite_spectrum;
  bool completely_causal = false;
  /// Sample point with the best-conditioned lambda E - A; reused as the
  /// resolvent point for rank tests and the commuting transform.
  Scalar shift{0.0, 0.0};
  /// sigma_min(shift E - A) / sigma_max(shift E - A).
  double shift_margin = 0.0;
  bool marginal = false;
  std::vector<std::string> notes;
};

/// Regularity by sampling n+1 points on a circle, index from the rank
/// sequence of powers of (shift E - A)^{-1} E.
PencilAnalysis analyze_pencil(const Matrix& E, const Matrix& A, double tol_rank = kTolRank);

/// U E V = [[Sigma, 0], [0, 0]] with U, V unitary, and the matching block
/// partition of U A V, U B, C V.
struct SemiExplicitForm {
  Matrix U, V;
  RealVector sigma;  // r positive singular values of E
  Index r = 0;
  Matrix A11, A12, A21, A22;
  Matrix B1, B2;
  Matrix C1, C2;
  Matrix D;
  bool index_at_most_one = false;
  /// max(|E|, |A|) / sigma_min(A22); 1 when there is no algebraic block.
  double a22_condition = 1.0;
};

SemiExplicitForm semi_explicit(const DescriptorSystem& sys, double tol_rank = kTolRank);

/// Standard system x^_{k+1} = A x^_k + B u_k, y = C x^ + D u equivalent to the
/// index-one descriptor system, with the maps between the two state spaces.
struct ReducedStandardSystem {
  Matrix A, B, C, D;
  /// Original state from reduced state and input: x = state_map x^ + input_map u.
  Matrix state_map, input_map;
  /// Reduced state from original state: x^ = reduce_map x.
  Matrix reduce_map;
  /// U and Sigma from the semi-explicit form; needed to lift storage weights.
  Matrix U;
  RealVector sigma;
  double a22_condition = 1.0;
  std::vector<std::string> warnings;

  Index n() const { return A.rows(); }
  DescriptorSystem as_system(TimeDomain td = TimeDomain::Discrete) const;
  /// Weight X on the original space with (E x)^H X (E x) = x^^H X_red x^.
  Matrix lift_storage(const Matrix& x_reduced) const;
  /// Residual of the algebraic constraint for (x, u): zero iff consistent.
  Vector constraint_residual(const Vector& x, const Vector& u) const;
};

/// Throws IndexTooHigh when A22 is singular to tolerance. A22 conditioning
/// above cond_max is reported as a warning.
ReducedStandardSystem reduce_to_standard(const SemiExplicitForm& sef, double cond_max = kCondMax);
ReducedStandardSystem reduce_to_standard(const DescriptorSystem& sys, double tol_rank = kTolRank,
                                         double cond_max = kCondMax);

/// Spectral stability of x_{k+1} = A x_k: |lambda| <= 1 with unit-modulus
/// eigenvalues semi-simple; asymptotic when every |lambda| < 1. Eigenvalues
/// within tol of the unit circle count as on it.
struct SpectralStability {
  bool stable = false;
  bool asymptotically_stable = false;
  double spectral_radius = 0.0;
  std::vector<std::string> details;
};

SpectralStability spectral_stability(const Matrix& A, double tol = 1e-8);

}  // namespace dtph
