#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph {

enum class CayleyDirection { ImpedanceToScattering, ScatteringToImpedance };

std::string to_string(CayleyDirection d);

/// (output, input) of one form to (output, input) of the other:
/// y = (e - f)/sqrt2, u = (f + e)/sqrt2. The map is its own inverse.
std::pair<Vector, Vector> cayley_signals(const Vector& output, const Vector& input);

struct ExternalCayleyResult {
  DescriptorSystem transformed;
  CayleyDirection direction = CayleyDirection::ImpedanceToScattering;
  /// Inputs were restricted to ker(I + D)^perp before transforming.
  bool restricted = false;
  /// Orthonormal basis of ker(I + D) (empty unless restricted).
  Matrix kernel_basis;
  /// Orthonormal basis of ker(I + D)^perp: restricted inputs are u = Q v,
  /// restricted outputs Q^H y (identity unless restricted).
  Matrix input_basis;
  /// Condition number of I + D actually inverted.
  double feedthrough_condition = 1.0;
  std::vector<std::string> notes;
};

/// A' = A - B (I+D)^{-1} C, B' = sqrt2 B (I+D)^{-1}, C' = -sqrt2 (I+D)^{-1} C,
/// D' = -(I+D)^{-1}(D - I); the same formula serves both directions.
/// Singular I + D: impedance-to-scattering throws SingularFeedthrough;
/// scattering-to-impedance restricts the inputs first, using `witness` (a
/// positive definite scattering KYP solution) or solving for one, and throws
/// SingularFeedthrough when none exists.
ExternalCayleyResult external_cayley(const DescriptorSystem& sys, CayleyDirection direction,
                                     const std::optional<Matrix>& witness = std::nullopt);

struct RestrictedScattering {
  DescriptorSystem system;
  Matrix kernel_basis;  // ker(I + D)
  Matrix input_basis;   // ker(I + D)^perp
  /// max(|X B K|, |C^H K|) for the kernel basis K, relative to the data.
  double inclusion_residual = 0.0;
};

/// Inputs restricted to ker(I + D)^perp, outputs projected onto it:
/// (A, B Q, Q^H C, Q^H D Q). Checks that X solves the scattering KYP
/// inequality and ker(I + D) lies in ker(X B) and ker(C^H); throws
/// KernelInclusion (or InvalidWeight) otherwise.
RestrictedScattering restrict_scattering(const DescriptorSystem& sys, const Matrix& X, double tol = 1e-8);

struct InternalCayleyResult {
  DescriptorSystem discrete;
  Scalar alpha;
  Matrix transfer_at_alpha;
  /// Condition number of alpha I - A.
  double resolvent_condition = 1.0;
  std::vector<std::string> notes;
};

/// Internal Cayley (Tustin) transform of a continuous-time system, Re alpha > 0.
/// Descriptor systems of index <= 1 are reduced to their standard form first.
/// Throws ResolventViolation when alpha is not in the open right half plane or
/// alpha I - A is singular to working precision.
InternalCayleyResult internal_cayley(const DescriptorSystem& csys, Scalar alpha);

/// Frobenius residual between T^H [-A^H X - X A, -X B; -B^H X, 0] T and the
/// discrete-time block [-A'^H X A' + X, -A'^H X B'; -B'^H X A', -B'^H X B']
/// of the internal Cayley image, with T the congruence factor.
double verify_congruence_identity(const DescriptorSystem& csys, const Matrix& X, Scalar alpha);

}  // namespace dtph
