#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtph/kyp.hpp"
#include "dtph/matcore.hpp"
#include "dtph/pencil.hpp"
#include "dtph/system.hpp"

namespace dtph {

/// Scattering port-Hamiltonian form of a standard system in the coordinates
/// x~ = X^{1/2} x. For descriptor systems every quantity lives on the reduced
/// state.
struct PhRepresentation {
  Matrix X, X_half;
  Matrix A, B, C, D;  // X^{1/2} A X^{-1/2}, X^{1/2} B, C X^{-1/2}, D
  double norm_value = 0.0;

  /// (1/2) x^H X x.
  double hamiltonian(const Vector& x) const;
  DescriptorSystem transformed() const { return DescriptorSystem::standard(A, B, C, D); }
};

/// Spectral norm of [A B; C D] weighted by X on the state. Throws
/// InvalidWeight unless eigmin(X) >= tol_strict * trace(X) / n.
double weighted_norm(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, const Matrix& X,
                     double tol_strict = 1e-6);

/// Builds the representation for a weight on the (reduced) state. Throws
/// InvalidWeight when X is not positive definite or fails the scattering KYP
/// inequality by more than tol_lmi.
PhRepresentation to_ph(const DescriptorSystem& sys, const Matrix& X, const LmiOptions& opts = {});

struct PhVerdict {
  bool is_ph = false;
  std::optional<PhRepresentation> representation;
  LmiCertificate certificate;
  ReducedStandardSystem reduced;
  std::string note;
};

/// Strict scattering KYP on the reduced system. The witness maximizes the
/// smallest eigenvalue of X under a trace bound; other weights may exist.
/// Throws IrregularPencil, or IndexTooHigh for index > 1.
PhVerdict is_ph(const DescriptorSystem& sys, const LmiOptions& opts = {});

struct StabilityReport {
  bool stable = false;
  bool asymptotically_stable = false;
  double spectral_radius = 0.0;
  /// Finite dynamics A_f (up to similarity).
  Matrix finite_dynamics;
  /// Lyapunov inequality -A_f^H X A_f + X >= 0 with X > 0.
  bool lyapunov_stable = false;
  bool agrees() const { return stable == lyapunov_stable; }
  std::vector<std::string> details;
};

/// Spectral test on the finite dynamics, cross-checked against the Lyapunov
/// inequality. Any index is accepted. Throws IrregularPencil.
StabilityReport classify_stability(const Matrix& E, const Matrix& A, const LmiOptions& opts = {});

}  // namespace dtph
