#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "dtph/matcore.hpp"
#include "dtph/pencil.hpp"
#include "dtph/system.hpp"

namespace dtph {

enum class LmiKind {
  DiscreteImpedance,    // d-iKYP
  DiscreteScattering,   // d-sKYP
  GeneralizedLyapunov,  // -A^H X A + E^H X E >= 0
  ContinuousImpedance,  // c-iKYP
  ContinuousScattering, // c-sKYP
};

std::string_view to_string(LmiKind kind);

enum class WeightConstraint { Semidefinite, PositiveDefinite, PositiveDefiniteOnImageE };

/// W(X) = W0 + linear(X) >= 0 over Hermitian X of size n.
struct LmiProblem {
  LmiKind kind = LmiKind::DiscreteImpedance;
  Index n = 0;
  Matrix W0;
  std::function<Matrix(const Matrix&)> linear;
  WeightConstraint constraint = WeightConstraint::Semidefinite;
  /// Orthonormal basis of im E; used by PositiveDefiniteOnImageE.
  Matrix image_basis;
  /// Search over real symmetric X only.
  bool real_data = false;

  Matrix evaluate(const Matrix& x) const { return W0 + linear(x); }
  bool homogeneous() const { return W0.norm() == 0.0; }
};

/// Throws KindMismatch when the kind does not fit the time domain, or when a
/// continuous kind is asked for with E != I.
LmiProblem build_lmi(const DescriptorSystem& sys, LmiKind kind);
/// Generalized Lyapunov inequality of the pair, positive definite on im E.
LmiProblem build_lyapunov_lmi(const Matrix& E, const Matrix& A);

enum class LmiStatus { Feasible, Infeasible, Marginal };
std::string_view to_string(LmiStatus status);

/// Semidefinite: W(X) >= 0, X >= 0. Strict: W(X) >= 0 with X > 0 (or > 0 on
/// im E for that constraint).
enum class SolveMode { Semidefinite, Strict };

struct LmiOptions {
  double tol_lmi = 1e-8;
  double tol_strict = 1e-6;
  /// Trace bound rho = rho_factor * n on the normalized X for affine problems;
  /// homogeneous problems use rho = n.
  double rho_factor = 1e4;
  bool detect_forced_zero = true;
  /// Strict mode: keep pushing the smallest eigenvalue of X up to half its
  /// attainable maximum instead of stopping at the first positive definite
  /// iterate.
  bool centre_witness = false;
};

struct LmiCertificate {
  LmiStatus status = LmiStatus::Marginal;
  SolveMode mode = SolveMode::Semidefinite;
  Matrix X;  // witness in original units; best iterate when not feasible
  double min_eig_W = 0.0;
  double min_eig_X = 0.0;
  /// Optimal shift of the normalized problem and an upper bound on it.
  double t_star = 0.0;
  double upper_bound = 0.0;
  double rho = 0.0;
  double x_scale = 1.0;
  double w_scale = 1.0;
  /// Feasible, but every solution is X = 0.
  bool forced_zero = false;
  /// Feasible with an optimal shift inside [-tol_lmi, tol_strict).
  bool on_boundary = false;
  std::string note;

  bool feasible() const { return status == LmiStatus::Feasible; }
};

LmiCertificate solve_feasibility(const LmiProblem& p, SolveMode mode, const LmiOptions& opts = {});

struct LyapunovClassification {
  bool stable_and_causal = false;
  LmiCertificate certificate;
  /// Regular, index <= 1 and the finite spectrum passes the spectral test.
  bool spectral_verdict = false;
  bool agrees() const { return stable_and_causal == spectral_verdict; }
};

/// Throws IrregularPencil.
LyapunovClassification gen_lyapunov_classify(const Matrix& E, const Matrix& A, const LmiOptions& opts = {});

enum class PassivityKind { Impedance, Scattering };

struct PassivityVerdict {
  bool passive = false;
  LmiCertificate certificate;  // on the reduced system
  ReducedStandardSystem reduced;
  /// Storage weight on the original state (E x)^H X (E x); empty unless passive.
  Matrix storage;
};

/// Reduces to the standard system and solves the matching KYP inequality.
/// E = 0 is accepted (pure algebraic system with zero storage). Throws
/// IrregularPencil, or IndexTooHigh for index > 1.
PassivityVerdict check_passivity(const DescriptorSystem& sys, PassivityKind kind, const LmiOptions& opts = {});

}  // namespace dtph
