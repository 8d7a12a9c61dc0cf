#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph {

struct Trajectory {
  std::vector<Vector> x, u, y;  // samples k = 0 .. K-1
  /// max_k |E x_{k+1} - A x_k - B u_k| / (1 + |x_k| + |u_k|) over k < K-1.
  double max_residual = 0.0;
  bool projected_initial_state = false;

  std::size_t horizon() const { return u.size(); }
};

struct SimulateOptions {
  /// Replace the algebraic part of an inconsistent x0 by its consistent value.
  bool project_initial_state = false;
  double consistency_tol = 1e-9;
  double tol_rank = kTolRank;
};

/// Index <= 1 only: steps the reduced standard system and reconstructs the
/// algebraic part at every sample.
Trajectory simulate(const DescriptorSystem& sys, const std::vector<Vector>& u, const Vector& x0,
                    const SimulateOptions& opts = {});

enum class SupplyKind { Impedance, Scattering, General };

/// s(y, u) = [y; u]^H [[Q, S], [S^H, R]] [y; u].
struct SupplyRate {
  SupplyKind kind = SupplyKind::Scattering;
  Matrix Q, S, R;

  static SupplyRate impedance(Index m);
  static SupplyRate scattering(Index m);
  /// Throws InvalidMatrix unless Q and R are Hermitian.
  static SupplyRate general(const Matrix& Q, const Matrix& S, const Matrix& R);
};

/// Real by construction; throws DimensionMismatch on length mismatch.
double supply(const SupplyRate& sr, const Vector& u, const Vector& y);

struct DissipationAudit {
  std::vector<double> storage_increase;  // V(E x_{k+1}) - V(E x_k)
  std::vector<double> supplied;          // s(u_k, y_k)
  double max_violation = 0.0;            // max_k increase - supplied (may be negative)
  std::optional<std::size_t> first_violation;
  bool dissipative = true;
  bool strictly_dissipative = false;
  bool conservative = false;
};

/// Checks V(E x_{k+1}) - V(E x_k) <= s(u_k, y_k) with V(z) = z^H X z along the
/// trajectory, slack 1e-8 (1 + |x_k| + |x_{k+1}| + |u_k|)^2.
DissipationAudit audit_dissipation(const Trajectory& traj, const SupplyRate& sr, const Matrix& X, const Matrix& E);

/// Rows: k, x..., u..., y..., V, s. Complex entries are written as a+bj.
std::string trajectory_csv(const Trajectory& traj, const Matrix& E, const std::optional<Matrix>& X,
                           const SupplyRate& sr);

}  // namespace dtph
