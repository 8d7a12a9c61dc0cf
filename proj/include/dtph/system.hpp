#pragma once

#include <string>
#include <vector>

#include "dtph/matcore.hpp"

namespace dtph {

enum class TimeDomain { Discrete, Continuous };

/// E x_{k+1} = A x_k + B u_k, y_k = C x_k + D u_k (or E x' = A x + B u in
/// continuous time).
struct DescriptorSystem {
  Matrix E, A, B, C, D;
  TimeDomain time_domain = TimeDomain::Discrete;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  bool is_real() const;

  /// E = I_n.
  static DescriptorSystem standard(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                   TimeDomain td = TimeDomain::Discrete);
  /// All five coefficients 1x1.
  static DescriptorSystem scalar(Scalar e, Scalar a, Scalar b, Scalar c, Scalar d,
                                 TimeDomain td = TimeDomain::Discrete);
};

struct ValidationReport {
  bool dimensions_ok = true;
  bool finite = true;
  bool zero_e = false;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool valid() const { return errors.empty(); }
};

/// With require_nonzero_e, E = 0 is an error (regular, E != 0, completely
/// causal is the standing assumption for most analyses); otherwise a warning.
ValidationReport validate(const DescriptorSystem& sys, bool require_nonzero_e = false);

/// Throws DimensionMismatch / InvalidMatrix on the first error of validate().
void require_valid(const DescriptorSystem& sys);

}  // namespace dtph
