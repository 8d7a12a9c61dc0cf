#pragma once

#include <random>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240917);
  return gen;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline Matrix random_real(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Scalar(uniform(), 0.0);
  return m;
}

inline Matrix random_complex(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Scalar(uniform(), uniform());
  return m;
}

inline Matrix random_matrix(Index rows, Index cols, bool complex) {
  return complex ? random_complex(rows, cols) : random_real(rows, cols);
}

inline Matrix random_hermitian(Index n, bool complex = true) {
  Matrix m = random_matrix(n, n, complex);
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_unitary(Index n, bool complex = true) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, complex));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Random matrix with condition number at most `cond`.
inline Matrix random_well_conditioned(Index n, double cond = 10.0, bool complex = true) {
  RealVector s(n);
  for (Index i = 0; i < n; ++i) s(i) = 1.0 + (cond - 1.0) * uniform(0.0, 1.0);
  if (n > 0) s(0) = 1.0;
  return random_unitary(n, complex) * s.cast<Scalar>().asDiagonal() * random_unitary(n, complex);
}

/// Hermitian positive definite with eigenvalues in [lo, hi].
inline Matrix random_pd(Index n, double lo = 0.5, double hi = 2.0, bool complex = true) {
  RealVector s(n);
  for (Index i = 0; i < n; ++i) s(i) = uniform(lo, hi);
  Matrix q = random_unitary(n, complex);
  Matrix p = q * s.cast<Scalar>().asDiagonal() * q.adjoint();
  return 0.5 * (p + p.adjoint());
}

/// Random index-one descriptor system built from a standard core by a
/// random equivalence with an appended algebraic block.
inline DescriptorSystem random_index_one(Index r, Index q, Index m, bool complex = false) {
  const Index n = r + q;
  Matrix e0 = Matrix::Zero(n, n);
  e0.topLeftCorner(r, r) = Matrix::Identity(r, r);
  Matrix a0 = random_matrix(n, n, complex);
  a0.bottomRightCorner(q, q) = random_well_conditioned(q, 5.0, complex);
  Matrix s = random_well_conditioned(n, 10.0, complex);
  Matrix t = random_well_conditioned(n, 10.0, complex);
  return {s * e0 * t, s * a0 * t, s * random_matrix(n, m, complex), random_matrix(m, n, complex) * t,
          random_matrix(m, m, complex)};
}

inline Matrix transfer_matrix_at(const DescriptorSystem& sys, Scalar z) {
  return sys.C * (z * sys.E - sys.A).partialPivLu().solve(sys.B) + sys.D;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r ? static_cast<Index>(rows.begin()->size()) : 0;
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = Scalar(v, 0.0);
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) v(i++) = Scalar(x, 0.0);
  return v;
}

}  // namespace dtph::testing
