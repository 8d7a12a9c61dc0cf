#include "dtph/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dtph/error.hpp"

namespace dtph {

namespace {

void require_finite(const Matrix& m, const char* op) {
  if (!all_finite(m)) throw Error(ErrorCode::InvalidMatrix, std::string(op) + ": non-finite entries");
}

void require_square(const Matrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << op << ": expected square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

int rank_from_sigma(const RealVector& sigma, double tol_rank) {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cut = tol_rank * sigma(0);
  int r = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cut) ++r;
  return r;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  require_square(m, "HermitianMatrix");
  require_finite(m, "HermitianMatrix");
  const double skew = m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (skew > 1e-12 * (1.0 + m.norm()))
    throw Error(ErrorCode::InvalidMatrix, "matrix is not Hermitian (skew " + std::to_string(skew) + ")");
  m_ = hermitian_part(m);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_real(const Matrix& m) { return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0; }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Svd svd(const Matrix& m) {
  require_finite(m, "svd");
  if (m.size() == 0)
    return {Matrix::Identity(m.rows(), m.rows()), RealVector(0), Matrix::Identity(m.cols(), m.cols())};
  Eigen::JacobiSVD<Matrix> s(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {s.matrixU(), s.singularValues(), s.matrixV()};
}

int rank(const Matrix& m, double tol_rank) {
  if (m.size() == 0) return 0;
  require_finite(m, "rank");
  Eigen::JacobiSVD<Matrix> s(m);
  return rank_from_sigma(s.singularValues(), tol_rank);
}

EigenDecomposition eig_hermitian(const HermitianMatrix& m) {
  if (m.size() == 0) return {Vector(0), Matrix(0, 0), EigenKind::Hermitian};
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "Hermitian eigensolver did not converge");
  return {es.eigenvalues().cast<Scalar>(), es.eigenvectors(), EigenKind::Hermitian};
}

EigenDecomposition eig_general(const Matrix& m) {
  require_square(m, "eig_general");
  require_finite(m, "eig_general");
  if (m.size() == 0) return {Vector(0), Matrix(0, 0), EigenKind::General};
  if (is_real(m)) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.real());
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "real QR iteration did not converge");
    return {es.eigenvalues(), es.eigenvectors(), EigenKind::General};
  }
  Eigen::ComplexEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "complex QR iteration did not converge");
  return {es.eigenvalues(), es.eigenvectors(), EigenKind::General};
}

double min_hermitian_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  require_square(m, "min_hermitian_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "Hermitian eigensolver did not converge");
  return es.eigenvalues()(0);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  require_finite(m, "spectral_norm");
  Eigen::JacobiSVD<Matrix> s(m);
  return s.singularValues()(0);
}

double condition_number(const Matrix& a) {
  require_square(a, "condition_number");
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> s(a);
  const RealVector& sv = s.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / smin;
}

Matrix solve(const Matrix& a, const Matrix& b, double max_condition) {
  require_square(a, "solve");
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "solve: row count of b differs from a");
  require_finite(a, "solve");
  require_finite(b, "solve");
  if (a.size() == 0) return Matrix(0, b.cols());
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc * max_condition >= 1.0)) {
    std::ostringstream os;
    os << "condition estimate " << (rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity())
       << " exceeds " << max_condition;
    throw Error(ErrorCode::SingularMatrix, os.str());
  }
  return lu.solve(b);
}

Matrix matrix_sqrt_psd(const HermitianMatrix& m) {
  if (m.size() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "Hermitian eigensolver did not converge");
  RealVector lam = es.eigenvalues();
  const double floor = -1e-12 * std::max(1.0, m.matrix().norm());
  if (lam(0) < floor) throw Error(ErrorCode::InvalidMatrix, "matrix_sqrt_psd: negative eigenvalue " + std::to_string(lam(0)));
  for (Index i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(0.0, lam(i)));
  const Matrix& q = es.eigenvectors();
  return hermitian_part(q * lam.cast<Scalar>().asDiagonal() * q.adjoint());
}

Matrix null_space(const Matrix& m, double tol_rank) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Svd s = svd(m);
  const int r = rank_from_sigma(s.singular_values, tol_rank);
  return s.V.rightCols(m.cols() - r);
}

Matrix range_basis(const Matrix& m, double tol_rank) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  Svd s = svd(m);
  const int r = rank_from_sigma(s.singular_values, tol_rank);
  return s.U.leftCols(r);
}

Matrix pinv(const Matrix& m, double tol_rank) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Svd s = svd(m);
  const int r = rank_from_sigma(s.singular_values, tol_rank);
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  for (int i = 0; i < r; ++i) out += s.V.col(i) * (1.0 / s.singular_values(i)) * s.U.col(i).adjoint();
  return out;
}

Matrix orthogonal_complement(const Matrix& q) {
  const Index n = q.rows();
  if (q.cols() == 0) return Matrix::Identity(n, n);
  return null_space(q.adjoint());
}

PowerChain power_chain(const Matrix& m, double tol_rank) {
  require_square(m, "power_chain");
  require_finite(m, "power_chain");
  const Index n = m.rows();
  PowerChain out;
  out.range = Matrix::Identity(n, n);
  out.kernel = Matrix(n, 0);
  const double scale = spectral_norm(m);
  if (n == 0) return out;
  if (scale == 0.0) {
    out.index = 1;
    out.range = Matrix(n, 0);
    out.kernel = Matrix::Identity(n, n);
    return out;
  }
  const double cut = tol_rank * scale;
  for (int k = 0; k <= n; ++k) {
    if (out.range.cols() == 0) {
      out.index = k;
      return out;
    }
    Eigen::JacobiSVD<Matrix> ys(m * out.range, Eigen::ComputeFullU);
    const RealVector& sv = ys.singularValues();
    Index r = 0;
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cut) {
        ++r;
        out.core_level = std::min(out.core_level, sv(i) / scale);
      } else {
        out.nilpotent_level = std::max(out.nilpotent_level, sv(i) / scale);
      }
    }
    if (r == out.range.cols()) {
      out.index = k;
      return out;
    }
    out.range = ys.matrixU().leftCols(r);
    // preimage of the current kernel, dimension forced to n - r
    const Matrix proj = Matrix::Identity(n, n) - out.kernel * out.kernel.adjoint();
    Eigen::JacobiSVD<Matrix> ks(proj * m, Eigen::ComputeFullV);
    out.kernel = ks.matrixV().rightCols(n - r);
  }
  throw Error(ErrorCode::NumericalFailure, "power_chain: rank sequence did not stabilize");
}

}  // namespace dtph
