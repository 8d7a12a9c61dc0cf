#include "dtph/controllability.hpp"

#include <algorithm>

#include "dtph/error.hpp"
#include "dtph/pencil.hpp"

namespace dtph {

namespace {

// Singular values are measured against `scale`, the size of the data the
// matrix was assembled from: at an eigenvalue lambda E - A is pure round-off,
// and measuring it against itself would call it full rank.
RankWitness evaluate(const Matrix& m, Scalar lambda, double tol_rank, double scale) {
  RankWitness w;
  w.lambda = lambda;
  if (m.rows() == 0) {
    w.relative_sigma_min = 1.0;
    return w;
  }
  const RealVector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
  const double top = std::max(sv.size() ? sv(0) : 0.0, scale);
  for (Index i = 0; i < sv.size(); ++i)
    if (top > 0.0 && sv(i) > tol_rank * top) ++w.rank;
  // the n-th singular value decides full row rank
  const Index n = m.rows();
  w.relative_sigma_min = (top > 0.0 && sv.size() >= n) ? sv(n - 1) / top : 0.0;
  return w;
}

RankTestReport pencil_test(RankProperty prop, const Matrix& E, const Matrix& A, const Matrix& B, double tol_rank) {
  PencilAnalysis pa = analyze_pencil(E, A, tol_rank);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "rank test needs a regular pencil");
  RankTestReport rep;
  rep.property = prop;
  rep.holds = true;
  const Index n = A.rows();
  std::vector<Scalar> points = pa.finite_spectrum;
  points.push_back(pa.shift);
  for (Scalar lambda : points) {
    Matrix m(n, n + B.cols());
    m << lambda * E - A, B;
    RankWitness w = evaluate(m, lambda, tol_rank, std::abs(lambda) * spectral_norm(E) + spectral_norm(A) + spectral_norm(B));
    if (w.rank < n) rep.holds = false;
    if (w.relative_sigma_min > tol_rank && w.relative_sigma_min <= 10.0 * tol_rank) rep.marginal = true;
    rep.witnesses.push_back(w);
  }
  return rep;
}

// A single rank evaluation; defined without regularity of the pencil.
RankTestReport kernel_test(RankProperty prop, const Matrix& E, const Matrix& A, const Matrix& B, double tol_rank) {
  const Index n = A.rows();
  const Matrix ker = null_space(E, tol_rank);
  Matrix m(n, n + ker.cols() + B.cols());
  m << E, A * ker, B;
  RankTestReport rep;
  rep.property = prop;
  RankWitness w = evaluate(m, Scalar(0.0), tol_rank, spectral_norm(E) + spectral_norm(A) + spectral_norm(B));
  rep.holds = w.rank == n;
  rep.marginal = w.relative_sigma_min > tol_rank && w.relative_sigma_min <= 10.0 * tol_rank;
  rep.witnesses.push_back(w);
  return rep;
}

}  // namespace

std::string to_string(RankProperty p) {
  switch (p) {
    case RankProperty::C1: return "C1";
    case RankProperty::C2: return "C2";
    case RankProperty::O1: return "O1";
    case RankProperty::O2: return "O2";
  }
  return "?";
}

RankTestReport check_c1(const DescriptorSystem& sys, double tol_rank) {
  require_valid(sys);
  return pencil_test(RankProperty::C1, sys.E, sys.A, sys.B, tol_rank);
}

RankTestReport check_o1(const DescriptorSystem& sys, double tol_rank) {
  require_valid(sys);
  RankTestReport rep = pencil_test(RankProperty::O1, sys.E.adjoint(), sys.A.adjoint(), sys.C.adjoint(), tol_rank);
  // spectrum of the adjoint pencil is conjugated; report original points
  for (auto& w : rep.witnesses) w.lambda = std::conj(w.lambda);
  return rep;
}

RankTestReport check_c2(const DescriptorSystem& sys, double tol_rank) {
  require_valid(sys);
  return kernel_test(RankProperty::C2, sys.E, sys.A, sys.B, tol_rank);
}

RankTestReport check_o2(const DescriptorSystem& sys, double tol_rank) {
  require_valid(sys);
  return kernel_test(RankProperty::O2, sys.E.adjoint(), sys.A.adjoint(), sys.C.adjoint(), tol_rank);
}

}  // namespace dtph
