#include "dtph/cayley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtph/error.hpp"
#include "dtph/kyp.hpp"
#include "dtph/pencil.hpp"

namespace dtph {

namespace {

const double kSqrt2 = std::sqrt(2.0);

struct FeedthroughSplit {
  Matrix kernel;      // ker(I + D)
  Matrix complement;  // ker(I + D)^perp
  double condition = 1.0;
};

// Kernel decided against max(1, |D|) so that a near-zero I + D is singular.
FeedthroughSplit split_feedthrough(const Matrix& D) {
  const Index m = D.rows();
  FeedthroughSplit out;
  if (m == 0) {
    out.kernel = Matrix(0, 0);
    out.complement = Matrix(0, 0);
    return out;
  }
  const Svd s = svd(Matrix::Identity(m, m) + D);
  const double cut = kTolRank * std::max(1.0, spectral_norm(D));
  Index r = 0;
  while (r < m && s.singular_values(r) > cut) ++r;
  out.complement = s.V.leftCols(r);
  out.kernel = s.V.rightCols(m - r);
  out.condition = r == m ? s.singular_values(0) / s.singular_values(m - 1) : std::numeric_limits<double>::infinity();
  return out;
}

DescriptorSystem cayley_blocks(const DescriptorSystem& sys) {
  const Index m = sys.m();
  const Matrix finv = solve(Matrix::Identity(m, m) + sys.D, Matrix::Identity(m, m));
  DescriptorSystem out = sys;
  out.A = sys.A - sys.B * finv * sys.C;
  out.B = kSqrt2 * sys.B * finv;
  out.C = -kSqrt2 * finv * sys.C;
  out.D = -finv * (sys.D - Matrix::Identity(m, m));
  return out;
}

bool is_identity(const Matrix& e) {
  return e.rows() == e.cols() && (e - Matrix::Identity(e.rows(), e.cols())).norm() == 0.0;
}

// Continuous-time standard form: the system itself when E = I, else its
// index-one reduction.
DescriptorSystem continuous_standard(const DescriptorSystem& csys, std::vector<std::string>* notes) {
  require_valid(csys);
  if (csys.time_domain != TimeDomain::Continuous)
    throw Error(ErrorCode::KindMismatch, "internal Cayley transform needs a continuous-time system");
  if (is_identity(csys.E)) return csys;
  const PencilAnalysis pa = analyze_pencil(csys.E, csys.A);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "internal Cayley transform: singular pencil");
  if (!pa.index || *pa.index > 1)
    throw Error(ErrorCode::IndexTooHigh, "internal Cayley transform: index > 1 has no standard form");
  if (notes) notes->push_back("descriptor system reduced to its standard form before the transform");
  return reduce_to_standard(csys).as_system(TimeDomain::Continuous);
}

struct Resolvent {
  Matrix inverse;  // (alpha I - A)^{-1}
  double condition = 1.0;
};

Resolvent resolvent_at(const Matrix& A, Scalar alpha) {
  if (!(alpha.real() > 0.0))
    throw Error(ErrorCode::ResolventViolation, "alpha must lie in the open right half plane");
  const Index n = A.rows();
  Resolvent r;
  if (n == 0) return r;
  const Matrix m = alpha * Matrix::Identity(n, n) - A;
  r.condition = condition_number(m);
  if (!(r.condition < 1e12))
    throw Error(ErrorCode::ResolventViolation,
                "alpha is an eigenvalue of A to working precision (condition " + std::to_string(r.condition) + ")");
  r.inverse = solve(m, Matrix::Identity(n, n));
  return r;
}

}  // namespace

std::string to_string(CayleyDirection d) {
  return d == CayleyDirection::ImpedanceToScattering ? "imp->scat" : "scat->imp";
}

std::pair<Vector, Vector> cayley_signals(const Vector& output, const Vector& input) {
  if (output.size() != input.size())
    throw Error(ErrorCode::DimensionMismatch, "cayley_signals: input and output sizes differ");
  return {(input - output) / kSqrt2, (output + input) / kSqrt2};
}

RestrictedScattering restrict_scattering(const DescriptorSystem& sys, const Matrix& X, double tol) {
  require_valid(sys);
  const Index n = sys.n();
  if (X.rows() != n || X.cols() != n) throw Error(ErrorCode::DimensionMismatch, "restrict_scattering: weight size");
  if (n && !(min_hermitian_eigenvalue(X) > 0.0))
    throw Error(ErrorCode::InvalidWeight, "restrict_scattering: weight is not positive definite");
  const FeedthroughSplit fs = split_feedthrough(sys.D);
  RestrictedScattering out;
  out.kernel_basis = fs.kernel;
  out.input_basis = fs.complement;
  const Matrix& k = fs.kernel;
  if (k.cols()) {
    const double xb = (X * sys.B * k).norm() / std::max(1.0, X.norm() * sys.B.norm());
    const double ck = (sys.C.adjoint() * k).norm() / std::max(1.0, sys.C.norm());
    out.inclusion_residual = std::max(xb, ck);
    // KYP feasibility to tol only pins these products to about sqrt(tol)
    if (out.inclusion_residual > 10.0 * std::sqrt(tol))
      throw Error(ErrorCode::KernelInclusion, "ker(I + D) is not contained in ker(X B) and ker(C^H): residual " +
                                                  std::to_string(out.inclusion_residual));
  }
  const Matrix w = build_lmi(sys, LmiKind::DiscreteScattering).evaluate(X);
  const double scale = std::max(1.0, X.norm()) * std::max({1.0, sys.A.squaredNorm(), sys.B.squaredNorm()});
  if (w.size() && min_hermitian_eigenvalue(w) < -tol * scale)
    throw Error(ErrorCode::InvalidWeight, "restrict_scattering: weight violates the scattering KYP inequality");

  const Matrix& q = fs.complement;
  out.system = sys;
  out.system.B = sys.B * q;
  out.system.C = q.adjoint() * sys.C;
  out.system.D = q.adjoint() * sys.D * q;
  return out;
}

ExternalCayleyResult external_cayley(const DescriptorSystem& sys, CayleyDirection direction,
                                     const std::optional<Matrix>& witness) {
  require_valid(sys);
  const Index m = sys.m();
  ExternalCayleyResult out;
  out.direction = direction;
  out.input_basis = Matrix::Identity(m, m);
  const FeedthroughSplit fs = split_feedthrough(sys.D);
  if (fs.kernel.cols() == 0) {
    out.feedthrough_condition = fs.condition;
    out.transformed = cayley_blocks(sys);
    if (fs.condition > 1e8) out.notes.push_back("I + D is ill-conditioned: " + std::to_string(fs.condition));
    return out;
  }
  if (direction == CayleyDirection::ImpedanceToScattering)
    throw Error(ErrorCode::SingularFeedthrough,
                "I + D is singular; the scattering representation needs an invertible I + D");

  Matrix X;
  if (witness) {
    X = *witness;
  } else {
    if (sys.time_domain != TimeDomain::Discrete)
      throw Error(ErrorCode::SingularFeedthrough, "I + D is singular and no scattering KYP witness was given");
    const LmiCertificate c = solve_feasibility(build_lmi(sys, LmiKind::DiscreteScattering), SolveMode::Strict);
    if (!c.feasible())
      throw Error(ErrorCode::SingularFeedthrough,
                  "I + D is singular and the scattering KYP inequality has no positive definite solution, so the "
                  "inputs cannot be restricted (e.g. D = -I leaves no input freedom)");
    X = c.X;
    out.notes.push_back("restriction witness obtained from the strict scattering KYP inequality");
  }
  const RestrictedScattering rs = restrict_scattering(sys, X);
  out.restricted = true;
  out.kernel_basis = rs.kernel_basis;
  out.input_basis = rs.input_basis;
  if (rs.input_basis.cols() == 0)
    throw Error(ErrorCode::SingularFeedthrough,
                "I + D = 0: the impedance form has no inputs left (the input is forced to zero)");
  out.notes.push_back("inputs restricted to ker(I + D)^perp, dimension " + std::to_string(rs.input_basis.cols()));
  const FeedthroughSplit inner = split_feedthrough(rs.system.D);
  if (inner.kernel.cols())
    throw Error(ErrorCode::SingularFeedthrough, "restricted feedthrough still has I + D singular");
  out.feedthrough_condition = inner.condition;
  out.transformed = cayley_blocks(rs.system);
  return out;
}

InternalCayleyResult internal_cayley(const DescriptorSystem& csys, Scalar alpha) {
  InternalCayleyResult out;
  const DescriptorSystem s = continuous_standard(csys, &out.notes);
  const Index n = s.n();
  const Resolvent r = resolvent_at(s.A, alpha);
  const double gain = std::sqrt(2.0 * alpha.real());
  out.alpha = alpha;
  out.resolvent_condition = r.condition;
  out.transfer_at_alpha = s.C * r.inverse * s.B + s.D;
  out.discrete = DescriptorSystem::standard(r.inverse * (std::conj(alpha) * Matrix::Identity(n, n) + s.A),
                                            gain * r.inverse * s.B, gain * s.C * r.inverse, out.transfer_at_alpha,
                                            TimeDomain::Discrete);
  return out;
}

double verify_congruence_identity(const DescriptorSystem& csys, const Matrix& X, Scalar alpha) {
  const DescriptorSystem s = continuous_standard(csys, nullptr);
  const Index n = s.n(), m = s.m();
  if (X.rows() != n || X.cols() != n) throw Error(ErrorCode::DimensionMismatch, "verify_congruence_identity: weight");
  const Resolvent r = resolvent_at(s.A, alpha);
  const InternalCayleyResult ic = internal_cayley(csys, alpha);
  const Matrix &Ad = ic.discrete.A, &Bd = ic.discrete.B;

  Matrix t = Matrix::Zero(n + m, n + m);
  t.topLeftCorner(n, n) = std::sqrt(2.0 * alpha.real()) * r.inverse;
  t.topRightCorner(n, m) = r.inverse * s.B;
  t.bottomRightCorner(m, m) = Matrix::Identity(m, m);
  Matrix cont(n + m, n + m);
  cont << -s.A.adjoint() * X - X * s.A, -X * s.B, -s.B.adjoint() * X, Matrix::Zero(m, m);
  Matrix disc(n + m, n + m);
  disc << -Ad.adjoint() * X * Ad + X, -Ad.adjoint() * X * Bd, -Bd.adjoint() * X * Ad, -Bd.adjoint() * X * Bd;
  return (t.adjoint() * cont * t - disc).norm();
}

}  // namespace dtph
