#include "dtph/ph.hpp"

#include <algorithm>
#include <cmath>

#include "dtph/drazin.hpp"
#include "dtph/error.hpp"

namespace dtph {

namespace {

void require_positive_definite(const Matrix& X, double tol_strict) {
  if (X.rows() == 0) return;
  if ((X - X.adjoint()).norm() > 1e-12 * (1.0 + X.norm()))
    throw Error(ErrorCode::InvalidWeight, "weight is not Hermitian");
  const double lo = min_hermitian_eigenvalue(X);
  const double mean = X.trace().real() / static_cast<double>(X.rows());
  if (!(lo > 0.0) || lo < tol_strict * mean)
    throw Error(ErrorCode::InvalidWeight,
                "weight is not positive definite: eigmin " + std::to_string(lo) + ", trace/n " + std::to_string(mean));
}

PhRepresentation represent(const DescriptorSystem& std_sys, const Matrix& X) {
  const Index n = std_sys.n();
  PhRepresentation r;
  r.X = hermitian_part(X);
  r.X_half = n ? matrix_sqrt_psd(HermitianMatrix(r.X)) : Matrix(0, 0);
  const Matrix inv_half = n ? solve(r.X_half, Matrix::Identity(n, n)) : Matrix(0, 0);
  r.A = r.X_half * std_sys.A * inv_half;
  r.B = r.X_half * std_sys.B;
  r.C = std_sys.C * inv_half;
  r.D = std_sys.D;
  Matrix blk(n + std_sys.m(), n + std_sys.m());
  blk << r.A, r.B, r.C, r.D;
  r.norm_value = blk.size() ? spectral_norm(blk) : 0.0;
  return r;
}

bool is_identity(const Matrix& e) {
  return e.rows() == e.cols() && (e - Matrix::Identity(e.rows(), e.cols())).norm() == 0.0;
}

// Standard system carrying the weight: the system itself when E = I,
// otherwise its index-one reduction.
DescriptorSystem weight_carrier(const DescriptorSystem& sys) {
  if (is_identity(sys.E)) return sys;
  return reduce_to_standard(sys).as_system(sys.time_domain);
}

void require_causal(const DescriptorSystem& sys, const char* who) {
  const PencilAnalysis pa = analyze_pencil(sys.E, sys.A);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, std::string(who) + ": singular pencil");
  if (!pa.index || *pa.index > 1)
    throw Error(ErrorCode::IndexTooHigh, std::string(who) + ": index " + std::to_string(pa.index.value_or(-1)) +
                                             " > 1 has no reduced standard system");
}

}  // namespace

double PhRepresentation::hamiltonian(const Vector& x) const { return 0.5 * (x.adjoint() * X * x)(0, 0).real(); }

double weighted_norm(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, const Matrix& X,
                     double tol_strict) {
  if (X.rows() != A.rows() || X.cols() != A.rows())
    throw Error(ErrorCode::DimensionMismatch, "weighted_norm: weight size differs from the state size");
  require_positive_definite(X, tol_strict);
  return represent(DescriptorSystem::standard(A, B, C, D), X).norm_value;
}

PhRepresentation to_ph(const DescriptorSystem& sys, const Matrix& X, const LmiOptions& opts) {
  require_valid(sys);
  if (!is_identity(sys.E)) require_causal(sys, "to_ph");
  const DescriptorSystem carrier = weight_carrier(sys);
  if (X.rows() != carrier.n() || X.cols() != carrier.n())
    throw Error(ErrorCode::DimensionMismatch, "to_ph: weight size differs from the reduced state size");
  require_positive_definite(X, opts.tol_strict);
  const LmiProblem p = build_lmi(carrier, LmiKind::DiscreteScattering);
  const Matrix w = p.evaluate(X);
  Matrix ab(carrier.n(), carrier.n() + carrier.m());
  ab << carrier.A, carrier.B;
  const double scale = std::max(1.0, X.norm()) * std::max(1.0, ab.size() ? std::pow(spectral_norm(ab), 2) : 0.0);
  if (w.size() && min_hermitian_eigenvalue(w) < -opts.tol_lmi * scale)
    throw Error(ErrorCode::InvalidWeight,
                "to_ph: weight violates the scattering KYP inequality by " + std::to_string(-min_hermitian_eigenvalue(w)));
  return represent(carrier, X);
}

PhVerdict is_ph(const DescriptorSystem& sys, const LmiOptions& opts) {
  require_valid(sys);
  if (sys.time_domain != TimeDomain::Discrete) throw Error(ErrorCode::KindMismatch, "is_ph: discrete-time systems only");
  require_causal(sys, "is_ph");
  PhVerdict out;
  out.reduced = reduce_to_standard(sys);
  const DescriptorSystem carrier = out.reduced.as_system();
  const LmiProblem p = build_lmi(carrier, LmiKind::DiscreteScattering);
  LmiOptions strict = opts;
  strict.centre_witness = true;
  out.certificate = solve_feasibility(p, SolveMode::Strict, strict);
  if (out.certificate.feasible()) {
    out.is_ph = true;
    out.representation = represent(carrier, out.certificate.X);
    out.note = "positive definite weight found; weights are not unique in general";
    return out;
  }
  if (out.certificate.status == LmiStatus::Infeasible) {
    const LmiCertificate semi = solve_feasibility(p, SolveMode::Semidefinite, opts);
    if (semi.feasible())
      out.note = semi.forced_zero ? "scattering passive, but only X = 0 solves the KYP inequality"
                                  : "scattering passive, but every KYP solution is singular";
    else
      out.note = "not scattering passive";
  } else {
    out.note = "undecided: " + out.certificate.note;
  }
  return out;
}

StabilityReport classify_stability(const Matrix& E, const Matrix& A, const LmiOptions& opts) {
  const PencilAnalysis pa = analyze_pencil(E, A);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "classify_stability: singular pencil");
  StabilityReport out;
  if (is_identity(E)) {
    out.finite_dynamics = A;
  } else {
    // restrict the commuting pair to the core subspace, where E^ is invertible
    const DrazinPair dp = drazin_pair(E, A);
    const PowerChain pc = power_chain(dp.E_hat);
    const Matrix& r = pc.range;
    out.finite_dynamics = r.cols() ? solve(r.adjoint() * dp.E_hat * r, r.adjoint() * dp.A_hat * r) : Matrix(0, 0);
  }
  const SpectralStability ss = spectral_stability(out.finite_dynamics);
  out.stable = ss.stable;
  out.asymptotically_stable = ss.asymptotically_stable;
  out.spectral_radius = ss.spectral_radius;
  out.details = ss.details;
  const Index nf = out.finite_dynamics.rows();
  if (nf == 0) {
    out.lyapunov_stable = true;
    out.details.push_back("no finite dynamics");
  } else {
    const LmiCertificate c =
        solve_feasibility(build_lyapunov_lmi(Matrix::Identity(nf, nf), out.finite_dynamics), SolveMode::Strict, opts);
    out.lyapunov_stable = c.feasible();
    if (c.status == LmiStatus::Marginal) out.details.push_back("Lyapunov inequality undecided: " + c.note);
  }
  if (!out.agrees()) out.details.push_back("spectral test and Lyapunov inequality disagree");
  return out;
}

}  // namespace dtph
