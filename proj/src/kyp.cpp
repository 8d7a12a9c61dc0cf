#include "dtph/kyp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtph/error.hpp"
#include "dtph/lmi.hpp"

namespace dtph {

std::string_view to_string(LmiKind kind) {
  switch (kind) {
    case LmiKind::DiscreteImpedance: return "d-iKYP";
    case LmiKind::DiscreteScattering: return "d-sKYP";
    case LmiKind::GeneralizedLyapunov: return "gen-lyapunov";
    case LmiKind::ContinuousImpedance: return "c-iKYP";
    case LmiKind::ContinuousScattering: return "c-sKYP";
  }
  return "unknown";
}

std::string_view to_string(LmiStatus status) {
  switch (status) {
    case LmiStatus::Feasible: return "feasible";
    case LmiStatus::Infeasible: return "infeasible";
    case LmiStatus::Marginal: return "marginal";
  }
  return "unknown";
}

namespace {

Matrix blocks(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  Matrix out(a.rows() + c.rows(), a.cols() + b.cols());
  out << a, b, c, d;
  return out;
}

bool is_continuous(LmiKind kind) {
  return kind == LmiKind::ContinuousImpedance || kind == LmiKind::ContinuousScattering;
}

bool is_impedance(LmiKind kind) {
  return kind == LmiKind::DiscreteImpedance || kind == LmiKind::ContinuousImpedance;
}

}  // namespace

LmiProblem build_lyapunov_lmi(const Matrix& E, const Matrix& A) {
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows())
    throw Error(ErrorCode::DimensionMismatch, "build_lyapunov_lmi: E and A must be square of equal size");
  LmiProblem p;
  p.kind = LmiKind::GeneralizedLyapunov;
  p.n = A.rows();
  p.W0 = Matrix::Zero(p.n, p.n);
  p.linear = [E, A](const Matrix& x) -> Matrix { return E.adjoint() * x * E - A.adjoint() * x * A; };
  p.constraint = WeightConstraint::PositiveDefiniteOnImageE;
  p.image_basis = range_basis(E);
  p.real_data = is_real(E) && is_real(A);
  return p;
}

LmiProblem build_lmi(const DescriptorSystem& sys, LmiKind kind) {
  require_valid(sys);
  if (kind == LmiKind::GeneralizedLyapunov) {
    if (sys.time_domain != TimeDomain::Discrete)
      throw Error(ErrorCode::KindMismatch, "gen-lyapunov needs a discrete-time system");
    return build_lyapunov_lmi(sys.E, sys.A);
  }
  const bool continuous = is_continuous(kind);
  if (continuous != (sys.time_domain == TimeDomain::Continuous))
    throw Error(ErrorCode::KindMismatch, std::string(to_string(kind)) + " does not match the system time domain");
  const Index n = sys.n(), m = sys.m();
  if (continuous && (sys.E - Matrix::Identity(n, n)).norm() > 1e-14 * std::sqrt(static_cast<double>(n)))
    throw Error(ErrorCode::KindMismatch, "continuous-time KYP inequalities need E = I; reduce first");

  LmiProblem p;
  p.kind = kind;
  p.n = n;
  p.real_data = sys.is_real();
  const Matrix &A = sys.A, &B = sys.B, &C = sys.C, &D = sys.D, &E = sys.E;
  if (is_impedance(kind))
    p.W0 = blocks(Matrix::Zero(n, n), C.adjoint(), C, D + D.adjoint());
  else
    p.W0 = blocks(-C.adjoint() * C, -C.adjoint() * D, -D.adjoint() * C,
                  Matrix::Identity(m, m) - D.adjoint() * D);
  if (continuous)
    p.linear = [A, B, m](const Matrix& x) -> Matrix {
      return blocks(-A.adjoint() * x - x * A, -x * B, -B.adjoint() * x, Matrix::Zero(m, m));
    };
  else
    p.linear = [A, B, E](const Matrix& x) -> Matrix {
      const Matrix xa = x * A, xb = x * B;
      return blocks(E.adjoint() * x * E - A.adjoint() * xa, -A.adjoint() * xb, -B.adjoint() * xa, -B.adjoint() * xb);
    };
  p.image_basis = Matrix::Identity(n, n);
  return p;
}

namespace {

// Problem in normalized units: X = x_scale * Xn, W = w_scale * Wn.
class Normalized {
 public:
  Normalized(const LmiProblem& p, const LmiOptions& opts) : opts_(opts) {
    n_ = p.n;
    basis_ = hermitian_basis(n_, p.real_data);
    double lnorm = 0.0;
    for (const Matrix& b : basis_) {
      lin_.push_back(hermitian_part(p.linear(b)));
      lnorm = std::max(lnorm, spectral_norm(lin_.back()));
    }
    const double w0 = spectral_norm(p.W0);
    degenerate_ = n_ == 0 || lnorm <= 1e-14 * (1.0 + w0);
    if (!degenerate_) {
      x_scale_ = std::max(1.0, w0 / lnorm);
      w_scale_ = std::max(w0, lnorm * x_scale_);
      for (Matrix& l : lin_) l *= x_scale_ / w_scale_;
      w0n_ = hermitian_part(p.W0) / w_scale_;
      rho_ = p.homogeneous() ? static_cast<double>(n_) : opts.rho_factor * static_cast<double>(n_);
    }
    on_image_ = p.constraint == WeightConstraint::PositiveDefiniteOnImageE;
    z_ = on_image_ ? p.image_basis : Matrix(Matrix::Identity(n_, n_));
  }

  bool degenerate() const { return degenerate_; }
  Index q() const { return static_cast<Index>(basis_.size()); }
  double rho() const { return rho_; }
  double x_scale() const { return x_scale_; }
  double w_scale() const { return w_scale_; }

  Matrix xn(const RealVector& y) const {
    Matrix x = Matrix::Zero(n_, n_);
    for (Index i = 0; i < q(); ++i) x += y(i) * basis_[static_cast<std::size_t>(i)];
    return x;
  }
  Matrix wn(const RealVector& y) const {
    Matrix w = w0n_;
    for (Index i = 0; i < q(); ++i) w += y(i) * lin_[static_cast<std::size_t>(i)];
    return w;
  }
  // Block on which definiteness is demanded in strict mode.
  Matrix target(const Matrix& x) const { return z_.adjoint() * x * z_; }
  bool positive_definite(const Matrix& x) const {
    const Matrix t = target(x);
    if (t.rows() == 0) return true;
    const double tr = t.trace().real();
    return min_hermitian_eigenvalue(t) >= opts_.tol_strict * std::max(tr, 0.0) / static_cast<double>(t.rows()) &&
           min_hermitian_eigenvalue(t) > 0.0;
  }

  RealVector centre_coordinates(double rho) const {
    RealVector y = RealVector::Zero(q());
    for (Index i = 0; i < n_; ++i) y(i) = rho / (2.0 * static_cast<double>(n_));  // diagonal basis first
    return y;
  }

  enum class Shift { None, Both, Target };

  // Blocks Wn + relax I, Xn + relax I (or the target block) and rho - tr Xn.
  // Shift::Both subtracts t I from Wn and Xn; Shift::Target subtracts s I from
  // the strict-mode target block. The shift is the last variable.
  AffineLmi make(double relax, double rho, Shift shift) const {
    const bool with_shift = shift != Shift::None;
    AffineLmi lmi;
    auto push = [&](const Matrix& constant, std::vector<Matrix> coeffs, const Matrix& shift_coeff) {
      if (with_shift) coeffs.push_back(shift_coeff);
      lmi.constant.push_back(constant);
      lmi.coefficients.push_back(std::move(coeffs));
    };
    const Index nw = w0n_.rows();
    const Matrix iw = Matrix::Identity(nw, nw), ix = Matrix::Identity(n_, n_);
    if (shift == Shift::Both) {
      push(w0n_, lin_, -iw);
      push(Matrix::Zero(n_, n_), basis_, -ix);
    } else {
      push(w0n_ + relax * iw, lin_, Matrix::Zero(nw, nw));
      const bool separate = shift == Shift::Target && on_image_;
      if (shift == Shift::None || separate) push(relax * ix, basis_, Matrix::Zero(n_, n_));
      if (shift == Shift::Target) {
        std::vector<Matrix> ct;
        for (const Matrix& b : basis_) ct.push_back(target(b));
        const Index r = z_.cols();
        push(Matrix::Zero(r, r), ct, -Matrix::Identity(r, r));
      }
    }
    std::vector<Matrix> ctr;
    for (const Matrix& b : basis_) ctr.push_back(Matrix::Constant(1, 1, -b.trace()));
    push(Matrix::Constant(1, 1, rho), ctr, Matrix::Zero(1, 1));
    return lmi;
  }

 private:
  const LmiOptions& opts_;
  Index n_ = 0;
  std::vector<Matrix> basis_, lin_;
  Matrix w0n_, z_;
  double x_scale_ = 1.0, w_scale_ = 1.0, rho_ = 0.0;
  bool degenerate_ = false;
  bool on_image_ = false;
};

void fill_eigs(const LmiProblem& p, LmiCertificate& c) {
  c.min_eig_W = c.X.rows() + p.W0.rows() == 0 ? 0.0 : min_hermitian_eigenvalue(p.evaluate(c.X));
  c.min_eig_X = c.X.rows() == 0 ? 0.0 : min_hermitian_eigenvalue(c.X);
}

LmiCertificate solve_degenerate(const LmiProblem& p, SolveMode mode, const LmiOptions& opts) {
  LmiCertificate c;
  c.mode = mode;
  c.X = Matrix::Identity(p.n, p.n);
  fill_eigs(p, c);
  const double w_scale = std::max(1.0, spectral_norm(p.W0));
  c.w_scale = w_scale;
  c.t_star = c.upper_bound = c.min_eig_W / w_scale;
  if (c.min_eig_W >= -opts.tol_lmi * w_scale) {
    c.status = LmiStatus::Feasible;
    c.on_boundary = c.t_star < opts.tol_strict;
    c.note = p.n == 0 ? "no state: decided on the constant block" : "block independent of X";
  } else {
    c.status = LmiStatus::Infeasible;
    c.note = p.n == 0 ? "no state and the constant block is indefinite" : "block independent of X and indefinite";
  }
  return c;
}

bool verify(const LmiProblem& p, const LmiOptions& opts, LmiCertificate& c) {
  fill_eigs(p, c);
  return all_finite(c.X) && c.min_eig_W >= -opts.tol_lmi * c.w_scale && c.min_eig_X >= -opts.tol_lmi * c.x_scale;
}

}  // namespace

LmiCertificate solve_feasibility(const LmiProblem& p, SolveMode mode, const LmiOptions& opts) {
  if (p.W0.rows() != p.W0.cols()) throw Error(ErrorCode::DimensionMismatch, "solve_feasibility: W0 not square");
  Normalized nz(p, opts);
  if (nz.degenerate()) return solve_degenerate(p, mode, opts);

  LmiCertificate cert;
  cert.mode = mode;
  cert.x_scale = nz.x_scale();
  cert.w_scale = nz.w_scale();
  const Index Q = nz.q();
  const double boundary = 1e-2 * opts.tol_lmi;

  // max t with Wn >= tI, Xn >= tI, tr Xn <= rho
  double rho = nz.rho();
  BarrierResult shift;
  for (int growth = 0;; ++growth) {
    const AffineLmi lmi = nz.make(0.0, rho, Normalized::Shift::Both);
    RealVector y0(Q + 1);
    y0.head(Q) = nz.centre_coordinates(rho);
    const double start = std::min(min_hermitian_eigenvalue(nz.wn(y0.head(Q))), rho / (2.0 * double(p.n)));
    y0(Q) = start - 1.0;
    RealVector c = RealVector::Zero(Q + 1);
    c(Q) = 1.0;
    BarrierOptions bo;
    bo.stop = [&](double value, double upper, const RealVector&) {
      return value >= opts.tol_strict || upper < -opts.tol_lmi || (value >= -boundary && upper < opts.tol_strict);
    };
    shift = maximize_linear(lmi, c, y0, bo);
    const double trace = nz.xn(shift.y.head(Q)).trace().real();
    if (p.homogeneous() || growth == 2 || shift.upper_bound >= -opts.tol_lmi || trace < 0.9 * rho) break;
    rho *= 10.0;
  }
  cert.rho = rho;
  cert.t_star = shift.value;
  cert.upper_bound = shift.upper_bound;
  RealVector y = shift.y.head(Q);
  cert.X = cert.x_scale * nz.xn(y);

  if (shift.value >= -opts.tol_lmi) {
    cert.status = LmiStatus::Feasible;
    cert.on_boundary = shift.value < opts.tol_strict;
  } else if (shift.upper_bound < -opts.tol_lmi) {
    cert.status = LmiStatus::Infeasible;
    cert.note = "no positive semidefinite solution: optimal shift bounded by " + std::to_string(shift.upper_bound);
  } else {
    cert.status = LmiStatus::Marginal;
    cert.note = "undecided: optimal shift in [" + std::to_string(shift.value) + ", " +
                std::to_string(shift.upper_bound) + "]";
  }
  if (cert.status != LmiStatus::Feasible) {
    fill_eigs(p, cert);
    return cert;
  }
  if (cert.on_boundary) cert.note = "solution on the boundary: optimal shift below tol_strict";

  const double delta = std::max(1e-11, -2.0 * shift.value);

  if (mode == SolveMode::Semidefinite) {
    if (opts.detect_forced_zero && cert.on_boundary) {
      // max tr Xn with Wn >= -delta I, Xn >= -delta I
      const AffineLmi lmi = nz.make(delta, rho, Normalized::Shift::None);
      RealVector c(Q);
      for (Index i = 0; i < Q; ++i) c(i) = i < p.n ? 1.0 : 0.0;
      BarrierOptions bo;
      bo.stop = [&](double value, double upper, const RealVector&) {
        return value > opts.tol_strict || upper < opts.tol_strict;
      };
      const BarrierResult tr = maximize_linear(lmi, c, y, bo);
      if (tr.upper_bound < opts.tol_strict) {
        cert.forced_zero = true;
        cert.X = Matrix::Zero(p.n, p.n);
        cert.note = "only X = 0 solves: maximal trace " + std::to_string(tr.upper_bound * cert.x_scale);
      }
    }
    if (!verify(p, opts, cert)) {
      cert.status = LmiStatus::Marginal;
      cert.note = "witness failed re-verification";
    }
    return cert;
  }

  // strict: X > 0 (on im E) with W >= 0
  cert.note = "positive definite solution found";
  const bool vacuous = nz.target(Matrix::Zero(p.n, p.n)).rows() == 0;
  if (!vacuous && (opts.centre_witness || !(shift.value >= opts.tol_strict && nz.positive_definite(nz.xn(y))))) {
    const AffineLmi lmi = nz.make(delta, rho, Normalized::Shift::Target);
    RealVector y0(Q + 1);
    y0.head(Q) = y;
    const Matrix tgt = nz.target(nz.xn(y));
    y0(Q) = (tgt.rows() ? min_hermitian_eigenvalue(tgt) : 0.0) - 1.0;
    RealVector c = RealVector::Zero(Q + 1);
    c(Q) = 1.0;
    BarrierOptions bo;
    bo.stop = [&](double value, double upper, const RealVector& yy) {
      const bool pd = value >= opts.tol_strict && nz.positive_definite(nz.xn(yy.head(Q)));
      return (pd && (!opts.centre_witness || value >= 0.5 * upper)) || upper < opts.tol_strict;
    };
    const BarrierResult s = maximize_linear(lmi, c, y0, bo);
    y = s.y.head(Q);
    cert.X = cert.x_scale * nz.xn(y);
    cert.t_star = s.value;
    cert.upper_bound = s.upper_bound;
    if (s.value >= opts.tol_strict && nz.positive_definite(nz.xn(y))) {
      cert.status = LmiStatus::Feasible;
      cert.on_boundary = false;
    } else if (s.upper_bound < opts.tol_strict) {
      cert.status = LmiStatus::Infeasible;
      cert.note = "no positive definite solution: smallest eigenvalue bounded by " + std::to_string(s.upper_bound);
      fill_eigs(p, cert);
      return cert;
    } else {
      cert.status = LmiStatus::Marginal;
      cert.note = "positive definiteness undecided";
      fill_eigs(p, cert);
      return cert;
    }
  }
  if (!verify(p, opts, cert) || !nz.positive_definite(cert.X / cert.x_scale)) {
    cert.status = LmiStatus::Marginal;
    cert.note = "witness failed re-verification";
  }
  return cert;
}

LyapunovClassification gen_lyapunov_classify(const Matrix& E, const Matrix& A, const LmiOptions& opts) {
  const PencilAnalysis pa = analyze_pencil(E, A);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "gen_lyapunov_classify: singular pencil");
  LyapunovClassification out;
  out.certificate = solve_feasibility(build_lyapunov_lmi(E, A), SolveMode::Strict, opts);
  out.stable_and_causal = out.certificate.feasible();
  if (pa.index && *pa.index <= 1) {
    const Index n = A.rows();
    DescriptorSystem sys{E, A, Matrix::Zero(n, 0), Matrix::Zero(0, n), Matrix::Zero(0, 0)};
    out.spectral_verdict = spectral_stability(reduce_to_standard(sys).A).stable;
  }
  return out;
}

PassivityVerdict check_passivity(const DescriptorSystem& sys, PassivityKind kind, const LmiOptions& opts) {
  require_valid(sys);
  if (sys.time_domain != TimeDomain::Discrete)
    throw Error(ErrorCode::KindMismatch, "check_passivity: discrete-time systems only");
  const PencilAnalysis pa = analyze_pencil(sys.E, sys.A);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "check_passivity: singular pencil");
  if (!pa.index || *pa.index > 1)
    throw Error(ErrorCode::IndexTooHigh,
                "check_passivity: index " + std::to_string(pa.index.value_or(-1)) +
                    " > 1 is unsupported; the KYP inequality on the full descriptor state is not equivalent there");
  PassivityVerdict out;
  out.reduced = reduce_to_standard(sys);
  const LmiKind lk = kind == PassivityKind::Impedance ? LmiKind::DiscreteImpedance : LmiKind::DiscreteScattering;
  out.certificate = solve_feasibility(build_lmi(out.reduced.as_system(), lk), SolveMode::Semidefinite, opts);
  out.passive = out.certificate.feasible();
  if (out.passive) out.storage = out.reduced.lift_storage(out.certificate.X);
  return out;
}

}  // namespace dtph
