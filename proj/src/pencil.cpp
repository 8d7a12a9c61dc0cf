#include "dtph/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dtph/error.hpp"

namespace dtph {

namespace {

struct Sample {
  Scalar lambda;
  double margin;  // sigma_min / sigma_max of lambda E - A
};

double relative_sigma_min(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> s(m);
  const RealVector& sv = s.singularValues();
  if (sv.size() == 0) return 1.0;
  if (sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

Sample best_sample(const Matrix& E, const Matrix& A, std::mt19937_64& rng) {
  const Index n = A.rows();
  const double ne = spectral_norm(E);
  const double na = spectral_norm(A);
  const double scale = (ne > 0.0 && na > 0.0) ? na / ne : 1.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = scale * (1.1 + 0.8 * unit(rng));
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  Sample best{Scalar(radius, 0.0), -1.0};
  for (Index k = 0; k <= n; ++k) {
    const double angle = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n + 1);
    const Scalar lambda = std::polar(radius, angle);
    const double margin = relative_sigma_min(lambda * E - A);
    if (margin > best.margin) best = {lambda, margin};
  }
  return best;
}

std::vector<Scalar> spectrum_from_resolvent(const Matrix& e_hat, Scalar shift, int finite_count) {
  EigenDecomposition ed = eig_general(e_hat);
  std::vector<Scalar> mu(ed.eigenvalues.data(), ed.eigenvalues.data() + ed.eigenvalues.size());
  std::sort(mu.begin(), mu.end(), [](Scalar a, Scalar b) { return std::abs(a) > std::abs(b); });
  std::vector<Scalar> out;
  for (int i = 0; i < finite_count && i < static_cast<int>(mu.size()); ++i) out.push_back(shift - 1.0 / mu[i]);
  return out;
}

}  // namespace

PencilAnalysis analyze_pencil(const Matrix& E, const Matrix& A, double tol_rank) {
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows())
    throw Error(ErrorCode::DimensionMismatch, "analyze_pencil: E and A must be square of equal size");
  PencilAnalysis out;
  const Index n = A.rows();
  if (n == 0) {
    out.regular = true;
    out.index = 0;
    out.completely_causal = true;
    out.shift_margin = 1.0;
    return out;
  }

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  Sample s = best_sample(E, A, rng);
  if (s.margin <= 10.0 * tol_rank) {
    Sample again = best_sample(E, A, rng);
    if (again.margin > s.margin) s = again;
  }
  out.shift = s.lambda;
  out.shift_margin = s.margin;
  out.marginal = s.margin > tol_rank && s.margin <= 10.0 * tol_rank;
  if (out.marginal) out.notes.push_back("pencil regularity is marginal at the sampled points");
  out.regular = s.margin > tol_rank;
  if (!out.regular) {
    out.notes.push_back("lambda E - A is rank deficient at every sample point");
    return out;
  }

  const Matrix resolvent = s.lambda * E - A;
  const Matrix e_hat = solve(resolvent, E, std::numeric_limits<double>::infinity());

  const PowerChain chain = power_chain(e_hat, tol_rank);
  const int index = chain.index;
  const int core_rank = static_cast<int>(chain.range.cols());
  out.index = index;
  out.completely_causal = index <= 1;

  if (index <= 1) {
    try {
      DescriptorSystem pencil_only{E, A, Matrix(n, 0), Matrix(0, n), Matrix(0, 0)};
      ReducedStandardSystem red = reduce_to_standard(pencil_only, tol_rank, std::numeric_limits<double>::infinity());
      EigenDecomposition ed = eig_general(red.A);
      out.finite_spectrum.assign(ed.eigenvalues.data(), ed.eigenvalues.data() + ed.eigenvalues.size());
      return out;
    } catch (const Error&) {
      out.notes.push_back("finite spectrum taken from the resolvent transform");
    }
  }
  out.finite_spectrum = spectrum_from_resolvent(e_hat, s.lambda, core_rank);
  return out;
}

SemiExplicitForm semi_explicit(const DescriptorSystem& sys, double tol_rank) {
  require_valid(sys);
  const Index n = sys.n();
  SemiExplicitForm f;
  const bool identity = sys.E == Matrix::Identity(n, n);
  if (identity) {
    f.U = Matrix::Identity(n, n);
    f.V = Matrix::Identity(n, n);
    f.sigma = RealVector::Ones(n);
    f.r = n;
  } else {
    Svd s = svd(sys.E);
    f.U = s.U.adjoint();
    f.V = s.V;
    int r = 0;
    if (s.singular_values.size() && s.singular_values(0) > 0.0)
      for (Index i = 0; i < s.singular_values.size(); ++i)
        if (s.singular_values(i) > tol_rank * s.singular_values(0)) ++r;
    f.r = r;
    f.sigma = s.singular_values.head(r);
  }
  const Index r = f.r;
  const Index q = n - r;
  const Matrix a = f.U * sys.A * f.V;
  const Matrix b = f.U * sys.B;
  const Matrix c = sys.C * f.V;
  f.A11 = a.topLeftCorner(r, r);
  f.A12 = a.topRightCorner(r, q);
  f.A21 = a.bottomLeftCorner(q, r);
  f.A22 = a.bottomRightCorner(q, q);
  f.B1 = b.topRows(r);
  f.B2 = b.bottomRows(q);
  f.C1 = c.leftCols(r);
  f.C2 = c.rightCols(q);
  f.D = sys.D;
  if (q == 0) {
    f.index_at_most_one = true;
  } else {
    // A22 judged against the scale of the whole pencil, not its own norm
    const double scale = std::max(spectral_norm(sys.E), spectral_norm(sys.A));
    const RealVector sv = Eigen::JacobiSVD<Matrix>(f.A22).singularValues();
    const double smin = sv(q - 1);
    f.a22_condition = smin > 0.0 ? scale / smin : std::numeric_limits<double>::infinity();
    f.index_at_most_one = smin > tol_rank * scale;
  }
  return f;
}

ReducedStandardSystem reduce_to_standard(const SemiExplicitForm& f, double cond_max) {
  if (!f.index_at_most_one)
    throw Error(ErrorCode::IndexTooHigh, "A22 is singular: the pencil has index greater than one");
  const Index r = f.r;
  const Index q = f.A22.rows();
  const Index n = r + q;
  const Index m = f.B1.cols();
  ReducedStandardSystem red;
  red.a22_condition = f.a22_condition;
  red.U = f.U;
  red.sigma = f.sigma;
  if (f.a22_condition > cond_max)
    red.warnings.push_back("A22 is ill-conditioned (condition " + std::to_string(f.a22_condition) +
                           "): reduced coefficients may carry large errors");

  // A22^{-1} [A21, B2]
  Matrix rhs(q, r + m);
  rhs << f.A21, f.B2;
  const Matrix sol = q ? solve(f.A22, rhs, std::numeric_limits<double>::infinity()) : Matrix(0, r + m);
  const Matrix g21 = sol.leftCols(r);
  const Matrix g2 = sol.rightCols(m);

  RealVector inv_sqrt(r), sqrt_s(r);
  for (Index i = 0; i < r; ++i) {
    sqrt_s(i) = std::sqrt(f.sigma(i));
    inv_sqrt(i) = 1.0 / sqrt_s(i);
  }
  const Matrix s_inv_half = inv_sqrt.cast<Scalar>().asDiagonal();
  red.A = s_inv_half * (f.A11 - f.A12 * g21) * s_inv_half;
  red.B = s_inv_half * (f.B1 - f.A12 * g2);
  red.C = (f.C1 - f.C2 * g21) * s_inv_half;
  red.D = f.D - f.C2 * g2;

  Matrix sm(n, r);
  sm << s_inv_half, -g21 * s_inv_half;
  red.state_map = f.V * sm;
  Matrix im(n, m);
  im << Matrix::Zero(r, m), -g2;
  red.input_map = f.V * im;
  red.reduce_map = sqrt_s.cast<Scalar>().asDiagonal() * f.V.adjoint().topRows(r);
  return red;
}

ReducedStandardSystem reduce_to_standard(const DescriptorSystem& sys, double tol_rank, double cond_max) {
  return reduce_to_standard(semi_explicit(sys, tol_rank), cond_max);
}

DescriptorSystem ReducedStandardSystem::as_system(TimeDomain td) const {
  return DescriptorSystem::standard(A, B, C, D, td);
}

Matrix ReducedStandardSystem::lift_storage(const Matrix& x_reduced) const {
  const Index r = A.rows();
  const Index n = U.rows();
  RealVector inv_sqrt(r);
  for (Index i = 0; i < r; ++i) inv_sqrt(i) = 1.0 / std::sqrt(sigma(i));
  Matrix inner = Matrix::Zero(n, n);
  inner.topLeftCorner(r, r) = inv_sqrt.cast<Scalar>().asDiagonal() * x_reduced * inv_sqrt.cast<Scalar>().asDiagonal();
  return hermitian_part(U.adjoint() * inner * U);
}

Vector ReducedStandardSystem::constraint_residual(const Vector& x, const Vector& u) const {
  return x - state_map * (reduce_map * x) - input_map * u;
}

}  // namespace dtph

namespace dtph {

SpectralStability spectral_stability(const Matrix& A, double tol) {
  SpectralStability out;
  const Index n = A.rows();
  if (n == 0) {
    out.stable = out.asymptotically_stable = true;
    return out;
  }
  const EigenDecomposition ed = eig_general(A);
  std::vector<Scalar> ev(ed.eigenvalues.data(), ed.eigenvalues.data() + ed.eigenvalues.size());
  for (const Scalar& l : ev) out.spectral_radius = std::max(out.spectral_radius, std::abs(l));
  out.stable = out.spectral_radius <= 1.0 + tol;
  out.asymptotically_stable = out.spectral_radius < 1.0 - tol;
  if (!out.stable) out.details.push_back("eigenvalue outside the unit disk");
  // defective eigenvalues split by about sqrt(eps); cluster them before
  // comparing algebraic and geometric multiplicity
  const double cluster = 1e-5 * (1.0 + out.spectral_radius);
  std::vector<bool> used(ev.size(), false);
  for (std::size_t i = 0; i < ev.size() && out.stable; ++i) {
    if (used[i] || std::abs(std::abs(ev[i]) - 1.0) > std::max(tol, cluster)) continue;
    Scalar centre = 0.0;
    int mult = 0;
    for (std::size_t j = i; j < ev.size(); ++j)
      if (!used[j] && std::abs(ev[j] - ev[i]) <= cluster) {
        used[j] = true;
        centre += ev[j];
        ++mult;
      }
    centre /= static_cast<double>(mult);
    const Matrix shifted = A - centre * Matrix::Identity(n, n);
    const Eigen::JacobiSVD<Matrix> s(shifted);
    int geometric = 0;
    for (Index k = 0; k < s.singularValues().size(); ++k)
      if (s.singularValues()(k) <= 1e-7 * (1.0 + spectral_norm(A))) ++geometric;
    if (geometric < mult) {
      out.stable = false;
      out.details.push_back("unit-modulus eigenvalue " + std::to_string(centre.real()) + "+" +
                            std::to_string(centre.imag()) + "j is not semi-simple");
    }
  }
  return out;
}

}  // namespace dtph
