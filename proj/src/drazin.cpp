#include "dtph/drazin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtph/error.hpp"
#include "dtph/pencil.hpp"

namespace dtph {

namespace {

double rel(const Matrix& residual, double scale) {
  return residual.size() ? residual.norm() / scale : 0.0;
}

}  // namespace

DrazinResult drazin(const Matrix& m, double tol_rank) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "drazin: square matrix required");
  if (!all_finite(m)) throw Error(ErrorCode::InvalidMatrix, "drazin: non-finite entries");
  const Index n = m.rows();
  DrazinResult out;
  if (n == 0) {
    out.inverse = Matrix(0, 0);
    return out;
  }

  const PowerChain chain = power_chain(m, tol_rank);
  out.index = chain.index;
  out.core_rank = static_cast<int>(chain.range.cols());
  out.core_level = chain.core_level;
  out.nilpotent_level = chain.nilpotent_level;
  const Index r = out.core_rank;
  const double noise = std::max(out.nilpotent_level, std::numeric_limits<double>::epsilon());
  if (r > 0 && r < n && out.core_level < 1e3 * noise)
    throw Error(ErrorCode::NumericalFailure, "drazin: ambiguous core/nilpotent split (core level " +
                                                 std::to_string(out.core_level) + ", nilpotent level " +
                                                 std::to_string(out.nilpotent_level) + ")");

  // range and kernel of m^index are complementary invariant subspaces
  Matrix t(n, n);
  t << chain.range, chain.kernel;
  const Matrix t_inv = solve(t, Matrix::Identity(n, n), std::numeric_limits<double>::infinity());
  const Matrix core = (t_inv * m * t).topLeftCorner(r, r);
  Matrix mid = Matrix::Zero(n, n);
  if (r > 0) mid.topLeftCorner(r, r) = solve(core, Matrix::Identity(r, r), std::numeric_limits<double>::infinity());
  out.inverse = t * mid * t_inv;

  Matrix power = Matrix::Identity(n, n);
  for (int i = 0; i < out.index; ++i) power = power * m;
  const Matrix& md = out.inverse;
  const double scale = (1.0 + m.norm()) * (1.0 + md.norm()) * (1.0 + md.norm());
  const Matrix mk1 = power * m;
  out.axiom_residual = std::max({rel(m * md - md * m, scale), rel(md * m * md - md, scale),
                                 rel(md * mk1 - power, scale * (1.0 + power.norm()))});
  if (out.axiom_residual > 1e-8)
    throw Error(ErrorCode::NumericalFailure,
                "drazin: defining identities violated (residual " + std::to_string(out.axiom_residual) + ")");
  return out;
}

Matrix drazin_inverse(const Matrix& m, double tol_rank) { return drazin(m, tol_rank).inverse; }

DrazinPair drazin_pair(const Matrix& E, const Matrix& A, double tol_rank) {
  PencilAnalysis pa = analyze_pencil(E, A, tol_rank);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "drazin_pair: pencil is not regular");
  DrazinPair p;
  p.shift = pa.shift;
  p.resolvent = pa.shift * E - A;
  const Index n = E.rows();
  Matrix rhs(n, 2 * n);
  rhs << E, A;
  const Matrix sol = solve(p.resolvent, rhs, std::numeric_limits<double>::infinity());
  p.E_hat = sol.leftCols(n);
  p.A_hat = sol.rightCols(n);
  DrazinResult de = drazin(p.E_hat, tol_rank);
  p.ED = de.inverse;
  p.nu = de.index;
  p.AD = drazin_inverse(p.A_hat, tol_rank);
  return p;
}

namespace {

// (I - ED E) sum_{i<nu} (AD E)^i AD f_{k+i}, all in transformed coordinates
Vector lookahead(const DrazinPair& p, const Matrix& complement, const Matrix& ad_e, const std::vector<Vector>& f_hat,
                 std::size_t k) {
  const Index n = p.E_hat.rows();
  Vector acc = Vector::Zero(n);
  for (int i = p.nu - 1; i >= 0; --i) acc = ad_e * acc + p.AD * f_hat[k + static_cast<std::size_t>(i)];
  return complement * acc;
}

}  // namespace

DaeSolution solve_dae(const Matrix& E, const Matrix& A, const std::vector<Vector>& f, const Vector& v, int horizon,
                      double tol_rank) {
  if (horizon < 0) throw Error(ErrorCode::InsufficientInput, "negative horizon");
  const DrazinPair p = drazin_pair(E, A, tol_rank);
  const Index n = E.rows();
  if (v.size() != n) throw Error(ErrorCode::DimensionMismatch, "solve_dae: v has wrong length");
  const std::size_t needed = static_cast<std::size_t>(horizon + p.nu);
  if (f.size() < needed)
    throw Error(ErrorCode::InsufficientInput, "solve_dae needs " + std::to_string(needed) +
                                                  " inhomogeneity terms (index " + std::to_string(p.nu) + ")");

  std::vector<Vector> f_hat;
  f_hat.reserve(needed);
  for (std::size_t j = 0; j < needed; ++j) {
    if (f[j].size() != n) throw Error(ErrorCode::DimensionMismatch, "solve_dae: f term has wrong length");
    f_hat.push_back(solve(p.resolvent, f[j], std::numeric_limits<double>::infinity()));
  }

  const Matrix step = p.ED * p.A_hat;
  const Matrix proj = p.ED * p.E_hat;
  const Matrix complement = Matrix::Identity(n, n) - proj;
  const Matrix ad_e = p.AD * p.E_hat;

  DaeSolution out;
  out.nu = p.nu;
  Vector free_part = proj * v;       // (ED A)^k ED E v
  Vector driven = Vector::Zero(n);   // sum_{j<k} (ED A)^{k-j-1} ED f_j
  for (int k = 0; k <= horizon; ++k) {
    out.x.push_back(free_part + driven - lookahead(p, complement, ad_e, f_hat, static_cast<std::size_t>(k)));
    if (k < horizon) {
      free_part = step * free_part;
      driven = step * driven + p.ED * f_hat[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 0; k < horizon; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double scale = 1.0 + out.x[kk].norm() + f[kk].norm();
    out.max_residual = std::max(out.max_residual, (E * out.x[kk + 1] - A * out.x[kk] - f[kk]).norm() / scale);
  }
  return out;
}

ConsistencyResult check_consistency(const Matrix& E, const Matrix& A, const Vector& x0, const std::vector<Vector>& f,
                                    double tol, double tol_rank) {
  const DrazinPair p = drazin_pair(E, A, tol_rank);
  const Index n = E.rows();
  if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "check_consistency: x0 has wrong length");
  if (f.size() < static_cast<std::size_t>(p.nu))
    throw Error(ErrorCode::InsufficientInput, "check_consistency needs " + std::to_string(p.nu) + " terms");
  std::vector<Vector> f_hat;
  for (int i = 0; i < p.nu; ++i) f_hat.push_back(solve(p.resolvent, f[static_cast<std::size_t>(i)],
                                                       std::numeric_limits<double>::infinity()));
  const Matrix proj = p.ED * p.E_hat;
  const Matrix complement = Matrix::Identity(n, n) - proj;
  const Vector rhs = x0 + lookahead(p, complement, p.AD * p.E_hat, f_hat, 0);

  ConsistencyResult out;
  out.nu = p.nu;
  out.v = pinv(proj, tol_rank) * rhs;
  out.residual = (proj * out.v - rhs).norm() / (1.0 + rhs.norm());
  out.consistent = out.residual <= tol;
  return out;
}

}  // namespace dtph
