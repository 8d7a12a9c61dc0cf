#include "dtph/lmi.hpp"

#include <cmath>
#include <limits>

#include "dtph/error.hpp"

namespace dtph {

std::vector<Matrix> hermitian_basis(Index n, bool real_only) {
  std::vector<Matrix> basis;
  const double h = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    Matrix e = Matrix::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = e(j, i) = h;
      basis.push_back(e);
      if (!real_only) {
        Matrix f = Matrix::Zero(n, n);
        f(i, j) = Scalar(0.0, -h);
        f(j, i) = Scalar(0.0, h);
        basis.push_back(f);
      }
    }
  return basis;
}

RealVector hermitian_coordinates(const Matrix& x, bool real_only) {
  const std::vector<Matrix> basis = hermitian_basis(x.rows(), real_only);
  RealVector c(static_cast<Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    c(static_cast<Index>(i)) = (basis[i].adjoint() * x).trace().real();
  return c;
}

Index AffineLmi::barrier_degree() const {
  Index d = 0;
  for (const Matrix& f : constant) d += f.rows();
  return d;
}

Matrix AffineLmi::block(std::size_t k, const RealVector& y) const {
  Matrix s = constant[k];
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0) s += y(i) * coefficients[k][static_cast<std::size_t>(i)];
  return s;
}

double AffineLmi::min_eigenvalue(const RealVector& y) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < constant.size(); ++k) best = std::min(best, min_hermitian_eigenvalue(block(k, y)));
  return best;
}

namespace {

struct BarrierState {
  bool feasible = false;
  double log_det = 0.0;
  std::vector<Matrix> factor;  // lower Cholesky factor L of each block, S = L L^H
};

BarrierState evaluate(const AffineLmi& lmi, const RealVector& y, bool keep_factor) {
  BarrierState st;
  for (std::size_t k = 0; k < lmi.constant.size(); ++k) {
    const Matrix s = hermitian_part(lmi.block(k, y));
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) return st;
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal().real();
    for (Index i = 0; i < diag.size(); ++i) {
      if (!(diag(i) > 0.0)) return st;
      st.log_det += 2.0 * std::log(diag(i));
    }
    if (keep_factor) st.factor.push_back(llt.matrixL());
  }
  st.feasible = true;
  return st;
}

double objective(const RealVector& c, const RealVector& y, double mu, double log_det) {
  return -c.dot(y) - mu * log_det;
}

}  // namespace

BarrierResult maximize_linear(const AffineLmi& lmi, const RealVector& c, const RealVector& y0,
                              const BarrierOptions& opts) {
  const Index p = lmi.variables();
  if (c.size() != p || y0.size() != p) throw Error(ErrorCode::DimensionMismatch, "maximize_linear: size mismatch");
  BarrierState st = evaluate(lmi, y0, true);
  if (!st.feasible) throw Error(ErrorCode::NumericalFailure, "maximize_linear: start point is not strictly feasible");

  const double nu = static_cast<double>(lmi.barrier_degree());
  BarrierResult res;
  res.y = y0;
  double mu = opts.mu_initial;
  while (true) {
    // centering by damped Newton steps
    double decrement = std::numeric_limits<double>::infinity();
    bool converged = true;
    for (int it = 0; it < opts.max_newton; ++it) {
      // Whitened coefficients M_i = L^{-1} F_i L^{-H}: the Hessian is mu J^T J
      // with J stacking Re/Im vec(M_i), so a QR of J keeps the curvature of
      // flat directions that forming J^T J would round away.
      RealVector grad = -c;
      Index rows = 0;
      for (const Matrix& l : st.factor) rows += 2 * l.rows() * l.rows();
      Eigen::MatrixXd jac(rows, p);
      Index offset = 0;
      for (std::size_t k = 0; k < lmi.constant.size(); ++k) {
        const auto lower = st.factor[k].triangularView<Eigen::Lower>();
        const Index nk = st.factor[k].rows();
        for (Index i = 0; i < p; ++i) {
          Matrix w = lower.solve(lmi.coefficients[k][static_cast<std::size_t>(i)]);
          w = lower.solve(w.adjoint().eval());
          grad(i) -= mu * w.trace().real();
          const Eigen::Map<const Vector> v(w.data(), nk * nk);
          jac.col(i).segment(offset, nk * nk) = v.real();
          jac.col(i).segment(offset + nk * nk, nk * nk) = v.imag();
        }
        offset += 2 * nk * nk;
      }
      jac *= std::sqrt(mu);
      const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
      RealVector step;
      {
        // (J^T J) step = -grad via R^T R with the column pivoting undone
        const Index rk = std::max<Index>(qr.rank(), 1);
        const auto r = qr.matrixR().topLeftCorner(rk, rk).triangularView<Eigen::Upper>();
        const RealVector pg = (qr.colsPermutation().transpose() * (-grad)).head(rk);
        RealVector z = r.transpose().solve(pg);
        RealVector full = RealVector::Zero(p);
        full.head(rk) = r.solve(z);
        step = qr.colsPermutation() * full;
      }
      decrement = -grad.dot(step) / mu;
      ++res.newton_steps;
      if (decrement < 1e-12) break;

      const double f0 = objective(c, res.y, mu, st.log_det);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const RealVector trial = res.y + alpha * step;
        BarrierState ts = evaluate(lmi, trial, false);
        if (!ts.feasible) continue;
        if (objective(c, trial, mu, ts.log_det) <= f0 + 0.25 * alpha * grad.dot(step)) {
          res.y = trial;
          moved = true;
          break;
        }
      }
      if (!moved) {
        // a stalled search right at the centre is round-off, not failure
        converged = decrement <= 0.25;
        break;
      }
      st = evaluate(lmi, res.y, true);
      if (!st.feasible) throw Error(ErrorCode::NumericalFailure, "maximize_linear: lost feasibility");
    }

    res.mu = mu;
    res.value = c.dot(res.y);
    // duality-gap bound, valid near the central path only
    const double lambda = std::sqrt(std::max(decrement, 0.0));
    res.upper_bound = converged && lambda <= 0.5
                          ? res.value + mu * (nu + 2.0 * std::sqrt(nu) * lambda) / (1.0 - lambda)
                          : std::numeric_limits<double>::infinity();
    if (opts.stop && opts.stop(res.value, res.upper_bound, res.y)) {
      res.stopped_early = true;
      return res;
    }
    if (mu <= opts.mu_min) return res;
    mu = std::max(mu / opts.mu_factor, opts.mu_min);
  }
}

}  // namespace dtph
