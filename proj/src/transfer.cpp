#include "dtph/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "dtph/cayley.hpp"
#include "dtph/drazin.hpp"
#include "dtph/error.hpp"
#include "dtph/pencil.hpp"

namespace dtph {

namespace {

constexpr double kPathAgreement = 1e-9;

double realness_margin(RealnessKind kind, const Matrix& t) {
  const Index m = t.rows();
  if (m == 0) return std::numeric_limits<double>::infinity();
  if (kind == RealnessKind::Positive) return min_hermitian_eigenvalue(t + t.adjoint());
  return min_hermitian_eigenvalue(Matrix::Identity(m, m) - t.adjoint() * t);
}

// Pole-zero cancellation at lambda: the eigenvectors are unobservable or the
// left eigenvectors uncontrollable.
bool cancelled_at(const DescriptorSystem& sys, Scalar lambda) {
  const Matrix p = lambda * sys.E - sys.A;
  const Svd s = svd(p);
  const Index n = p.rows();
  Index k = 0;
  const double cut = 1e-8 * std::max(1.0, s.singular_values(0));
  while (k < n && s.singular_values(n - 1 - k) <= cut) ++k;
  k = std::max<Index>(k, 1);
  const Matrix right = s.V.rightCols(k), left = s.U.rightCols(k);
  const double c_scale = std::max(1.0, sys.C.norm()), b_scale = std::max(1.0, sys.B.norm());
  return (sys.C * right).norm() <= 1e-7 * c_scale || (left.adjoint() * sys.B).norm() <= 1e-7 * b_scale;
}

}  // namespace

TransferFunction::TransferFunction(DescriptorSystem sys, double cond_max)
    : sys_(std::move(sys)), cond_max_(cond_max) {
  require_valid(sys_);
}

Matrix TransferFunction::evaluate_checked(Scalar z, double* residual) const {
  const Index n = sys_.n();
  if (n == 0) {
    if (residual) *residual = 0.0;
    return sys_.D;
  }
  const Matrix p = z * sys_.E - sys_.A;
  const Svd s = svd(p);
  const double smin = s.singular_values(n - 1), smax = s.singular_values(0);
  // relative to the data so that a 1x1 pencil near its eigenvalue is caught too
  const double data = std::abs(z) * spectral_norm(sys_.E) + spectral_norm(sys_.A);
  if (!(smin > 0.0) || std::max(smax, data) / smin > cond_max_)
    throw Error(ErrorCode::PoleProximity, "z = " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                                              std::to_string(z.imag()) + "i is within " +
                                              std::to_string(smin / std::max(1.0, spectral_norm(sys_.E))) +
                                              " of the spectrum (sigma_min(zE - A) / |E|)");
  const Matrix lu = p.partialPivLu().solve(sys_.B);
  const Matrix qr = p.colPivHouseholderQr().solve(sys_.B);
  const Matrix t = sys_.C * lu + sys_.D;
  const double diff = (sys_.C * (lu - qr)).norm() / (1.0 + t.norm());
  if (residual) *residual = diff;
  // the two factorizations differ by about cond * eps
  if (diff > std::max(kPathAgreement, 1e-14 * std::max(smax, data) / smin))
    throw Error(ErrorCode::PoleProximity, "LU and QR evaluations disagree by " + std::to_string(diff));
  return t;
}

Matrix TransferFunction::evaluate_uncached(Scalar z) const { return evaluate_checked(z, nullptr); }

Matrix TransferFunction::evaluate(Scalar z) {
  for (const auto& [pt, val] : cache_)
    if (pt == z) {
      last_residual_ = 0.0;
      return val;
    }
  Matrix t = evaluate_checked(z, &last_residual_);
  cache_.emplace_back(z, t);
  return t;
}

Properness is_proper(const DescriptorSystem& sys, double tol) {
  require_valid(sys);
  Properness out;
  const Index n = sys.n();
  if (n == 0) return out;
  const DrazinPair dp = drazin_pair(sys.E, sys.A);
  out.nu = dp.nu;
  const Matrix bh = solve(dp.resolvent, sys.B);
  const Matrix nil = Matrix::Identity(n, n) - dp.ED * dp.E_hat;
  const double eh = std::max(1.0, spectral_norm(dp.E_hat));
  Matrix pw = nil;
  for (int i = 1; i < dp.nu; ++i) {
    pw = dp.E_hat * pw;
    const double scale = std::max(1.0, sys.C.norm() * bh.norm() * std::pow(eh, i));
    out.structural_residual = std::max(out.structural_residual, (sys.C * pw * bh).norm() / scale);
  }
  out.proper = out.structural_residual <= tol;

  // growth along a few rays; the circles are far outside the finite spectrum
  const TransferFunction tf(sys, 1e14);
  double worst = -std::numeric_limits<double>::infinity();
  for (double angle : {0.3, 1.7, 2.9, 4.4}) {
    const Scalar w = std::polar(1.0, angle);
    try {
      const double lo = std::log10(tf.evaluate_uncached(1e4 * w).norm() + 1e-300);
      const double hi = std::log10(tf.evaluate_uncached(1e6 * w).norm() + 1e-300);
      worst = std::max(worst, (hi - lo) / 2.0);
    } catch (const Error&) {
      out.notes.push_back("growth sample skipped near a pole");
    }
  }
  out.growth_exponent = std::isfinite(worst) ? worst : 0.0;
  out.sampling_agrees = out.proper == (out.growth_exponent < 0.5);
  if (!out.sampling_agrees)
    out.notes.push_back("structural and sampled properness disagree (growth exponent " +
                        std::to_string(out.growth_exponent) + ")");
  return out;
}

std::string to_string(RealnessKind k) { return k == RealnessKind::Positive ? "positive" : "bounded"; }

std::vector<Scalar> RealnessGrid::points() const {
  std::vector<Scalar> pts;
  pts.reserve(radii.size() * static_cast<std::size_t>(std::max(angles, 0)));
  for (double r : radii)
    for (int j = 0; j < angles; ++j) pts.push_back(std::polar(r, 2.0 * std::numbers::pi * j / angles));
  return pts;
}

RealnessReport check_realness(const DescriptorSystem& sys, RealnessKind kind, const RealnessGrid& grid) {
  require_valid(sys);
  for (double r : grid.radii)
    if (!(r > 1.0)) throw Error(ErrorCode::DimensionMismatch, "realness grid radii must exceed 1");
  RealnessReport out;
  out.kind = kind;
  const PencilAnalysis pa = analyze_pencil(sys.E, sys.A);
  if (!pa.regular) throw Error(ErrorCode::IrregularPencil, "check_realness: singular pencil");

  const Properness pr = is_proper(sys);
  out.proper = pr.proper;
  if (!pr.proper)
    out.notes.push_back("improper transfer function: unbounded as |z| grows, so not " + to_string(kind) + " real");

  bool uncancelled = false;
  for (const Scalar& lambda : pa.finite_spectrum) {
    if (std::abs(lambda) <= 1.0 + 1e-9) continue;
    UnstablePole p{lambda, cancelled_at(sys, lambda)};
    uncancelled |= !p.cancelled;
    out.unstable_poles.push_back(p);
  }
  if (uncancelled) out.notes.push_back("pole with |z| > 1: T is not analytic there");

  std::vector<Scalar> pts = grid.points();
  const TransferFunction tf(sys, grid.cond_max);
  std::vector<double> margins;
  std::vector<char> within_tol;
  const auto evaluate_range = [&](std::size_t first) {
    margins.resize(pts.size(), std::numeric_limits<double>::quiet_NaN());
    within_tol.resize(pts.size(), 1);
    const auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          const Matrix t = tf.evaluate_uncached(pts[i]);
          margins[i] = realness_margin(kind, t);
          within_tol[i] = margins[i] >= -grid.tol * (1.0 + t.squaredNorm());
        } catch (const Error&) {
        }
      }
    };
    const std::size_t count = pts.size() - first;
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, grid.jobs));
    if (jobs == 1 || count < 2 * jobs) {
      work(first, pts.size());
      return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + jobs - 1) / jobs;
    for (std::size_t b = first; b < pts.size(); b += chunk)
      pool.emplace_back(work, b, std::min(pts.size(), b + chunk));
    for (auto& th : pool) th.join();
  };
  evaluate_range(0);

  if (grid.boundary_angles > 0) {
    if (!(grid.boundary_radius > 1.0))
      throw Error(ErrorCode::DimensionMismatch, "realness boundary radius must exceed 1");
    const std::size_t first = pts.size();
    const int nb = grid.boundary_angles;
    const double step = 2.0 * std::numbers::pi / nb;
    for (int j = 0; j < nb; ++j) pts.push_back(std::polar(grid.boundary_radius, j * step));
    evaluate_range(first);
    // local minima of the sampled margin, lowest first
    std::vector<std::pair<double, int>> minima;
    const auto at = [&](int j) { return margins[first + static_cast<std::size_t>((j + nb) % nb)]; };
    for (int j = 0; j < nb; ++j)
      if (!std::isnan(at(j)) && !(at(j - 1) < at(j)) && !(at(j + 1) < at(j))) minima.emplace_back(at(j), j);
    std::sort(minima.begin(), minima.end());
    if (minima.size() > static_cast<std::size_t>(std::max(0, grid.refine))) minima.resize(std::max(0, grid.refine));
    const auto margin_at = [&](double theta) {
      try {
        return realness_margin(kind, tf.evaluate_uncached(std::polar(grid.boundary_radius, theta)));
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (const auto& [value, j] : minima) {
      double lo = (j - 1) * step, hi = (j + 1) * step;
      double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      double fa = margin_at(a), fb = margin_at(b);
      for (int it = 0; it < 40; ++it) {
        if (fa < fb) {
          hi = b;
          b = a;
          fb = fa;
          a = hi - g * (hi - lo);
          fa = margin_at(a);
        } else {
          lo = a;
          a = b;
          fa = fb;
          b = lo + g * (hi - lo);
          fb = margin_at(b);
        }
      }
      pts.push_back(std::polar(grid.boundary_radius, fa < fb ? a : b));
    }
    const std::size_t refined = pts.size();
    evaluate_range(refined - minima.size());
  }

  out.margin = std::numeric_limits<double>::infinity();
  std::size_t skipped = 0;
  bool all_within = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::isnan(margins[i])) {
      ++skipped;
      continue;
    }
    ++out.points_checked;
    all_within &= within_tol[i] != 0;
    if (margins[i] < out.margin) {
      out.margin = margins[i];
      out.worst_point = pts[i];
    }
  }
  if (skipped) out.notes.push_back(std::to_string(skipped) + " grid points skipped (too close to a pole)");
  out.holds_on_grid = out.proper && !uncancelled && out.points_checked > 0 && all_within;
  return out;
}

double verify_kyp_resolvent_identity(const DescriptorSystem& sys, const Matrix& X, Scalar z) {
  require_valid(sys);
  const Index n = sys.n(), m = sys.m();
  if (X.rows() != n || X.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "verify_kyp_resolvent_identity: weight size");
  const Matrix p = z * sys.E - sys.A;
  if (n && !(condition_number(p) < 1e12))
    throw Error(ErrorCode::ResolventViolation, "z is an eigenvalue of the pencil to working precision");
  const Matrix rb = n ? solve(p, sys.B) : Matrix(0, m);
  Matrix g(n + m, m);
  g << rb, Matrix::Identity(m, m);
  Matrix blk(n + m, n + m);
  blk << -sys.A.adjoint() * X * sys.A + sys.E.adjoint() * X * sys.E, -sys.A.adjoint() * X * sys.B,
      -sys.B.adjoint() * X * sys.A, -sys.B.adjoint() * X * sys.B;
  const Matrix lhs = g.adjoint() * blk * g;
  const Matrix erb = sys.E * rb;
  const Matrix rhs = (1.0 - std::norm(z)) * erb.adjoint() * X * erb;
  return (lhs - rhs).norm() / (1.0 + blk.norm() * g.squaredNorm());
}

double verify_moebius_relation(const DescriptorSystem& csys, Scalar alpha, Scalar z) {
  if (!(std::abs(z) > 1.0)) throw Error(ErrorCode::ResolventViolation, "Moebius relation needs |z| > 1");
  const InternalCayleyResult ic = internal_cayley(csys, alpha);
  const Scalar s = (alpha * z - std::conj(alpha)) / (z + 1.0);
  try {
    const Matrix left = TransferFunction(ic.discrete).evaluate_uncached(z);
    const Matrix right = TransferFunction(csys).evaluate_uncached(s);
    return (left - right).norm() / (1.0 + right.norm());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PoleProximity) throw;
    throw Error(ErrorCode::ResolventViolation, e.what());
  }
}

}  // namespace dtph
