#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dtph/matcore.hpp"
#include "dtph/system.hpp"

namespace dtph {

/// T(z) = C (z E - A)^{-1} B + D with a per-instance cache. Not thread-safe;
/// evaluate_uncached() is const and may be shared.
class TransferFunction {
 public:
  explicit TransferFunction(DescriptorSystem sys, double cond_max = 1e12);

  const DescriptorSystem& source() const { return sys_; }

  /// Throws PoleProximity when sigma_min(z E - A) is below
  /// max(sigma_max, |z| |E| + |A|) / cond_max, or when the LU and QR solves
  /// disagree by more than 1e-9 (relative).
  Matrix evaluate(Scalar z);
  Matrix evaluate_uncached(Scalar z) const;

  /// Difference between the two solve paths at the last uncached evaluation
  /// of z; 0 for cache hits.
  double last_residual() const { return last_residual_; }
  const std::vector<std::pair<Scalar, Matrix>>& cache() const { return cache_; }

 private:
  Matrix evaluate_checked(Scalar z, double* residual) const;

  DescriptorSystem sys_;
  double cond_max_;
  double last_residual_ = 0.0;
  std::vector<std::pair<Scalar, Matrix>> cache_;
};

struct Properness {
  bool proper = true;
  /// max_i |C P E^i P B| / scale over the nilpotent part, i = 1 .. nu-1, in
  /// the shifted coordinates (s E - A)^{-1} E.
  double structural_residual = 0.0;
  int nu = 0;
  /// Largest (log10 |T(10^6 w)| - log10 |T(10^4 w)|) / 2 over a few unit
  /// directions w: about the polynomial degree, near 0 for proper functions.
  double growth_exponent = 0.0;
  bool sampling_agrees = true;
  std::vector<std::string> notes;
};

/// Structural test on the nilpotent part of the pencil, cross-checked by
/// sampling |T| on growing circles. Throws IrregularPencil.
Properness is_proper(const DescriptorSystem& sys, double tol = 1e-8);

enum class RealnessKind { Positive, Bounded };

std::string to_string(RealnessKind k);

struct RealnessGrid {
  std::vector<double> radii{1.01, 1.1, 2.0, 10.0};
  int angles = 32;
  /// Margin accepted as nonnegative: eigmin >= -tol * (1 + |T|^2).
  double tol = 1e-9;
  /// Worker threads for the grid evaluation.
  int jobs = 1;
  /// Pole-proximity threshold handed to TransferFunction.
  double cond_max = 1e12;
  /// Optional pass just outside the unit circle: boundary_angles samples at
  /// boundary_radius, then a golden-section search in the angle around each
  /// of the `refine` lowest local minima of the margin. Off by default.
  int boundary_angles = 0;
  double boundary_radius = 1.0 + 1e-6;
  int refine = 8;

  /// Fixed grid points (radii x angles), without the boundary pass.
  std::vector<Scalar> points() const;
};

struct UnstablePole {
  Scalar location;
  bool cancelled = false;
};

struct RealnessReport {
  RealnessKind kind = RealnessKind::Positive;
  bool holds_on_grid = false;
  bool proper = true;
  Scalar worst_point{0.0, 0.0};
  /// min over the grid of eigmin(T + T^H) or eigmin(I - T^H T).
  double margin = 0.0;
  std::size_t points_checked = 0;
  std::vector<UnstablePole> unstable_poles;
  std::vector<std::string> notes;
  std::string caveat = "grid evidence on |z| > 1, not a proof";
};

/// Positive or bounded realness sampled on the grid, after the pole-location
/// precondition: every finite eigenvalue with |lambda| > 1 must be cancelled
/// (unobservable or uncontrollable). An improper T fails both kinds.
RealnessReport check_realness(const DescriptorSystem& sys, RealnessKind kind, const RealnessGrid& grid = {});

/// Quadratic form of [-A^H X A + E^H X E, -A^H X B; -B^H X A, -B^H X B]
/// against [(zE - A)^{-1} B; I] minus (1 - |z|^2) B^H R^H E^H X E R B, as a
/// norm relative to 1 + |block| |[R B; I]|^2. Throws ResolventViolation when
/// z is (numerically) an eigenvalue.
double verify_kyp_resolvent_identity(const DescriptorSystem& sys, const Matrix& X, Scalar z);

/// Difference between the internal Cayley image's transfer function at z and
/// T((alpha z - conj(alpha)) / (z + 1)), relative to 1 + |T|. Needs |z| > 1;
/// throws ResolventViolation when either point is (numerically) a pole.
double verify_moebius_relation(const DescriptorSystem& csys, Scalar alpha, Scalar z);

}  // namespace dtph
