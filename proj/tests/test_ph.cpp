#include <gtest/gtest.h>

#include <cmath>

#include "dtph/error.hpp"
#include "dtph/ph.hpp"
#include "dtph/sim.hpp"
#include "support.hpp"

using namespace dtph;
using namespace dtph::testing;

namespace {

Matrix random_contraction(Index size, double norm, bool complex) {
  Matrix m = random_matrix(size, size, complex);
  return m * (norm / spectral_norm(m));
}

// System whose X-weighted block is the given matrix: undo the X^{1/2}
// change of coordinates.
DescriptorSystem pull_back(const Matrix& blk, Index n, const Matrix& X) {
  const Index m = blk.rows() - n;
  const Matrix h = matrix_sqrt_psd(HermitianMatrix(X)), hi = h.inverse();
  return DescriptorSystem::standard(hi * blk.topLeftCorner(n, n) * h, hi * blk.topRightCorner(n, m),
                                    blk.bottomLeftCorner(m, n) * h, blk.bottomRightCorner(m, m));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Parse;
}

}  // namespace

TEST(WeightedNorm, IdentityDynamics) {
  for (Index n : {1, 2, 4}) {
    const Matrix z = Matrix::Zero(n, 1);
    EXPECT_NEAR(weighted_norm(Matrix::Identity(n, n), z, z.transpose(), Matrix::Zero(1, 1), Matrix::Identity(n, n)),
                1.0, 1e-14);
  }
}

TEST(WeightedNorm, ScalarExampleExceedsOne) {
  for (double x : {1e-3, 0.5, 1.0, 7.0, 1e3})
    EXPECT_GT(weighted_norm(mat({{0.5}}), mat({{0.5}}), mat({{0}}), mat({{1}}), mat({{x}})), 1.0 + 1e-6);
}

TEST(WeightedNorm, EqualsTransformedSpectralNormBothWays) {
  for (int trial = 0; trial < 100; ++trial) {
    const bool complex = trial % 2;
    const Index n = uniform_int(1, 4), m = uniform_int(1, 3);
    const Matrix blk = random_contraction(n + m, uniform(0.3, 1.5), complex);
    const Matrix X = random_pd(n, 0.2, 5.0, complex);
    const DescriptorSystem s = pull_back(blk, n, X);
    const double w = weighted_norm(s.A, s.B, s.C, s.D, X);
    EXPECT_NEAR(w, spectral_norm(blk), 1e-9 * (1.0 + spectral_norm(blk))) << "trial " << trial;
    // the weighted norm is at most one exactly when X solves the scattering KYP inequality
    const double kyp = min_hermitian_eigenvalue(build_lmi(s, LmiKind::DiscreteScattering).evaluate(X));
    if (w <= 1.0 - 1e-9) EXPECT_GE(kyp, -1e-9) << "trial " << trial;
    if (w >= 1.0 + 1e-9) EXPECT_LT(kyp, 0.0) << "trial " << trial;
  }
}

TEST(WeightedNorm, RejectsSingularWeight) {
  const Matrix a = Matrix::Identity(2, 2), b = Matrix::Zero(2, 1), c = Matrix::Zero(1, 2), d = Matrix::Zero(1, 1);
  EXPECT_EQ(code_of([&] { weighted_norm(a, b, c, d, mat({{1, 0}, {0, 0}})); }), ErrorCode::InvalidWeight);
  EXPECT_EQ(code_of([&] { weighted_norm(a, b, c, d, mat({{1, 0}, {0, -1}})); }), ErrorCode::InvalidWeight);
  EXPECT_EQ(code_of([&] { weighted_norm(a, b, c, d, mat({{1, 0}, {0, 1e-9}})); }), ErrorCode::InvalidWeight);
}

TEST(IsPh, OnlyZeroWeightIsNotPh) {
  PhVerdict v = is_ph(DescriptorSystem::scalar(1, 0.5, 0.5, 0, 1));
  EXPECT_FALSE(v.is_ph);
  EXPECT_FALSE(v.representation.has_value());
  EXPECT_NE(v.note.find("only X = 0"), std::string::npos) << v.note;
}

TEST(IsPh, StableScalar) {
  PhVerdict v = is_ph(DescriptorSystem::scalar(1, 0.5, 0, 0, 0));
  ASSERT_TRUE(v.is_ph);
  EXPECT_GT(v.representation->X(0, 0).real(), 0.0);
  EXPECT_LE(v.representation->norm_value, 1.0 + 1e-8);
}

TEST(IsPh, ObservablePassiveSystemsArePh) {
  for (int trial = 0; trial < 30; ++trial) {
    const bool complex = trial % 2;
    const Index n = uniform_int(1, 4), m = uniform_int(1, 2);
    const Matrix blk = random_contraction(n + m, uniform(0.6, 0.99), complex);
    const DescriptorSystem s = pull_back(blk, n, random_pd(n, 0.3, 3.0, complex));
    PhVerdict v = is_ph(s);
    ASSERT_TRUE(v.is_ph) << "trial " << trial << ": " << v.note;
    const PhRepresentation& r = *v.representation;
    EXPECT_LE(r.norm_value, 1.0 + 1e-8);
    Matrix tb(n + m, n + m);
    tb << r.A, r.B, r.C, r.D;
    EXPECT_NEAR(r.norm_value, spectral_norm(tb), 1e-9);
    // Lyapunov consequence of the weight
    EXPECT_GE(min_hermitian_eigenvalue(r.X - s.A.adjoint() * r.X * s.A), -1e-8 * (1.0 + r.X.norm()));
  }
}

TEST(IsPh, ImpliesDissipationAndStability) {
  for (int trial = 0; trial < 15; ++trial) {
    const bool complex = trial % 2;
    const Index n = uniform_int(1, 3), m = uniform_int(1, 2);
    const DescriptorSystem s = pull_back(random_contraction(n + m, 0.97, complex), n, random_pd(n, 0.3, 3.0, complex));
    PhVerdict v = is_ph(s);
    ASSERT_TRUE(v.is_ph);
    EXPECT_TRUE(classify_stability(s.E, s.A).stable) << "trial " << trial;
    for (int k = 0; k < 4; ++k) {
      std::vector<Vector> u;
      for (int i = 0; i < 25; ++i) u.push_back(random_complex(m, 1));
      Trajectory traj = simulate(s, u, random_complex(n, 1));
      EXPECT_TRUE(audit_dissipation(traj, SupplyRate::scattering(m), v.representation->X, s.E).dissipative);
    }
  }
}

TEST(IsPh, InvariantUnderUnitaryCoordinates) {
  for (int trial = 0; trial < 15; ++trial) {
    const bool complex = trial % 2;
    const Index n = uniform_int(1, 3), m = 1;
    const double norm = trial % 3 == 0 ? 1.2 : 0.9;
    const DescriptorSystem s = pull_back(random_contraction(n + m, norm, complex), n, random_pd(n, 0.3, 3.0, complex));
    const Matrix u = random_unitary(n, complex);
    const DescriptorSystem t = DescriptorSystem::standard(u.adjoint() * s.A * u, u.adjoint() * s.B, s.C * u, s.D);
    PhVerdict vs = is_ph(s), vt = is_ph(t);
    EXPECT_EQ(vs.is_ph, vt.is_ph) << "trial " << trial;
    if (vs.is_ph) {
      const Matrix moved = u.adjoint() * vs.representation->X * u;
      EXPECT_NO_THROW(to_ph(t, moved));
    }
  }
}

TEST(IsPh, IndexTwoUnsupported) {
  DescriptorSystem s{mat({{0, 1}, {0, 0}}), Matrix::Identity(2, 2), mat({{0}, {1}}), mat({{0, 1}}), mat({{0}})};
  EXPECT_EQ(code_of([&] { is_ph(s); }), ErrorCode::IndexTooHigh);
}

TEST(IsPh, IndexOneDescriptor) {
  // x1' = x1/2 + u/2, 0 = x2 - u, y = x2 / 2
  DescriptorSystem s{mat({{1, 0}, {0, 0}}), mat({{0.5, 0}, {0, -1}}), mat({{0.5}, {1}}), mat({{0, 0.5}}), mat({{0}})};
  PhVerdict v = is_ph(s);
  ASSERT_TRUE(v.is_ph) << v.note;
  EXPECT_EQ(v.representation->X.rows(), 1);
  EXPECT_LE(v.representation->norm_value, 1.0 + 1e-8);
}

TEST(ToPh, IdentityWeightKeepsSystem) {
  const DescriptorSystem s = pull_back(random_contraction(3, 0.8, false), 2, Matrix::Identity(2, 2));
  PhRepresentation r = to_ph(s, Matrix::Identity(2, 2));
  EXPECT_LT((r.A - s.A).norm() + (r.B - s.B).norm() + (r.C - s.C).norm(), 1e-14);
  EXPECT_NEAR(r.hamiltonian(vec({1, 2})), 2.5, 1e-14);
}

TEST(ToPh, DiagonalWeightAndTransfer) {
  const Matrix X = mat({{4, 0}, {0, 1}});
  const DescriptorSystem s = pull_back(random_contraction(3, 0.9, true), 2, X);
  PhRepresentation r = to_ph(s, X);
  EXPECT_LE(r.norm_value, 1.0 + 1e-8);
  const Matrix t0 = transfer_matrix_at(s, Scalar(3.0, 0.0)), t1 = transfer_matrix_at(r.transformed(), Scalar(3.0, 0.0));
  EXPECT_LT((t0 - t1).norm(), 1e-9);
}

TEST(ToPh, RejectsWeightViolatingKyp) {
  const DescriptorSystem s = DescriptorSystem::scalar(1, 0.5, 0.5, 0, 1);
  EXPECT_EQ(code_of([&] { to_ph(s, mat({{1}})); }), ErrorCode::InvalidWeight);
  EXPECT_EQ(code_of([&] { to_ph(s, mat({{0}})); }), ErrorCode::InvalidWeight);
}

TEST(ClassifyStability, JordanBlockUnstable) {
  StabilityReport r = classify_stability(Matrix::Identity(2, 2), mat({{1, 1}, {0, 1}}));
  EXPECT_FALSE(r.stable);
  EXPECT_FALSE(r.asymptotically_stable);
  EXPECT_TRUE(r.agrees());
}

TEST(ClassifyStability, DiagonalContraction) {
  StabilityReport r = classify_stability(Matrix::Identity(2, 2), mat({{0.5, 0}, {0, 0.25}}));
  EXPECT_TRUE(r.stable);
  EXPECT_TRUE(r.asymptotically_stable);
  EXPECT_TRUE(r.agrees());
}

TEST(ClassifyStability, Rotation) {
  StabilityReport r = classify_stability(Matrix::Identity(2, 2), mat({{0, -1}, {1, 0}}));
  EXPECT_TRUE(r.stable);
  EXPECT_FALSE(r.asymptotically_stable);
  EXPECT_TRUE(r.agrees());
}

TEST(ClassifyStability, DescriptorFiniteDynamics) {
  for (int trial = 0; trial < 20; ++trial) {
    // Weierstrass blocks with a nilpotent part of size up to three
    const Index r = uniform_int(1, 3), q = uniform_int(1, 3);
    const Index n = r + q;
    Matrix af = random_real(r, r);
    const double target = trial % 2 ? 0.8 : 1.25;
    af *= target / spectral_stability(af).spectral_radius;
    Matrix e = Matrix::Zero(n, n), a = Matrix::Identity(n, n);
    e.topLeftCorner(r, r) = Matrix::Identity(r, r);
    a.topLeftCorner(r, r) = af;
    for (Index i = 0; i + 1 < q; ++i) e(r + i, r + i + 1) = 1.0;
    const Matrix sl = random_well_conditioned(n, 3.0, false), sr = random_well_conditioned(n, 3.0, false);
    StabilityReport rep = classify_stability(sl * e * sr, sl * a * sr);
    EXPECT_EQ(rep.finite_dynamics.rows(), r);
    EXPECT_EQ(rep.stable, target < 1.0) << "trial " << trial;
    EXPECT_TRUE(rep.agrees()) << "trial " << trial;
    EXPECT_NEAR(rep.spectral_radius, target, 1e-7);
  }
}

TEST(ClassifyStability, IrregularRejected) {
  EXPECT_EQ(code_of([] { classify_stability(mat({{1, 0}, {0, 0}}), mat({{1, 0}, {0, 0}})); }),
            ErrorCode::IrregularPencil);
}
