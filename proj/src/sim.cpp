#include "dtph/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "dtph/error.hpp"
#include "dtph/pencil.hpp"

namespace dtph {

Trajectory simulate(const DescriptorSystem& sys, const std::vector<Vector>& u, const Vector& x0,
                    const SimulateOptions& opts) {
  require_valid(sys);
  const Index n = sys.n();
  const Index m = sys.m();
  if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "simulate: x0 has wrong length");
  for (const Vector& uk : u)
    if (uk.size() != m) throw Error(ErrorCode::DimensionMismatch, "simulate: input sample has wrong length");

  const ReducedStandardSystem red = reduce_to_standard(sys, opts.tol_rank);
  Trajectory traj;
  traj.u = u;
  if (u.empty()) return traj;

  Vector x_init = x0;
  const Vector gap = red.constraint_residual(x0, u.front());
  if (gap.norm() > opts.consistency_tol * (1.0 + x0.norm() + u.front().norm())) {
    if (!opts.project_initial_state)
      throw Error(ErrorCode::InconsistentInitialState,
                  "x0 violates the algebraic constraint (residual " + std::to_string(gap.norm()) + ")");
    x_init = red.state_map * (red.reduce_map * x0) + red.input_map * u.front();
    traj.projected_initial_state = true;
  }

  Vector z = red.reduce_map * x_init;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Vector xk = k == 0 ? x_init : Vector(red.state_map * z + red.input_map * u[k]);
    traj.x.push_back(xk);
    traj.y.push_back(sys.C * xk + sys.D * u[k]);
    z = red.A * z + red.B * u[k];
  }
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double scale = 1.0 + traj.x[k].norm() + u[k].norm();
    traj.max_residual =
        std::max(traj.max_residual, (sys.E * traj.x[k + 1] - sys.A * traj.x[k] - sys.B * u[k]).norm() / scale);
  }
  return traj;
}

SupplyRate SupplyRate::impedance(Index m) {
  return {SupplyKind::Impedance, Matrix::Zero(m, m), Matrix::Identity(m, m), Matrix::Zero(m, m)};
}

SupplyRate SupplyRate::scattering(Index m) {
  return {SupplyKind::Scattering, -Matrix::Identity(m, m), Matrix::Zero(m, m), Matrix::Identity(m, m)};
}

SupplyRate SupplyRate::general(const Matrix& Q, const Matrix& S, const Matrix& R) {
  const HermitianMatrix q(Q);
  const HermitianMatrix r(R);
  if (S.rows() != Q.rows() || S.cols() != R.rows())
    throw Error(ErrorCode::DimensionMismatch, "supply weights have inconsistent sizes");
  return {SupplyKind::General, q.matrix(), S, r.matrix()};
}

double supply(const SupplyRate& sr, const Vector& u, const Vector& y) {
  const Index m = sr.Q.rows();
  if (u.size() != m || y.size() != m) throw Error(ErrorCode::DimensionMismatch, "supply: vector length mismatch");
  switch (sr.kind) {
    case SupplyKind::Impedance: return 2.0 * y.dot(u).real();
    case SupplyKind::Scattering: return u.squaredNorm() - y.squaredNorm();
    case SupplyKind::General: break;
  }
  return (y.dot(sr.Q * y) + 2.0 * y.dot(sr.S * u) + u.dot(sr.R * u)).real();
}

DissipationAudit audit_dissipation(const Trajectory& traj, const SupplyRate& sr, const Matrix& X, const Matrix& E) {
  DissipationAudit audit;
  const Matrix w = hermitian_part(X);
  auto storage = [&](const Vector& x) { return (E * x).dot(w * (E * x)).real(); };
  audit.max_violation = -std::numeric_limits<double>::infinity();
  bool strict = true;
  bool equal = true;
  for (std::size_t k = 0; k + 1 < traj.x.size(); ++k) {
    const double inc = storage(traj.x[k + 1]) - storage(traj.x[k]);
    const double s = supply(sr, traj.u[k], traj.y[k]);
    audit.storage_increase.push_back(inc);
    audit.supplied.push_back(s);
    const double base = 1.0 + traj.x[k].norm() + traj.x[k + 1].norm() + traj.u[k].norm();
    const double slack = 1e-8 * base * base;
    audit.max_violation = std::max(audit.max_violation, inc - s);
    if (inc - s > slack && !audit.first_violation) audit.first_violation = k;
    if (std::abs(inc - s) > slack) equal = false;
    const bool nonzero = traj.x[k].norm() > 0.0 || traj.u[k].norm() > 0.0;
    if (nonzero && inc - s > -slack) strict = false;
  }
  if (audit.storage_increase.empty()) audit.max_violation = 0.0;
  audit.dissipative = !audit.first_violation.has_value();
  audit.strictly_dissipative = audit.dissipative && strict && !audit.storage_increase.empty();
  audit.conservative = audit.dissipative && equal;
  return audit;
}

namespace {

void put(std::ostream& os, Scalar v) {
  char buf[64];
  if (v.imag() == 0.0)
    std::snprintf(buf, sizeof buf, "%.17g", v.real());
  else
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", v.real(), v.imag());
  os << ',' << buf;
}

void header(std::ostream& os, const char* name, Index count) {
  for (Index i = 0; i < count; ++i) os << ',' << name << i;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const Matrix& E, const std::optional<Matrix>& X,
                           const SupplyRate& sr) {
  std::ostringstream os;
  const Index n = traj.x.empty() ? 0 : traj.x.front().size();
  const Index m = traj.u.empty() ? 0 : traj.u.front().size();
  os << 'k';
  header(os, "x", n);
  header(os, "u", m);
  header(os, "y", m);
  os << ",V,s\n";
  for (std::size_t k = 0; k < traj.x.size(); ++k) {
    os << k;
    for (Index i = 0; i < n; ++i) put(os, traj.x[k](i));
    for (Index i = 0; i < m; ++i) put(os, traj.u[k](i));
    for (Index i = 0; i < m; ++i) put(os, traj.y[k](i));
    const double v = X ? (E * traj.x[k]).dot(hermitian_part(*X) * (E * traj.x[k])).real() : 0.0;
    put(os, Scalar(v));
    put(os, Scalar(supply(sr, traj.u[k], traj.y[k])));
    os << '\n';
  }
  return os.str();
}

}  // namespace dtph
