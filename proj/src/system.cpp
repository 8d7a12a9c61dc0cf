#include "dtph/system.hpp"

#include <sstream>

#include "dtph/error.hpp"

namespace dtph {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void expect_shape(ValidationReport& rep, const char* name, const Matrix& m, Index rows, Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    rep.dimensions_ok = false;
    rep.errors.push_back(std::string(name) + " is " + shape(m) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

}  // namespace

bool DescriptorSystem::is_real() const {
  return dtph::is_real(E) && dtph::is_real(A) && dtph::is_real(B) && dtph::is_real(C) && dtph::is_real(D);
}

DescriptorSystem DescriptorSystem::standard(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                            TimeDomain td) {
  return {Matrix::Identity(A.rows(), A.rows()), A, B, C, D, td};
}

DescriptorSystem DescriptorSystem::scalar(Scalar e, Scalar a, Scalar b, Scalar c, Scalar d, TimeDomain td) {
  auto one = [](Scalar v) { return Matrix::Constant(1, 1, v); };
  return {one(e), one(a), one(b), one(c), one(d), td};
}

ValidationReport validate(const DescriptorSystem& sys, bool require_nonzero_e) {
  ValidationReport rep;
  const Index n = sys.A.rows();
  const Index m = sys.B.cols();
  expect_shape(rep, "A", sys.A, n, n);
  expect_shape(rep, "E", sys.E, n, n);
  expect_shape(rep, "B", sys.B, n, m);
  expect_shape(rep, "C", sys.C, m, n);
  expect_shape(rep, "D", sys.D, m, m);
  for (const auto& [name, mat] : {std::pair<const char*, const Matrix*>{"E", &sys.E}, {"A", &sys.A},
                                  {"B", &sys.B}, {"C", &sys.C}, {"D", &sys.D}}) {
    if (!all_finite(*mat)) {
      rep.finite = false;
      rep.errors.push_back(std::string(name) + " has non-finite entries");
    }
  }
  if (rep.finite && (sys.E.size() == 0 || sys.E.cwiseAbs().maxCoeff() == 0.0)) {
    rep.zero_e = true;
    if (require_nonzero_e)
      rep.errors.push_back("E = 0 violates the standing assumption (regular, E != 0, completely causal)");
    else
      rep.warnings.push_back("E = 0: the system is purely algebraic");
  }
  return rep;
}

void require_valid(const DescriptorSystem& sys) {
  ValidationReport rep = validate(sys);
  if (!rep.dimensions_ok) throw Error(ErrorCode::DimensionMismatch, rep.errors.front());
  if (!rep.finite) throw Error(ErrorCode::InvalidMatrix, rep.errors.front());
}

}  // namespace dtph
