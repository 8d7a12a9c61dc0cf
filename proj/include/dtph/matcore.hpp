#pragma once

// Dense real/complex kernels shared by every other module. All coefficients
// are stored as complex matrices; real data simply carries zero imaginary
// parts.

#include <complex>

#include <Eigen/Dense>

namespace dtph {

using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default relative rank threshold: sigma_i counts when sigma_i > tol * sigma_1.
inline constexpr double kTolRank = 1e-10;
/// Largest condition number accepted by solve() before reporting singularity.
inline constexpr double kMaxSolveCondition = 1e13;

/// A matrix that was checked to be Hermitian at construction. The stored
/// matrix is the exact Hermitian part of the input.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m);

  const Matrix& matrix() const { return m_; }
  Index size() const { return m_.rows(); }

 private:
  Matrix m_;
};

struct Svd {
  Matrix U;
  RealVector singular_values;  // descending
  Matrix V;
};

enum class EigenKind { Hermitian, General };

struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;  // columns
  EigenKind kind;
};

bool all_finite(const Matrix& m);
bool is_real(const Matrix& m);
Matrix hermitian_part(const Matrix& m);

/// Full SVD, m = U diag(sigma) V^H.
Svd svd(const Matrix& m);

/// Number of singular values above tol_rank * sigma_1.
int rank(const Matrix& m, double tol_rank = kTolRank);

/// Eigenvalues ascending, eigenvectors orthonormal.
EigenDecomposition eig_hermitian(const HermitianMatrix& m);

/// Eigenvalues of a square matrix. Real input goes through the real
/// Hessenberg / Francis double-shift QR path, complex input through the
/// complex Schur path.
EigenDecomposition eig_general(const Matrix& m);

/// Smallest eigenvalue of the Hermitian part of m (empty matrices give +inf).
double min_hermitian_eigenvalue(const Matrix& m);

double spectral_norm(const Matrix& m);

/// sigma_max / sigma_min; +inf when singular.
double condition_number(const Matrix& a);

/// Solves a x = b. Throws SingularMatrix (with the condition estimate in the
/// message) if the reciprocal condition estimate of a is below 1/max_condition.
Matrix solve(const Matrix& a, const Matrix& b, double max_condition = kMaxSolveCondition);

/// Hermitian PSD square root. Eigenvalues down to -1e-12 * |m| are clipped to
/// zero, anything more negative is rejected as InvalidMatrix.
Matrix matrix_sqrt_psd(const HermitianMatrix& m);

/// Orthonormal basis of ker(m); columns count = cols - rank.
Matrix null_space(const Matrix& m, double tol_rank = kTolRank);

/// Orthonormal basis of im(m).
Matrix range_basis(const Matrix& m, double tol_rank = kTolRank);

/// Moore-Penrose pseudo-inverse with the relative rank threshold.
Matrix pinv(const Matrix& m, double tol_rank = kTolRank);

/// Orthonormal completion: columns spanning the orthogonal complement of im(q)
/// for q with orthonormal columns.
Matrix orthogonal_complement(const Matrix& q);

/// Range and kernel of m^k for k = index(m), the smallest k with
/// rank m^k = rank m^{k+1}. Built one multiplication at a time (range chain
/// m R_j and kernel chain of preimages), each rank decision taken against
/// tol_rank * |m| so that nilpotent round-off never accumulates in powers.
struct PowerChain {
  int index = 0;
  Matrix range;   // orthonormal basis of im m^index
  Matrix kernel;  // orthonormal basis of ker m^index
  double core_level = 1.0;       // smallest kept singular value / |m|
  double nilpotent_level = 0.0;  // largest dropped singular value / |m|
};

PowerChain power_chain(const Matrix& m, double tol_rank = kTolRank);

}  // namespace dtph
