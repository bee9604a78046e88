#pragma once

// Dense complex linear algebra used by every other module.
//
// Vectorization is row-major under the computational basis:
// vectorize(|i><j|) = |i> (x) |j>, so that the matrix representation of a
// channel is sum_k E_k (x) conj(E_k).

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qmcltl/tolerances.hpp"

namespace qmcltl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// (A (x) I)|Omega>; throws InputError for a non-square matrix.
CVector vectorize(const CMatrix& a);
/// Inverse of vectorize; the length must be a perfect square.
CMatrix devectorize(const CVector& v);
/// Unnormalized maximally entangled vector sum_j |j>|j>.
CVector omegaVector(Index d);

double frobeniusNorm(const CMatrix& a);
double euclideanNorm(const CVector& v);
double spectralNorm(const CMatrix& a);
std::vector<double> singularValues(const CMatrix& a);

bool allFinite(const CMatrix& a);
/// Largest entry modulus of a - a^dagger.
double hermiticityDefect(const CMatrix& a);
CMatrix matrixPower(const CMatrix& a, unsigned n);

/// A run of eigenvalues that lie within clustering distance of each other.
/// Members occupy `[begin, begin + size)` in `EigenSystem::eigenvalues` and
/// the matching columns of `rightVectors`.
struct EigenCluster {
  std::size_t begin = 0;
  std::size_t size = 0;
  Complex center;
  double maxModulus = 0.0;
  /// Frobenius norm of the strictly upper part of the cluster's Schur block.
  double nilpotentNorm = 0.0;
  bool defective = false;
};

/// Block eigendecomposition input = S * blocks * S^{-1}.
///
/// `blocks` is block diagonal with one upper-triangular block per cluster.
/// For a non-defective cluster the block is (numerically) a scalar multiple
/// of the identity and the matching columns of S are eigenvectors; for a
/// defective cluster the columns span its generalized eigenspace.
struct EigenSystem {
  std::vector<Complex> eigenvalues;
  CMatrix rightVectors;  ///< S
  CMatrix leftVectors;   ///< (S^{-1})^dagger, so leftVectors^dagger * rightVectors = I
  CMatrix blocks;
  double conditionEstimate = 1.0;  ///< |S| |S^{-1}| in the spectral norm
  double inputNorm = 0.0;
  std::vector<bool> defectFlags;
  std::vector<EigenCluster> clusters;

  CMatrix inverseVectors() const { return leftVectors.adjoint(); }
  std::size_t dim() const { return eigenvalues.size(); }
};

struct EigOptions {
  double cluster = 1e-8;
  double defectCond = 1e8;
  double nilpotent = 1e-8;
  /// When positive, eigenvalues with modulus at or above this never share a
  /// cluster with eigenvalues below it.
  double separateAbove = 0.0;
};

EigOptions eigOptions(const Tolerances& tol, double separateAbove = 0.0);

/// Schur-based block eigendecomposition with tolerance clustering.
///
/// Eigenvalues closer than `cluster * |a|` are grouped. The Schur form is
/// reordered so that clusters are contiguous and then block-diagonalized by
/// solving Sylvester equations; while the resulting basis has condition
/// above `defectCond`, the two closest clusters are merged (this absorbs the
/// eps^{1/m} scatter of a defective eigenvalue). Throws ConvergenceFailure if
/// the Schur iteration fails.
EigenSystem eig(const CMatrix& a, const EigOptions& options = {});

}  // namespace qmcltl
