#pragma once

#include <cstddef>

namespace qmcltl {

/// Every numerical threshold used by the checker, in one place.
///
/// Thresholds marked "relative" are scaled by the spectral norm of the matrix
/// they are applied to.
struct Tolerances {
  // Density operators and channels.
  double herm = 1e-10;   ///< max |rho - rho^dagger| entry
  double psd = 1e-10;    ///< min eigenvalue >= -psd
  double trace = 1e-10;  ///< |tr(rho) - 1|
  double cptp = 1e-8;    ///< |sum E_k^dagger E_k - I|_F
  double drift = 1e-7;   ///< violations below this are re-projected, above are errors
  double spectralRadius = 1e-6;
  double imag = 1e-9;    ///< tolerated imaginary residue of real-valued quantities

  // Eigen-structure.
  double eigResidual = 1e-9;  ///< relative reconstruction residual
  double cluster = 1e-8;      ///< relative distance below which eigenvalues share a cluster
  double defectCond = 1e8;    ///< block-diagonalizer condition above which close clusters merge
  double nilpotent = 1e-8;    ///< relative strictly-upper Schur block norm marking a defective cluster
  double zeroModulus = 1e-12; ///< relative modulus treated as an exact zero eigenvalue
  double basisCond = 1e12;    ///< eigenbasis condition above which state expansion is refused

  // Peripheral spectrum and periodicity.
  double peripheral = 1e-8;  ///< |lambda| >= 1 - peripheral counts as peripheral
  double angle = 1e-9;       ///< |lambda/|lambda| - e^{2 pi i p/q}| accepted as rational
  int qmax = 0;              ///< denominator cap; 0 selects dim(H)^2
  double coeff = 1e-9;       ///< eigen-coefficient magnitude that counts as contributing
  double projector = 1e-6;   ///< idempotency / commutation defect of E_phi

  // Neighborhoods.
  std::size_t ambiguityCap = 16;
};

}  // namespace qmcltl
