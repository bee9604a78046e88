#pragma once

// Peripheral spectrum, periodicity, decay constants and the horizon.

#include <cstdint>
#include <optional>
#include <vector>

#include "qmcltl/numerics.hpp"
#include "qmcltl/superop.hpp"
#include "qmcltl/tolerances.hpp"

namespace qmcltl {

/// The eigenvalue e^{2 pi i p / q} with gcd(p, q) = 1 and 0 <= p < q.
struct RationalAngle {
  std::int64_t p = 0;
  std::int64_t q = 1;
  friend bool operator==(const RationalAngle&, const RationalAngle&) = default;
};

/// Smallest-denominator p/q with q <= qmax whose root of unity lies within
/// `angleTol` of lambda / |lambda|, searched along the continued-fraction
/// convergents of arg(lambda) / 2pi.
std::optional<RationalAngle> rationalAngle(Complex lambda, std::int64_t qmax, double angleTol);

struct PeripheralEntry {
  Complex eigenvalue;
  std::optional<RationalAngle> angle;
  std::vector<std::size_t> eigenIndexes;
  std::size_t cluster = 0;  ///< index into EigenSystem::clusters
};

struct PeripheralSpectrum {
  std::vector<PeripheralEntry> entries;
};

/// One entry per eigenvalue cluster whose largest modulus is at least
/// 1 - peripheralTol.
PeripheralSpectrum peripheralSpectrum(const EigenSystem& eigs, double peripheralTol, std::int64_t qmax, double angleTol);

/// S P S^{-1} with P the identity on the peripheral clusters. Throws
/// DefectivePeripheral for a defective peripheral cluster and NumericalDrift
/// when the result is not idempotent within `projectorTol`.
CMatrix peripheralProjectorRep(const EigenSystem& eigs, const PeripheralSpectrum& ps, double projectorTol = 1e-6);

/// |M^n - (M M_phi)^n| <= C mu^n n^{dMu - 1}.
///
/// With mu = 0 the bound reads 0 and holds for n + 1 > dMu.
struct DecayProfile {
  double mu = 0.0;
  unsigned dMu = 1;
  double C = 1.0;
  double alphaBound = 1.0;  ///< |S| |S^{-1}| of the computed eigenbasis
};

/// C mu^n n^{dMu - 1}, evaluated in log space (0 for mu = 0).
double decayBound(const DecayProfile& dp, std::uint64_t n);

/// Bounds the powers of every interior Schur block by the binomial
/// expansion of diagonal plus nilpotent part, then folds the blocks into
/// one (C, mu, dMu) triple.
DecayProfile decayProfile(const EigenSystem& eigs, const PeripheralSpectrum& ps, double zeroModulus = 1e-12);

/// Peripheral entries whose spectral component of vec(rho0) has norm above
/// `coeffTol`. Throws IllConditionedBasis when the eigenbasis condition
/// exceeds `basisCond`.
PeripheralSpectrum contributingPeripherals(const EigenSystem& eigs, const PeripheralSpectrum& ps,
                                           const DensityOperator& rho0, double coeffTol, double basisCond = 1e12);

struct StabilityReport {
  bool stable = false;
  std::optional<std::uint64_t> period;
  std::vector<Complex> offending;
  DecayProfile horizonInputs;
};

/// Minimal K = M theta such that the decay bound stays below epsilon for
/// every multiple of theta from K on (and K + 1 > dMu).
std::uint64_t horizon(const DecayProfile& dp, std::uint64_t theta, double epsilon);

/// Everything the checker needs about one chain, computed once.
struct SpectralAnalysis {
  CMatrix rep;
  EigenSystem eigs;
  PeripheralSpectrum peripheral;
  PeripheralSpectrum contributing;  ///< all peripheral entries when there is no initial state
  CMatrix projector;                ///< M_phi
  DecayProfile decay;
  StabilityReport stability;
  std::int64_t qmax = 0;
};

/// Denominator cap in effect: `tol.qmax` when positive, d^2 otherwise.
std::int64_t effectiveQmax(const QMC& g, const Tolerances& tol);

SpectralAnalysis analyze(const QMC& g, const Tolerances& tol = {});

/// Stable iff every contributing peripheral entry has a rational angle;
/// the period is the lcm of their denominators.
StabilityReport stabilityReport(const QMC& g, const Tolerances& tol = {});

/// eta_k = devec(M_phi M^k vec(rho0)) for k < theta.
std::vector<DensityOperator> limitStates(const SpectralAnalysis& a, const QMC& g, std::uint64_t theta,
                                         const Tolerances& tol = {});
std::vector<DensityOperator> limitStates(const QMC& g, std::uint64_t theta, const Tolerances& tol = {});

}  // namespace qmcltl
