#include "qmcltl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qmcltl/error.hpp"

namespace qmcltl {

namespace {

// Relative slack added to computed moduli and constants so that rounding in
// the Schur form cannot push a true power norm above the reported bound.
constexpr double kModulusMargin = 1e-12;
constexpr double kConstantMargin = 1e-9;
// Defective clusters with modulus within this relative band of mu count
// towards dMu directly.
constexpr double kDominantBand = 1e-3;

double logBinomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double logSumExp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// log of sum_{j < m, j <= n} C(n, j) r^{n-j} nu^j.
double logBlockPowerBound(double r, double nu, std::size_t m, std::uint64_t n) {
  std::vector<double> terms;
  const double logR = std::log(r);
  const double logNu = std::log(nu);
  for (std::uint64_t j = 0; j < m && j <= n; ++j) {
    const double rPart = (n - j == 0) ? 0.0 : double(n - j) * logR;
    const double nuPart = (j == 0) ? 0.0 : double(j) * logNu;
    terms.push_back(logBinomial(double(n), double(j)) + rPart + nuPart);
  }
  return logSumExp(terms);
}

std::vector<bool> peripheralClusterMask(const EigenSystem& eigs, const PeripheralSpectrum& ps) {
  std::vector<bool> mask(eigs.clusters.size(), false);
  for (const auto& e : ps.entries) mask.at(e.cluster) = true;
  return mask;
}

}  // namespace

std::optional<RationalAngle> rationalAngle(Complex lambda, std::int64_t qmax, double angleTol) {
  const double modulus = std::abs(lambda);
  if (modulus == 0.0 || qmax < 1) return std::nullopt;
  const Complex u = lambda / modulus;
  double x = std::arg(u) / (2.0 * std::numbers::pi);
  if (x < 0.0) x += 1.0;

  std::int64_t h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    if (a > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h = ai * h1 + h2;
    const std::int64_t k = ai * k1 + k2;
    if (k > qmax) break;
    const std::int64_t q = k;
    const std::int64_t p = ((h % q) + q) % q;
    const Complex root = std::polar(1.0, 2.0 * std::numbers::pi * double(p) / double(q));
    if (std::abs(u - root) <= angleTol) {
      const std::int64_t g = std::gcd(p, q);
      return RationalAngle{p / g, q / g};
    }
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    const double frac = r - a;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

PeripheralSpectrum peripheralSpectrum(const EigenSystem& eigs, double peripheralTol, std::int64_t qmax, double angleTol) {
  PeripheralSpectrum ps;
  for (std::size_t c = 0; c < eigs.clusters.size(); ++c) {
    const auto& cl = eigs.clusters[c];
    if (cl.maxModulus < 1.0 - peripheralTol) continue;
    PeripheralEntry e;
    e.eigenvalue = cl.center;
    e.angle = rationalAngle(cl.center, qmax, angleTol);
    e.cluster = c;
    for (std::size_t i = cl.begin; i < cl.begin + cl.size; ++i) e.eigenIndexes.push_back(i);
    ps.entries.push_back(std::move(e));
  }
  return ps;
}

CMatrix peripheralProjectorRep(const EigenSystem& eigs, const PeripheralSpectrum& ps, double projectorTol) {
  const auto n = static_cast<Index>(eigs.dim());
  CMatrix p = CMatrix::Zero(n, n);
  for (const auto& e : ps.entries) {
    const auto& cl = eigs.clusters.at(e.cluster);
    if (cl.defective) {
      std::ostringstream msg;
      msg << "peripheral eigenvalue " << cl.center << " is defective; the channel is not CPTP";
      throw DefectivePeripheral(msg.str());
    }
    for (std::size_t i = cl.begin; i < cl.begin + cl.size; ++i) p(Index(i), Index(i)) = 1.0;
  }
  CMatrix m = eigs.rightVectors * p * eigs.inverseVectors();
  const double defect = (m * m - m).norm();
  if (defect > projectorTol * std::max(1.0, m.norm()))
    throw NumericalDrift("peripheral projector is not idempotent");
  return m;
}

double decayBound(const DecayProfile& dp, std::uint64_t n) {
  if (dp.mu <= 0.0) return 0.0;
  const double logValue = std::log(dp.C) + double(n) * std::log(dp.mu) +
                          (dp.dMu > 1 ? double(dp.dMu - 1) * std::log(double(n)) : 0.0);
  return std::exp(logValue);
}

DecayProfile decayProfile(const EigenSystem& eigs, const PeripheralSpectrum& ps, double zeroModulus) {
  DecayProfile dp;
  dp.alphaBound = std::max(1.0, eigs.conditionEstimate);
  const auto mask = peripheralClusterMask(eigs, ps);
  const double zero = zeroModulus * std::max(eigs.inputNorm, std::numeric_limits<double>::min());

  struct Interior {
    double r;
    double nu;
    std::size_t m;
    bool defective;
    double effective;
  };
  std::vector<Interior> interior;
  for (std::size_t c = 0; c < eigs.clusters.size(); ++c) {
    if (mask[c]) continue;
    const auto& cl = eigs.clusters[c];
    Interior in{cl.maxModulus, cl.nilpotentNorm, cl.size, cl.defective, 0.0};
    if (in.r <= zero) in.r = 0.0;
    if (!in.defective) {
      in.effective = in.r + in.nu <= zero ? 0.0 : (in.r + in.nu) * (1.0 + kModulusMargin);
    } else {
      in.r *= (1.0 + kModulusMargin);
      in.effective = in.r;
    }
    interior.push_back(in);
  }

  double mu = 0.0;
  for (const auto& in : interior) mu = std::max(mu, in.effective);
  dp.mu = mu;

  if (mu == 0.0) {
    for (const auto& in : interior)
      if (in.defective) dp.dMu = std::max<unsigned>(dp.dMu, unsigned(in.m));
    dp.C = dp.alphaBound * (1.0 + kConstantMargin);
    return dp;
  }

  for (const auto& in : interior)
    if (in.defective && in.r >= mu * (1.0 - kDominantBand)) dp.dMu = std::max<unsigned>(dp.dMu, unsigned(in.m));

  double g = 1.0;
  for (const auto& in : interior) {
    if (!in.defective) continue;
    if (in.m <= dp.dMu) {
      double sum = 0.0;
      double term = 1.0;
      for (std::size_t j = 0; j < in.m; ++j) {
        sum += term;
        term *= (in.nu / mu) / double(j + 1);
      }
      g = std::max(g, sum);
      continue;
    }
    // Larger block at a strictly smaller modulus: the ratio to mu^n n^{dMu-1}
    // decreases once (n + 1) / (n + 2 - m) * r / mu < 1.
    const double rho = in.r / mu;
    std::uint64_t n0 = in.m;
    if (rho > 0.0) {
      const double bound = (double(in.m) - 2.0 + rho) / (1.0 - rho);
      n0 = std::max<std::uint64_t>(n0, static_cast<std::uint64_t>(std::max(0.0, std::floor(bound))) + 1);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t n = 1; n <= n0; ++n) {
      const double logRatio = logBlockPowerBound(in.r, in.nu, in.m, n) - double(n) * std::log(mu) -
                              double(dp.dMu - 1) * std::log(double(n));
      best = std::max(best, logRatio);
    }
    g = std::max(g, std::exp(best));
  }
  dp.C = dp.alphaBound * g * (1.0 + kConstantMargin);
  return dp;
}

PeripheralSpectrum contributingPeripherals(const EigenSystem& eigs, const PeripheralSpectrum& ps,
                                           const DensityOperator& rho0, double coeffTol, double basisCond) {
  if (!(eigs.conditionEstimate <= basisCond))
    throw IllConditionedBasis("eigenbasis too ill-conditioned to expand the initial state", eigs.conditionEstimate);
  const CVector v = vectorize(rho0.mat());
  if (v.size() != Index(eigs.dim())) throw InputError("initial state dimension does not match the channel");
  const CVector a = eigs.inverseVectors() * v;
  PeripheralSpectrum out;
  for (const auto& e : ps.entries) {
    const auto& cl = eigs.clusters.at(e.cluster);
    const auto b = Index(cl.begin);
    const auto s = Index(cl.size);
    const CVector component = eigs.rightVectors.middleCols(b, s) * a.segment(b, s);
    if (component.norm() > coeffTol) out.entries.push_back(e);
  }
  return out;
}

std::uint64_t horizon(const DecayProfile& dp, std::uint64_t theta, double epsilon) {
  if (theta == 0) throw InputError("period must be positive");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  const std::uint64_t m0 = std::max<std::uint64_t>(1, (dp.dMu + theta - 1) / theta);
  if (dp.mu <= 0.0) return m0 * theta;

  const double logEps = std::log(epsilon);
  const double logMu = std::log(dp.mu);
  const double logC = std::log(dp.C);
  auto bad = [&](std::uint64_t m) {
    const double n = double(m) * double(theta);
    return logC + n * logMu + (dp.dMu > 1 ? double(dp.dMu - 1) * std::log(n) : 0.0) >= logEps;
  };

  const double nStar = dp.dMu > 1 ? double(dp.dMu - 1) / -logMu : 0.0;
  const std::uint64_t lo = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(nStar / double(theta)));
  std::uint64_t peak = lo;
  if (bad(lo + 1) && !bad(lo)) peak = lo + 1;
  if (!bad(peak) && !bad(lo + 1)) return m0 * theta;

  // Past the peak the bound decreases: find the first good multiple.
  std::uint64_t hi = peak + 1;
  std::uint64_t step = 1;
  const std::uint64_t limit = (std::uint64_t(1) << 62) / theta;
  while (bad(hi)) {
    if (hi > limit) throw ConvergenceFailure("horizon exceeds the representable range");
    peak = hi;
    step *= 2;
    hi = std::min(limit + 1, peak + step);
  }
  std::uint64_t left = peak;  // bad
  std::uint64_t right = hi;   // good
  while (right - left > 1) {
    const std::uint64_t mid = left + (right - left) / 2;
    if (bad(mid))
      left = mid;
    else
      right = mid;
  }
  return std::max(m0, right) * theta;
}

std::int64_t effectiveQmax(const QMC& g, const Tolerances& tol) {
  if (tol.qmax > 0) return tol.qmax;
  return std::int64_t(g.dim()) * std::int64_t(g.dim());
}

SpectralAnalysis analyze(const QMC& g, const Tolerances& tol) {
  SpectralAnalysis a;
  a.rep = g.superop.rep();
  a.eigs = eig(a.rep, eigOptions(tol, 1.0 - tol.peripheral));
  const double scale = std::max(a.eigs.inputNorm, 1.0);
  if (a.eigs.conditionEstimate <= tol.basisCond) {
    const double residual =
        (a.eigs.rightVectors * a.eigs.blocks * a.eigs.inverseVectors() - a.rep).norm();
    if (residual > tol.eigResidual * scale * double(a.rep.rows()))
      throw NumericalDrift("block eigendecomposition does not reconstruct the matrix representation");
  }
  double radius = 0.0;
  for (const auto& c : a.eigs.clusters) radius = std::max(radius, c.maxModulus);
  if (!g.superop.kraus().isRaw() && std::abs(radius - 1.0) > tol.spectralRadius) {
    std::ostringstream msg;
    msg << "spectral radius " << radius << " of a CPTP map differs from 1";
    throw NumericalDrift(msg.str());
  }
  a.qmax = effectiveQmax(g, tol);
  a.peripheral = peripheralSpectrum(a.eigs, tol.peripheral, a.qmax, tol.angle);
  a.projector = peripheralProjectorRep(a.eigs, a.peripheral, tol.projector);
  const double commute = (a.rep * a.projector - a.projector * a.rep).norm();
  if (commute > tol.projector * scale) throw NumericalDrift("peripheral projector does not commute with the channel");
  a.decay = decayProfile(a.eigs, a.peripheral, tol.zeroModulus);
  a.contributing = g.initial ? contributingPeripherals(a.eigs, a.peripheral, *g.initial, tol.coeff, tol.basisCond)
                             : a.peripheral;

  a.stability.horizonInputs = a.decay;
  std::uint64_t period = 1;
  for (const auto& e : a.contributing.entries) {
    if (!e.angle) {
      a.stability.offending.push_back(e.eigenvalue);
      continue;
    }
    period = std::lcm(period, std::uint64_t(e.angle->q));
  }
  a.stability.stable = a.stability.offending.empty();
  if (a.stability.stable) a.stability.period = period;
  return a;
}

StabilityReport stabilityReport(const QMC& g, const Tolerances& tol) { return analyze(g, tol).stability; }

std::vector<DensityOperator> limitStates(const SpectralAnalysis& a, const QMC& g, std::uint64_t theta,
                                         const Tolerances& tol) {
  if (!g.initial) throw InputError("limit states need an initial state");
  if (theta == 0) throw InputError("period must be positive");
  const CMatrix mTheta = matrixPower(a.rep, unsigned(theta));
  std::vector<DensityOperator> out;
  CVector v = vectorize(g.initial->mat());
  for (std::uint64_t k = 0; k < theta; ++k) {
    const CVector eta = a.projector * v;
    if ((mTheta * eta - eta).norm() > tol.projector)
      throw NumericalDrift("limit state is not invariant under the period power of the channel");
    out.push_back(DensityOperator::fromComputed(devectorize(eta), tol));
    v = a.rep * v;
  }
  return out;
}

std::vector<DensityOperator> limitStates(const QMC& g, std::uint64_t theta, const Tolerances& tol) {
  return limitStates(analyze(g, tol), g, theta, tol);
}

}  // namespace qmcltl
