#include <doctest.h>

#include <numbers>
#include <numeric>

#include "corpus.hpp"

using namespace qmcltl;
using namespace qmcltl::testing;

namespace {

double maxAbs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

const PeripheralEntry* findEntry(const PeripheralSpectrum& ps, Complex z) {
  for (const auto& e : ps.entries)
    if (std::abs(e.eigenvalue - z) < 1e-9) return &e;
  return nullptr;
}

Complex root(std::int64_t p, std::int64_t q) { return std::polar(1.0, 2 * std::numbers::pi * double(p) / double(q)); }

}  // namespace

TEST_CASE("rational angles") {
  CHECK(rationalAngle(1.0, 4, 1e-9) == RationalAngle{0, 1});
  CHECK(rationalAngle(-1.0, 4, 1e-9) == RationalAngle{1, 2});
  CHECK(rationalAngle(root(2, 7), 49, 1e-9) == RationalAngle{2, 7});
  CHECK(rationalAngle(root(-1, 3), 9, 1e-9) == RationalAngle{2, 3});
  CHECK(rationalAngle(root(5, 12), 144, 1e-9) == RationalAngle{5, 12});
  CHECK_FALSE(rationalAngle(root(5, 12), 11, 1e-9).has_value());
  CHECK_FALSE(rationalAngle(std::polar(1.0, 2 * std::numbers::pi / std::sqrt(2.0)), 16, 1e-9).has_value());
  // A slightly shrunk modulus does not affect the angle test.
  CHECK(rationalAngle(0.99999999 * root(1, 4), 16, 1e-9) == RationalAngle{1, 4});
}

TEST_CASE("rational angles are reduced and minimal over random roots") {
  Rng rng(30);
  std::uniform_int_distribution<std::int64_t> qd(1, 40);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t q = qd(rng);
    std::uniform_int_distribution<std::int64_t> pd(0, q - 1);
    const std::int64_t p = pd(rng);
    const std::int64_t g = std::gcd(p, q);
    const auto a = rationalAngle(root(p, q), 40, 1e-9);
    REQUIRE(a.has_value());
    CHECK(a->p == p / g);
    CHECK(a->q == q / g);
  }
}

TEST_CASE("peripheral spectrum of the phase channel with angle 1/3") {
  const SuperOperator e = phaseChannel(1.0 / 3.0);
  const EigenSystem es = eig(e.rep(), eigOptions({}, 1 - 1e-8));
  const PeripheralSpectrum ps = peripheralSpectrum(es, 1e-8, 4, 1e-9);
  std::size_t total = 0;
  for (const auto& en : ps.entries) total += en.eigenIndexes.size();
  CHECK(total == 4);
  const auto* one = findEntry(ps, 1.0);
  REQUIRE(one);
  CHECK(one->eigenIndexes.size() == 2);
  CHECK(one->angle == RationalAngle{0, 1});
  const auto* w = findEntry(ps, root(1, 3));
  REQUIRE(w);
  CHECK(w->angle == RationalAngle{1, 3});
  const auto* wb = findEntry(ps, root(2, 3));
  REQUIRE(wb);
  CHECK(wb->angle == RationalAngle{2, 3});
}

TEST_CASE("peripheral spectrum of AKLT") {
  const SuperOperator e{KrausSet(akltTensors())};
  const SpectralAnalysis a = analyze(QMC(e));
  REQUIRE(a.peripheral.entries.size() == 1);
  CHECK(std::abs(a.peripheral.entries[0].eigenvalue - 1.0) < 1e-12);
  CHECK(a.peripheral.entries[0].angle == RationalAngle{0, 1});
}

TEST_CASE("phase channel with an irrational angle has no rational annotation") {
  const SuperOperator e = phaseChannel(1.0 / std::sqrt(2.0));
  const EigenSystem es = eig(e.rep(), eigOptions({}, 1 - 1e-8));
  const PeripheralSpectrum ps = peripheralSpectrum(es, 1e-8, 16, 1e-9);
  const Complex z = std::polar(1.0, 2 * std::numbers::pi / std::sqrt(2.0));
  const auto* up = findEntry(ps, z);
  const auto* down = findEntry(ps, std::conj(z));
  REQUIRE(up);
  REQUIRE(down);
  CHECK_FALSE(up->angle.has_value());
  CHECK_FALSE(down->angle.has_value());
  CHECK(findEntry(ps, 1.0)->angle == RationalAngle{0, 1});
}

TEST_CASE("peripheral projector of the identity channel") {
  const SpectralAnalysis a = analyze(QMC(identityChannel(2)));
  CHECK(maxAbs(a.projector - CMatrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("peripheral projector maps every state to the fixed point") {
  Rng rng(31);
  const SpectralAnalysis ad = analyze(QMC(amplitudeDamping(0.3)));
  const SpectralAnalysis ak = analyze(QMC(SuperOperator(KrausSet(akltTensors()))));
  CHECK(ad.projector.fullPivLu().rank() == 1);
  CHECK(ak.projector.fullPivLu().rank() == 1);
  for (int t = 0; t < 10; ++t) {
    const DensityOperator rho = randomDensity(rng, 2);
    CHECK(euclideanNorm(ad.projector * vectorize(rho.mat()) - vectorize(DensityOperator::basis(2, 0).mat())) < 1e-10);
    CHECK(euclideanNorm(ak.projector * vectorize(rho.mat()) - vectorize(CMatrix::Identity(2, 2) / 2.0)) < 1e-10);
  }
}

TEST_CASE("projector laws hold on random channels") {
  Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    const SuperOperator e(randomKraus(rng, 2 + t % 2, 1 + t % 3));
    const SpectralAnalysis a = analyze(QMC(e));
    CHECK(maxAbs(a.projector * a.projector - a.projector) <= 1e-6);
    CHECK(maxAbs(a.projector * a.rep - a.rep * a.projector) <= 1e-6);
  }
}

TEST_CASE("defective peripheral clusters are rejected") {
  // A raw 2x2 "representation" with a Jordan block at 1.
  CMatrix j = CMatrix::Zero(2, 2);
  j << 1, 1, 0, 1;
  const EigenSystem es = eig(j, EigOptions{1e-8, 1e8, 1e-8, 1 - 1e-8});
  const PeripheralSpectrum ps = peripheralSpectrum(es, 1e-8, 4, 1e-9);
  CHECK_THROWS_AS(peripheralProjectorRep(es, ps), DefectivePeripheral);
}

TEST_CASE("decay profile of the unitary channel") {
  const SpectralAnalysis a = analyze(QMC(pauliXChannel()));
  CHECK(a.decay.mu == 0.0);
  for (double v : decayNorms(a, 10)) CHECK(v < 1e-14);
  CHECK(decayBound(a.decay, 5) == 0.0);
}

TEST_CASE("decay profile of AKLT") {
  const SpectralAnalysis a = analyze(QMC(SuperOperator(KrausSet(akltTensors()))));
  CHECK(a.decay.mu == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(a.decay.dMu == 1);
  CHECK(a.decay.C == doctest::Approx(a.decay.alphaBound).epsilon(1e-8));
  CHECK(a.decay.C >= a.decay.alphaBound);
}

TEST_CASE("decay profile of amplitude damping") {
  const SpectralAnalysis a = analyze(QMC(amplitudeDamping(0.3)));
  CHECK(a.decay.mu == doctest::Approx(std::sqrt(0.7)).epsilon(1e-9));
  CHECK(a.decay.dMu == 1);
  std::vector<double> moduli;
  for (Complex z : a.eigs.eigenvalues) moduli.push_back(std::abs(z));
  std::sort(moduli.begin(), moduli.end());
  CHECK(moduli[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(moduli[1] == doctest::Approx(std::sqrt(0.7)).epsilon(1e-12));
  CHECK(moduli[2] == doctest::Approx(std::sqrt(0.7)).epsilon(1e-12));
  CHECK(moduli[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decay bound covers a defective interior block") {
  // A channel-like matrix with a 2x2 Jordan block at 1/2 next to the eigenvalue 1.
  CMatrix m = CMatrix::Zero(3, 3);
  m << 1, 0, 0, 0, 0.5, 1, 0, 0, 0.5;
  const EigenSystem es = eig(m, EigOptions{1e-8, 1e8, 1e-8, 1 - 1e-8});
  const PeripheralSpectrum ps = peripheralSpectrum(es, 1e-8, 4, 1e-9);
  const DecayProfile dp = decayProfile(es, ps);
  CHECK(dp.dMu == 2);
  CHECK(dp.mu == doctest::Approx(0.5).epsilon(1e-9));
  const CMatrix proj = peripheralProjectorRep(es, ps);
  const CMatrix r = m * (CMatrix::Identity(3, 3) - proj);
  CMatrix p = r;
  for (unsigned n = 1; n <= 200; ++n) {
    CHECK(spectralNorm(p) <= decayBound(dp, n));
    p = p * r;
  }
}

TEST_CASE("difference of powers equals (M (I - M_phi))^n") {
  Rng rng(33);
  for (int t = 0; t < 10; ++t) {
    const SuperOperator e(randomKraus(rng, 2, 2));
    const SpectralAnalysis a = analyze(QMC(e));
    const CMatrix psi = a.rep * a.projector;
    const auto norms = decayNorms(a, 20);
    for (unsigned n = 1; n <= 20; ++n) {
      const double direct = spectralNorm(matrixPower(a.rep, n) - matrixPower(psi, n));
      CHECK(std::abs(direct - norms[n - 1]) < 1e-10);
    }
  }
}

TEST_CASE("contributing peripherals") {
  SUBCASE("diagonal start on the phase channel") {
    for (double psi : {1.0 / 3.0, 1 / std::sqrt(2.0)}) {
      const QMC g(phaseChannel(psi), DensityOperator::maximallyMixed(2));
      const SpectralAnalysis a = analyze(g);
      std::size_t count = 0;
      for (const auto& e : a.contributing.entries) {
        CHECK(std::abs(e.eigenvalue - 1.0) < 1e-9);
        count += e.eigenIndexes.size();
      }
      CHECK(count == 2);
    }
  }
  SUBCASE("plus state on the phase channel") {
    const QMC g(phaseChannel(1.0 / 3.0), DensityOperator::pure(plusState()));
    const SpectralAnalysis a = analyze(g);
    CHECK(findEntry(a.contributing, 1.0));
    CHECK(findEntry(a.contributing, root(1, 3)));
    CHECK(findEntry(a.contributing, root(2, 3)));
  }
  SUBCASE("stationary start") {
    const QMC g(amplitudeDamping(0.3), DensityOperator::basis(2, 0));
    const SpectralAnalysis a = analyze(g);
    REQUIRE(a.contributing.entries.size() == 1);
    CHECK(std::abs(a.contributing.entries[0].eigenvalue - 1.0) < 1e-12);
  }
  SUBCASE("ill-conditioned basis") {
    const QMC g(amplitudeDamping(0.3), DensityOperator::basis(2, 1));
    const SpectralAnalysis a = analyze(g);
    CHECK_THROWS_AS(contributingPeripherals(a.eigs, a.peripheral, *g.initial, 1e-9, 0.5), IllConditionedBasis);
  }
}

TEST_CASE("stability reports") {
  SUBCASE("diagonal start is stable with period 1") {
    for (double psi : {1.0 / 3.0, 1 / std::sqrt(2.0), 0.25}) {
      const QMC g(phaseChannel(psi), DensityOperator(CMatrix(Eigen::Vector2cd(0.3, 0.7).asDiagonal())));
      const StabilityReport r = stabilityReport(g);
      CHECK(r.stable);
      CHECK(r.period == 1u);
    }
  }
  SUBCASE("plus state at angle 1/3 has period 3") {
    const StabilityReport r = stabilityReport(QMC(phaseChannel(1.0 / 3.0), DensityOperator::pure(plusState())));
    CHECK(r.stable);
    CHECK(r.period == 3u);
    CHECK(r.offending.empty());
  }
  SUBCASE("irrational angle is unstable") {
    const double psi = 0.7071067811865475;
    Tolerances tol;
    tol.qmax = 16;
    const StabilityReport r = stabilityReport(QMC(phaseChannel(psi), DensityOperator::pure(plusState())), tol);
    CHECK_FALSE(r.stable);
    CHECK_FALSE(r.period.has_value());
    REQUIRE(r.offending.size() == 2);
    const Complex z = std::polar(1.0, 2 * std::numbers::pi * psi);
    const bool match = (std::abs(r.offending[0] - z) < 1e-9 && std::abs(r.offending[1] - std::conj(z)) < 1e-9) ||
                       (std::abs(r.offending[1] - z) < 1e-9 && std::abs(r.offending[0] - std::conj(z)) < 1e-9);
    CHECK(match);
  }
  SUBCASE("pair form uses every peripheral entry") {
    CHECK(stabilityReport(QMC(phaseChannel(1.0 / 3.0))).period == 3u);
    CHECK_FALSE(stabilityReport(QMC(phaseChannel(1 / std::sqrt(2.0)))).stable);
    CHECK(stabilityReport(QMC(notChannel())).period == 2u);
  }
}

TEST_CASE("effective qmax defaults to d^2") {
  CHECK(effectiveQmax(QMC(phaseChannel(0.25)), {}) == 4);
  Tolerances tol;
  tol.qmax = 50;
  CHECK(effectiveQmax(QMC(phaseChannel(0.25)), tol) == 50);
  // Denominator 5 exceeds the default cap for a qubit.
  CHECK_FALSE(stabilityReport(QMC(phaseChannel(0.2), DensityOperator::pure(plusState()))).stable);
  CHECK(stabilityReport(QMC(phaseChannel(0.2), DensityOperator::pure(plusState())), tol).period == 5u);
}

TEST_CASE("horizon") {
  SUBCASE("nothing interior") {
    CHECK(horizon(DecayProfile{0.0, 1, 1.0, 1.0}, 1, 0.1) == 1u);
    CHECK(horizon(DecayProfile{0.0, 1, 1.0, 1.0}, 3, 0.1) == 3u);
    CHECK(horizon(DecayProfile{0.0, 4, 1.0, 1.0}, 2, 0.1) == 4u);
    CHECK(horizon(DecayProfile{0.0, 5, 1.0, 1.0}, 2, 0.1) == 6u);
  }
  SUBCASE("hand-evaluated inequality") {
    // (1/2)^2 = 0.25 >= 0.1 and (1/2)^4 = 0.0625 < 0.1.
    CHECK(horizon(DecayProfile{0.5, 1, 1.0, 1.0}, 2, 0.1) == 4u);
    // 3^-2 = 0.111 >= 0.1 and 3^-3 = 0.037 < 0.1.
    CHECK(horizon(DecayProfile{1.0 / 3, 1, 1.0, 1.0}, 1, 0.1) == 3u);
  }
  SUBCASE("AKLT at 0.125") {
    const SpectralAnalysis a = analyze(QMC(SuperOperator(KrausSet(akltTensors()))));
    const std::uint64_t k = horizon(a.decay, 1, 0.125);
    CHECK(a.decay.C * std::pow(1.0 / 3.0, double(k)) < 0.125);
    CHECK(a.decay.C * std::pow(1.0 / 3.0, double(k - 1)) >= 0.125);
  }
  SUBCASE("rising bound") {
    const DecayProfile dp{0.9, 3, 2.0, 2.0};
    const std::uint64_t k = horizon(dp, 2, 0.01);
    CHECK(k % 2 == 0);
    for (std::uint64_t n = k; n < k + 2000; n += 2) CHECK(decayBound(dp, n) < 0.01);
    CHECK(decayBound(dp, k - 2) >= 0.01);
  }
}

TEST_CASE("horizon is a positive multiple of the period over the corpus") {
  for (const auto& c : stableCorpus()) {
    const SpectralAnalysis a = analyze(c.chain);
    const auto theta = *a.stability.period;
    for (double eps : {0.5, 0.1, 0.01}) {
      const auto k = horizon(a.decay, theta, eps);
      CHECK(k > 0);
      CHECK(k % theta == 0);
    }
  }
}

TEST_CASE("limit states") {
  SUBCASE("amplitude damping converges to the ground state") {
    Rng rng(34);
    for (int t = 0; t < 5; ++t) {
      const auto eta = limitStates(QMC(amplitudeDamping(0.3), randomDensity(rng, 2)), 1);
      REQUIRE(eta.size() == 1);
      CHECK(maxAbs(eta[0].mat() - DensityOperator::basis(2, 0).mat()) < 1e-10);
    }
  }
  SUBCASE("classical two-cycle") {
    Eigen::Matrix2d p;
    p << 0, 1, 1, 0;
    const auto eta = limitStates(embedClassicalMc(p, Eigen::Vector2d(1, 0)), 2);
    REQUIRE(eta.size() == 2);
    CHECK(maxAbs(eta[0].mat() - DensityOperator::basis(2, 0).mat()) < 1e-10);
    CHECK(maxAbs(eta[1].mat() - DensityOperator::basis(2, 1).mat()) < 1e-10);
  }
  SUBCASE("identity channel keeps the start") {
    Rng rng(35);
    const DensityOperator rho = randomDensity(rng, 3);
    const auto eta = limitStates(QMC(identityChannel(3), rho), 1);
    CHECK(maxAbs(eta[0].mat() - rho.mat()) < 1e-12);
  }
  SUBCASE("invariance under E^theta over the corpus") {
    for (const auto& c : stableCorpus()) {
      const SpectralAnalysis a = analyze(c.chain);
      const auto theta = *a.stability.period;
      const CMatrix mt = matrixPower(a.rep, unsigned(theta));
      for (const auto& eta : limitStates(a, c.chain, theta))
        CHECK(euclideanNorm(mt * vectorize(eta.mat()) - vectorize(eta.mat())) <= 1e-6);
    }
  }
}

TEST_CASE("period minimality over the corpus") {
  for (const auto& c : stableCorpus()) {
    CAPTURE(c.name);
    const SpectralAnalysis a = analyze(c.chain);
    const auto theta = *a.stability.period;
    const std::uint64_t k = horizon(a.decay, theta, 1e-6);
    std::vector<DensityOperator> traj{*c.chain.initial};
    for (std::uint64_t n = 1; n <= k + 2 * theta; ++n) traj.push_back(apply(c.chain.superop, traj.back()));
    for (std::uint64_t div = 1; div < theta; ++div) {
      if (theta % div) continue;
      bool witnessed = false;
      for (std::uint64_t n = k; n + div <= k + 2 * theta; ++n)
        witnessed |= frobeniusNorm(traj[n].mat() - traj[n + div].mat()) > 1e-6;
      CHECK(witnessed);
    }
  }
}

TEST_CASE("irreducible random channels have period at most d^2") {
  Rng rng(36);
  for (int t = 0; t < 20; ++t) {
    const Index d = 2 + t % 2;
    const StabilityReport r = stabilityReport(QMC(SuperOperator(randomKraus(rng, d, 2)), randomDensity(rng, d)));
    REQUIRE(r.stable);
    CHECK(*r.period <= std::uint64_t(d * d));
  }
}
