#include <doctest.h>

#include <algorithm>

#include "corpus.hpp"

using namespace qmcltl;
using namespace qmcltl::testing;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double maxAbs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

bool containsEigenvalue(const std::vector<Complex>& ev, Complex z, double tol) {
  return std::any_of(ev.begin(), ev.end(), [&](Complex e) { return std::abs(e - z) < tol; });
}

}  // namespace

TEST_CASE("kron of identities is the identity") {
  CHECK(kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)) == CMatrix::Identity(4, 4));
}

TEST_CASE("kron of two nilpotent units has one entry at (1, 2)") {
  const CMatrix k = kron(m2(0, 1, 0, 0), m2(0, 0, 1, 0));
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(1, 2) = 1;
  CHECK(k == expected);
}

TEST_CASE("kron mixed-product identity") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = randomMatrix(rng, 2, 2), b = randomMatrix(rng, 2, 2);
    const CMatrix c = randomMatrix(rng, 2, 2), d = randomMatrix(rng, 2, 2);
    CHECK(maxAbs(kron(a, b) * kron(c, d) - kron(a * c, b * d)) < 1e-12);
  }
}

TEST_CASE("vectorize follows the row-major convention") {
  const CVector v = vectorize(m2(0, 1, 0, 0));
  CVector e1 = CVector::Zero(4);
  e1(1) = 1;
  CHECK(v == e1);
  CHECK(vectorize(CMatrix::Identity(2, 2)) == omegaVector(2));
  CVector omega(4);
  omega << 1, 0, 0, 1;
  CHECK(omegaVector(2) == omega);
}

TEST_CASE("vectorize equals (A (x) I)|Omega>") {
  Rng rng(2);
  const CMatrix a = randomMatrix(rng, 3, 3);
  CHECK(maxAbs(vectorize(a) - kron(a, CMatrix::Identity(3, 3)) * omegaVector(3)) < 1e-12);
}

TEST_CASE("devectorize inverts vectorize") {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const CMatrix a = randomMatrix(rng, 3, 3);
    CHECK(devectorize(vectorize(a)) == a);
  }
}

TEST_CASE("vectorize rejects non-square and devectorize non-square lengths") {
  CHECK_THROWS_AS(vectorize(CMatrix::Zero(2, 3)), InputError);
  CHECK_THROWS_AS(devectorize(CVector::Zero(3)), InputError);
}

TEST_CASE("frobenius norm") {
  CHECK(frobeniusNorm(CMatrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(frobeniusNorm(CMatrix::Zero(3, 3)) == 0.0);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const CMatrix a = randomMatrix(rng, 3, 3);
    CHECK(std::abs(frobeniusNorm(a) - euclideanNorm(vectorize(a))) < 1e-12);
  }
}

TEST_CASE("frobenius norm is unitarily invariant") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = randomMatrix(rng, 3, 3);
    const CMatrix u = randomUnitary(rng, 3);
    CHECK(std::abs(frobeniusNorm(u * a * u.adjoint()) - frobeniusNorm(a)) < 1e-10);
  }
}

TEST_CASE("spectral norm") {
  CHECK(spectralNorm(CMatrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-14));
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = Complex(0, -4);
  CHECK(spectralNorm(d) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("spectral norm agrees with the largest eigenvalue of M^dagger M") {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const CMatrix m = randomMatrix(rng, 4, 4);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.adjoint() * m);
    const double oracle = std::sqrt(es.eigenvalues().maxCoeff());
    CHECK(std::abs(spectralNorm(m) - oracle) <= 1e-10 * oracle);
  }
}

TEST_CASE("spectral norm is multiplicative over kron") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = randomMatrix(rng, 2, 3), b = randomMatrix(rng, 3, 2);
    CHECK(std::abs(spectralNorm(kron(a, b)) - spectralNorm(a) * spectralNorm(b)) < 1e-8);
  }
}

TEST_CASE("matrix power and finiteness helpers") {
  const CMatrix j = m2(0.5, 1, 0, 0.5);
  CHECK(maxAbs(matrixPower(j, 3) - j * j * j) < 1e-15);
  CHECK(matrixPower(j, 0) == CMatrix::Identity(2, 2));
  CMatrix bad = j;
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(allFinite(bad));
  CHECK(allFinite(j));
  CHECK(hermiticityDefect(j) == doctest::Approx(1.0));
}

TEST_CASE("eig of a diagonal matrix") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 0.5;
  const EigenSystem es = eig(d);
  REQUIRE(es.eigenvalues.size() == 2);
  CHECK(std::abs(es.eigenvalues[0] - 1.0) < 1e-14);
  CHECK(std::abs(es.eigenvalues[1] - 0.5) < 1e-14);
  // Columns are multiples of the standard basis vectors.
  CHECK(std::abs(es.rightVectors(1, 0)) < 1e-14);
  CHECK(std::abs(es.rightVectors(0, 1)) < 1e-14);
  CHECK(std::none_of(es.defectFlags.begin(), es.defectFlags.end(), [](bool b) { return b; }));
}

TEST_CASE("eig of the NOT channel's representation") {
  // |11><00| + |00><11| expanded by hand: eigenvalues 1, -1 on span{|00>, |11>}, 0 elsewhere.
  const EigenSystem es = eig(notChannel().rep());
  REQUIRE(es.dim() == 4);
  CHECK(containsEigenvalue(es.eigenvalues, 1.0, 1e-12));
  CHECK(containsEigenvalue(es.eigenvalues, -1.0, 1e-12));
  CHECK(std::count_if(es.eigenvalues.begin(), es.eigenvalues.end(), [](Complex z) { return std::abs(z) < 1e-12; }) ==
        2);
}

TEST_CASE("eig of the Pauli-X conjugation channel has spectrum {1, -1, 1, -1}") {
  const EigenSystem es = eig(pauliXChannel().rep());
  int plus = 0, minus = 0;
  for (Complex z : es.eigenvalues) {
    plus += std::abs(z - 1.0) < 1e-12;
    minus += std::abs(z + 1.0) < 1e-12;
  }
  CHECK(plus == 2);
  CHECK(minus == 2);
}

TEST_CASE("eig flags a Jordan block as defective") {
  const EigenSystem es = eig(m2(0.5, 1, 0, 0.5));
  REQUIRE(es.clusters.size() == 1);
  CHECK(es.clusters[0].size == 2);
  CHECK(es.clusters[0].defective);
  CHECK(es.defectFlags[0]);
  CHECK(es.defectFlags[1]);
}

TEST_CASE("eig of a perturbed Jordan block merges the split pair") {
  const EigenSystem es = eig(m2(0.5, 1, 1e-14, 0.5));
  REQUIRE(es.clusters.size() == 1);
  CHECK(es.clusters[0].defective);
}

TEST_CASE("eig keeps separated clusters apart") {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0 - 1e-9;
  a(2, 2) = 0.2;
  EigOptions o;
  o.separateAbove = 1.0 - 1e-8;
  const EigenSystem es = eig(a, o);
  CHECK(es.clusters.size() == 2);
  o.separateAbove = 1.0 - 1e-10;
  CHECK(eig(a, o).clusters.size() == 3);
}

TEST_CASE("eig reconstruction and biorthogonality on random matrices") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const Index d = 2 + t % 5;
    const CMatrix a = randomMatrix(rng, d, d);
    const EigenSystem es = eig(a);
    CHECK(std::none_of(es.defectFlags.begin(), es.defectFlags.end(), [](bool b) { return b; }));
    CMatrix diag = CMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) diag(i, i) = es.eigenvalues[i];
    const double tol = 1e-9 * spectralNorm(a) * es.conditionEstimate;
    CHECK(spectralNorm(es.rightVectors * diag * es.inverseVectors() - a) <= tol);
    CHECK(maxAbs(es.leftVectors.adjoint() * es.rightVectors - CMatrix::Identity(d, d)) < 1e-9 * es.conditionEstimate);
    for (Index i = 0; i < d; ++i) {
      const CVector v = es.rightVectors.col(i);
      CHECK(euclideanNorm(a * v - es.eigenvalues[i] * v) <= 1e-9 * spectralNorm(a) * euclideanNorm(v));
    }
  }
}

TEST_CASE("eig on random channel representations") {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const SuperOperator e(randomKraus(rng, 2 + t % 2, 1 + t % 3));
    const EigenSystem es = eig(e.rep());
    const CMatrix recon = es.rightVectors * es.blocks * es.inverseVectors();
    CHECK(spectralNorm(recon - e.rep()) <= 1e-9 * spectralNorm(e.rep()) * es.conditionEstimate);
    CHECK(es.conditionEstimate >= 1.0 - 1e-12);
  }
}

TEST_CASE("singular values are sorted and nonnegative") {
  Rng rng(10);
  const auto s = singularValues(randomMatrix(rng, 4, 3));
  REQUIRE(s.size() == 3);
  CHECK(std::is_sorted(s.rbegin(), s.rend()));
  CHECK(s.back() >= 0.0);
}
