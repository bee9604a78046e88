#include <doctest.h>

#include <limits>

#include "corpus.hpp"

using namespace qmcltl;
using namespace qmcltl::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ObservableProp prop(const std::string& name, CMatrix a, double lo, double hi) {
  return {name, std::move(a), Window{Interval::closed(lo, hi)}};
}

}  // namespace

TEST_CASE("intervals") {
  CHECK_THROWS_AS(Interval(1.0, 0.0, true, true), InputError);
  CHECK_THROWS_AS(Interval(std::nan(""), 0.0, true, true), InputError);
  const Interval inf(-kInf, 0.0, true, false);
  CHECK_FALSE(inf.loClosed);
  CHECK(Interval::open(0, 1).contains(0.5));
  CHECK_FALSE(Interval::open(0, 1).contains(0.0));
  CHECK(Interval::closed(0, 1).contains(1.0));
  CHECK(Interval::point(2.0).contains(2.0));
  CHECK(Interval::open(1, 1).empty());
  CHECK_FALSE(Interval::point(1).empty());
  CHECK(Interval::line().contains(-1e300));
  CHECK(intersect(Interval::closed(0, 1), Interval::open(1, 2)).empty());
  CHECK(intersect(Interval::closed(0, 1), Interval::closed(1, 2)) == Interval::point(1.0));
}

TEST_CASE("windows") {
  const Window notZero = Window::allBut(0.0);
  CHECK(notZero.contains(4.0));
  CHECK(notZero.contains(-1.0));
  CHECK_FALSE(notZero.contains(0.0));
  CHECK(notZero.covers(Interval::open(0.0, 1.0)));
  CHECK_FALSE(notZero.covers(Interval::open(-1.0, 1.0)));
  CHECK(notZero.intersects(Interval::open(-1.0, 1.0)));
  CHECK_FALSE(notZero.intersects(Interval::point(0.0)));

  const Window split{Interval::closed(0, 1), Interval(1, 2, false, true)};
  CHECK(split.covers(Interval::closed(0.5, 1.5)));
  CHECK(split.normalized().parts.size() == 1);
  const Window gap{Interval::closed(0, 1), Interval::open(1, 2)};
  CHECK(gap.covers(Interval::closed(0.5, 1.5)));
  const Window hole{Interval::open(0, 1), Interval::open(1, 2)};
  CHECK_FALSE(hole.covers(Interval::closed(0.5, 1.5)));
  CHECK(hole.normalized().parts.size() == 2);
}

TEST_CASE("labelState") {
  const auto a = prop("a", projector(2, 1), 0.0, 0.1);
  CHECK(labelState(DensityOperator::basis(2, 0), {a}) == 1u);
  CHECK(labelState(DensityOperator::maximallyMixed(2), {a}) == 0u);
  const auto b = prop("b", projector(2, 0), 0.5, 1.0);
  CHECK(labelState(DensityOperator::basis(2, 0), {a, b}) == 3u);
  CHECK(labelState(DensityOperator::basis(2, 1), {a, b}) == 0u);
}

TEST_CASE("labelState on the AKLT Choi trajectory at step 1") {
  const QMC g = choiLift(QMC(SuperOperator(KrausSet(akltTensors()))));
  const ObservableProp i1 = liftTraceProp(TraceProp{"i1", Window{Interval::point(0.0)}}, 2);
  const DensityOperator rho1 = apply(g.superop, *g.initial);
  CHECK(labelState(rho1, {i1}) == 1u);
  CHECK(labelState(*g.initial, {i1}) == 0u);
}

TEST_CASE("validateProps rejects bad observables") {
  CMatrix nonHerm = projector(2, 0);
  nonHerm(0, 1) = 1;
  CHECK_THROWS_AS(validateProps({prop("a", nonHerm, 0, 1)}, 2), InputError);
  CHECK_THROWS_AS(validateProps({prop("a", projector(3, 0), 0, 1)}, 2), InputError);
  CHECK_NOTHROW(validateProps({prop("a", projector(2, 0), 0, 1)}, 2));
  CHECK_THROWS_AS(labelState(DensityOperator::basis(2, 0), {prop("a", nonHerm, 0, 1)}), InputError);
}

TEST_CASE("expectation rejects a large imaginary residue") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 1;
  const DensityOperator rho = DensityOperator::pure(Eigen::Vector2cd(0.7071067811865475, Complex(0, 0.7071067811865475)));
  CHECK_THROWS_AS(expectation(a, rho.mat()), NumericalDrift);
}

TEST_CASE("labelSuperop") {
  const TraceProp i1{"i1", Window{Interval::point(0.0)}};
  const TraceProp i2{"i2", Window::allBut(0.0)};
  CHECK(labelSuperop(identityChannel(2), {i2}) == 1u);
  CHECK(labelSuperop(SuperOperator(KrausSet(akltTensors())), {i1, i2}) == 1u);
  CHECK(labelSuperop(SuperOperator(KrausSet(clusterTensors())), {i1, i2}) == 2u);
}

TEST_CASE("labelSuperop agrees with the lifted Choi labels on random channels") {
  Rng rng(40);
  for (int t = 0; t < 30; ++t) {
    const Index d = 2 + t % 2;
    const SuperOperator e(randomKraus(rng, d, 1 + t % 3));
    const double tr = e.rep().trace().real();
    const std::vector<TraceProp> tps{{"lo", Window{Interval(-kInf, tr + 0.01, false, true)}},
                                     {"hi", Window{Interval(tr + 0.01, kInf, true, false)}},
                                     {"mid", Window{Interval::open(tr - 0.5, tr + 0.5)}}};
    std::vector<ObservableProp> lifted;
    for (const auto& p : tps) lifted.push_back(liftTraceProp(p, d));
    const QMC g = choiLift(QMC(e));
    const DensityOperator rho1 = apply(g.superop, *g.initial);
    CHECK(labelSuperop(e, tps) == labelState(rho1, lifted));
    CHECK(labelSuperop(e, tps) == 5u);
  }
}

TEST_CASE("expectation ranges") {
  Rng rng(41);
  const DensityOperator eta = randomDensity(rng, 3);
  const Interval r = expectationRange(prop("i", CMatrix::Identity(3, 3), 1, 1), eta, 0.2);
  CHECK(r.lo == doctest::Approx(1 - 0.2 * std::sqrt(3.0)));
  CHECK(r.hi == doctest::Approx(1 + 0.2 * std::sqrt(3.0)));
  CHECK_FALSE(r.loClosed);
  CHECK_FALSE(r.hiClosed);

  const Interval r2 = expectationRange(prop("a", projector(2, 1), 0, 0.1), DensityOperator::basis(2, 0), 0.1);
  CHECK(r2.lo == doctest::Approx(-0.1));
  CHECK(r2.hi == doctest::Approx(0.1));
  CHECK(r2 == Interval::open(r2.lo, r2.hi));

  const Interval r0 = expectationRange(prop("a", projector(2, 1), 0, 0.1), DensityOperator::maximallyMixed(2), 0.0);
  CHECK(r0 == Interval::point(0.5));
}

TEST_CASE("neighborhood letters") {
  SUBCASE("no ambiguity gives the center letter") {
    const auto a = prop("a", projector(2, 1), 0.0, 0.1);
    const auto b = prop("b", projector(2, 0), 0.5, 1.0);
    const Neighborhood n = neighborhood(DensityOperator::basis(2, 0), {a, b}, 0.01);
    CHECK(n.ambiguous.empty());
    CHECK(n.letters == LetterSet::singleton(2, 3));
  }
  SUBCASE("wide epsilon escapes both ways") {
    const auto a = prop("a", projector(2, 1), 0.4, 0.6);
    const LetterSet s = neighborhoodLetters(DensityOperator::maximallyMixed(2), {a}, 0.5);
    CHECK(s.size() == 2);
    CHECK(s.contains(0));
    CHECK(s.contains(1));
  }
  SUBCASE("boundary expectation is ambiguous at every epsilon") {
    const auto a = prop("a", projector(2, 1), 0.5, 1.0);
    for (double eps = 0.5; eps > 1e-12; eps /= 4) {
      const Neighborhood n = neighborhood(DensityOperator::maximallyMixed(2), {a}, eps);
      CHECK(n.letters.size() == 2);
      CHECK(n.ambiguous == std::vector<std::size_t>{0});
    }
  }
  SUBCASE("spectral clipping at an end of the spectrum") {
    const auto a = prop("a", projector(2, 1), 0.0, 0.1);
    CHECK(neighborhoodLetters(DensityOperator::basis(2, 0), {a}, 0.05) == LetterSet::singleton(1, 1));
  }
  SUBCASE("ambiguity cap") {
    std::vector<ObservableProp> many;
    for (int i = 0; i < 16; ++i) many.push_back(prop("p" + std::to_string(i), projector(2, 1), 0.5, 1.0));
    CHECK(neighborhood(DensityOperator::maximallyMixed(2), many, 0.1).letters.size() == 65536);
    Tolerances tol;
    tol.ambiguityCap = 2;
    many.resize(3);
    CHECK_THROWS_AS(neighborhood(DensityOperator::maximallyMixed(2), many, 0.1, tol), AmbiguityCapExceeded);
    many.resize(2);
    CHECK(neighborhood(DensityOperator::maximallyMixed(2), many, 0.1, tol).letters.size() == 4);
  }
}

TEST_CASE("neighborhood containment, centers and monotonicity on random states") {
  Rng rng(42);
  for (int t = 0; t < 40; ++t) {
    const Index d = 2 + t % 2;
    const DensityOperator eta = randomDensity(rng, d, 1 + t % d);
    const double c0 = expectation(projector(d, 0), eta.mat());
    std::vector<ObservableProp> aps{
        prop("a", projector(d, 0), c0 - 0.05, 1.0),
        prop("b", randomHermitian(rng, d), -0.3, 0.3),
        {"c", projector(d, 1), Window{Interval::open(0.2, 0.4), Interval::closed(0.6, 0.9)}},
    };
    std::vector<double> eps{0.5, 0.2, 0.1, 0.04, 0.01, 0.001};
    std::optional<LetterSet> prev;
    for (double e : eps) {
      const LetterSet s = neighborhoodLetters(eta, aps, e);
      CHECK(s.contains(labelState(eta, aps)));
      if (prev) CHECK(s.isSubsetOf(*prev));
      prev = s;
      for (int k = 0; k < 200; ++k) CHECK(s.contains(labelState(perturbWithin(rng, eta, e), aps)));
    }
  }
}

TEST_CASE("letter sets") {
  LetterSet s(3);
  CHECK(s.empty());
  s.insert(5);
  s.insert(2);
  CHECK(s.size() == 2);
  CHECK(s.first() == 2u);
  CHECK(s.letters() == std::vector<Letter>{2, 5});
  CHECK(s.isSubsetOf(LetterSet::all(3)));
  CHECK(LetterSet::all(3).size() == 8);
  CHECK(s.intersect(LetterSet::singleton(3, 5)) == LetterSet::singleton(3, 5));
  CHECK_FALSE(s.intersects(LetterSet::singleton(3, 7)));
  CHECK_THROWS_AS(s.insert(8), InputError);
  CHECK(LetterSet::all(16).size() == 65536);
  CHECK_THROWS_AS(LetterSet(17), InputError);
  CHECK(letterToString(5, {"a", "b", "c"}) == "{a,c}");
  CHECK(letterToString(0, {"a"}) == "{}");
}
