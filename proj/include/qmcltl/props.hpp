#pragma once

// Atomic propositions, letters and neighborhood letter sets.

#include <cstdint>
#include <string>
#include <vector>

#include "qmcltl/numerics.hpp"
#include "qmcltl/superop.hpp"
#include "qmcltl/tolerances.hpp"

namespace qmcltl {

/// Interval of the extended real line. Infinite endpoints are always open.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool loClosed = true;
  bool hiClosed = true;

  Interval() = default;
  /// Throws InputError for lo > hi or NaN endpoints.
  Interval(double lo, double hi, bool loClosed, bool hiClosed);

  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval point(double x) { return {x, x, true, true}; }
  static Interval line();

  bool contains(double x) const;
  bool empty() const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval intersect(const Interval& a, const Interval& b);

/// Finite union of intervals.
struct Window {
  std::vector<Interval> parts;

  Window() = default;
  Window(std::initializer_list<Interval> p) : parts(p) {}
  explicit Window(std::vector<Interval> p) : parts(std::move(p)) {}

  /// R \ {x}.
  static Window allBut(double x);

  bool contains(double x) const;
  bool intersects(const Interval& range) const;
  /// Whether the interval lies inside the union.
  bool covers(const Interval& range) const;
  /// Disjoint, sorted parts with touching pieces joined.
  Window normalized() const;
  friend bool operator==(const Window&, const Window&) = default;
};

/// (A, I): satisfied by rho iff tr(A rho) lies in I.
struct ObservableProp {
  std::string name;
  CMatrix observable;
  Window window;
};

/// (I) over channels: satisfied by E iff tr(M_E) lies in I.
struct TraceProp {
  std::string name;
  Window window;
};

/// Bit i is set iff the i-th proposition of the ordered AP list holds.
using Letter = std::uint32_t;

constexpr std::size_t kMaxPropositions = 16;

/// Explicit subset of 2^AP, stored as a bitmap over letters.
class LetterSet {
 public:
  explicit LetterSet(std::size_t apCount = 0);
  static LetterSet all(std::size_t apCount);
  static LetterSet singleton(std::size_t apCount, Letter l);

  std::size_t apCount() const noexcept { return apCount_; }
  std::size_t universeSize() const noexcept { return std::size_t(1) << apCount_; }

  void insert(Letter l);
  bool contains(Letter l) const;
  bool empty() const;
  std::size_t size() const;
  std::vector<Letter> letters() const;
  /// Smallest member; the set must be non-empty.
  Letter first() const;

  bool isSubsetOf(const LetterSet& other) const;
  LetterSet intersect(const LetterSet& other) const;
  bool intersects(const LetterSet& other) const;

  friend bool operator==(const LetterSet&, const LetterSet&) = default;

 private:
  std::size_t apCount_;
  std::vector<std::uint64_t> bits_;
};

/// Real part of tr(A rho); throws NumericalDrift when the imaginary residue
/// exceeds `tol.imag`.
double expectation(const CMatrix& a, const CMatrix& rho, const Tolerances& tol = {});

/// Throws InputError for non-Hermitian observables or dimension mismatches.
void validateProps(const std::vector<ObservableProp>& aps, Index dim, const Tolerances& tol = {});

Letter labelState(const DensityOperator& rho, const std::vector<ObservableProp>& aps, const Tolerances& tol = {});
Letter labelSuperop(const SuperOperator& e, const std::vector<TraceProp>& aps, const Tolerances& tol = {});

/// (tr(A eta) - eps |A|_F, tr(A eta) + eps |A|_F), open; the closed point
/// for eps = 0.
Interval expectationRange(const ObservableProp& prop, const DensityOperator& eta, double epsilon,
                          const Tolerances& tol = {});

struct Neighborhood {
  LetterSet letters;
  std::vector<std::size_t> ambiguous;  ///< indexes of props that can go either way
};

/// Over-approximation of the letters realized within Frobenius distance
/// epsilon of eta. Each expectation range is also clipped to the spectrum
/// of its observable, which every state respects. Throws
/// AmbiguityCapExceeded when more than `tol.ambiguityCap` props are
/// ambiguous.
Neighborhood neighborhood(const DensityOperator& eta, const std::vector<ObservableProp>& aps, double epsilon,
                          const Tolerances& tol = {});
LetterSet neighborhoodLetters(const DensityOperator& eta, const std::vector<ObservableProp>& aps, double epsilon,
                              const Tolerances& tol = {});

std::string letterToString(Letter l, const std::vector<std::string>& aps);

}  // namespace qmcltl
