#include "qmcltl/props.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qmcltl/error.hpp"

namespace qmcltl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Whether a's lower end admits every point b's lower end admits.
bool lowerReaches(const Interval& a, const Interval& b) {
  return a.lo < b.lo || (a.lo == b.lo && (a.loClosed || !b.loClosed));
}

bool upperReaches(const Interval& a, const Interval& b) {
  return a.hi > b.hi || (a.hi == b.hi && (a.hiClosed || !b.hiClosed));
}

}  // namespace

Interval::Interval(double lo_, double hi_, bool loClosed_, bool hiClosed_)
    : lo(lo_), hi(hi_), loClosed(loClosed_), hiClosed(hiClosed_) {
  if (std::isnan(lo) || std::isnan(hi)) throw InputError("interval endpoint is NaN");
  if (lo > hi) throw InputError("interval has lo > hi");
  if (std::isinf(lo)) loClosed = false;
  if (std::isinf(hi)) hiClosed = false;
}

Interval Interval::line() { return {-kInf, kInf, false, false}; }

bool Interval::contains(double x) const {
  if (x < lo || x > hi) return false;
  if (x == lo && !loClosed) return false;
  if (x == hi && !hiClosed) return false;
  return true;
}

bool Interval::empty() const { return lo > hi || (lo == hi && !(loClosed && hiClosed)); }

Interval intersect(const Interval& a, const Interval& b) {
  Interval r;
  if (a.lo > b.lo) {
    r.lo = a.lo;
    r.loClosed = a.loClosed;
  } else if (b.lo > a.lo) {
    r.lo = b.lo;
    r.loClosed = b.loClosed;
  } else {
    r.lo = a.lo;
    r.loClosed = a.loClosed && b.loClosed;
  }
  if (a.hi < b.hi) {
    r.hi = a.hi;
    r.hiClosed = a.hiClosed;
  } else if (b.hi < a.hi) {
    r.hi = b.hi;
    r.hiClosed = b.hiClosed;
  } else {
    r.hi = a.hi;
    r.hiClosed = a.hiClosed && b.hiClosed;
  }
  return r;
}

Window Window::allBut(double x) { return Window{Interval(-kInf, x, false, false), Interval(x, kInf, false, false)}; }

bool Window::contains(double x) const {
  return std::any_of(parts.begin(), parts.end(), [x](const Interval& p) { return p.contains(x); });
}

bool Window::intersects(const Interval& range) const {
  return std::any_of(parts.begin(), parts.end(), [&](const Interval& p) { return !intersect(p, range).empty(); });
}

Window Window::normalized() const {
  std::vector<Interval> ps;
  for (const auto& p : parts)
    if (!p.empty()) ps.push_back(p);
  std::sort(ps.begin(), ps.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.loClosed && !b.loClosed;
  });
  std::vector<Interval> out;
  for (const auto& p : ps) {
    if (!out.empty()) {
      auto& cur = out.back();
      if (p.lo < cur.hi || (p.lo == cur.hi && (cur.hiClosed || p.loClosed))) {
        if (p.hi > cur.hi) {
          cur.hi = p.hi;
          cur.hiClosed = p.hiClosed;
        } else if (p.hi == cur.hi) {
          cur.hiClosed = cur.hiClosed || p.hiClosed;
        }
        continue;
      }
    }
    out.push_back(p);
  }
  return Window(std::move(out));
}

bool Window::covers(const Interval& range) const {
  if (range.empty()) return true;
  const Window n = normalized();
  return std::any_of(n.parts.begin(), n.parts.end(),
                     [&](const Interval& p) { return lowerReaches(p, range) && upperReaches(p, range); });
}

LetterSet::LetterSet(std::size_t apCount) : apCount_(apCount) {
  if (apCount > kMaxPropositions) throw InputError("at most 16 atomic propositions are supported");
  bits_.assign((universeSize() + 63) / 64, 0);
}

LetterSet LetterSet::all(std::size_t apCount) {
  LetterSet s(apCount);
  for (Letter l = 0; l < s.universeSize(); ++l) s.insert(l);
  return s;
}

LetterSet LetterSet::singleton(std::size_t apCount, Letter l) {
  LetterSet s(apCount);
  s.insert(l);
  return s;
}

void LetterSet::insert(Letter l) {
  if (l >= universeSize()) throw InputError("letter outside the alphabet");
  bits_[l / 64] |= std::uint64_t(1) << (l % 64);
}

bool LetterSet::contains(Letter l) const {
  if (l >= universeSize()) return false;
  return (bits_[l / 64] >> (l % 64)) & 1u;
}

bool LetterSet::empty() const {
  return std::all_of(bits_.begin(), bits_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t LetterSet::size() const {
  std::size_t n = 0;
  for (auto w : bits_) n += std::size_t(std::popcount(w));
  return n;
}

std::vector<Letter> LetterSet::letters() const {
  std::vector<Letter> out;
  for (Letter l = 0; l < universeSize(); ++l)
    if (contains(l)) out.push_back(l);
  return out;
}

Letter LetterSet::first() const {
  for (std::size_t w = 0; w < bits_.size(); ++w)
    if (bits_[w] != 0) return Letter(w * 64 + std::size_t(std::countr_zero(bits_[w])));
  throw InputError("empty letter set has no first letter");
}

bool LetterSet::isSubsetOf(const LetterSet& other) const {
  if (apCount_ != other.apCount_) throw InputError("letter sets over different alphabets");
  for (std::size_t w = 0; w < bits_.size(); ++w)
    if (bits_[w] & ~other.bits_[w]) return false;
  return true;
}

LetterSet LetterSet::intersect(const LetterSet& other) const {
  if (apCount_ != other.apCount_) throw InputError("letter sets over different alphabets");
  LetterSet r(apCount_);
  for (std::size_t w = 0; w < bits_.size(); ++w) r.bits_[w] = bits_[w] & other.bits_[w];
  return r;
}

bool LetterSet::intersects(const LetterSet& other) const {
  if (apCount_ != other.apCount_) throw InputError("letter sets over different alphabets");
  for (std::size_t w = 0; w < bits_.size(); ++w)
    if (bits_[w] & other.bits_[w]) return true;
  return false;
}

double expectation(const CMatrix& a, const CMatrix& rho, const Tolerances& tol) {
  if (a.rows() != rho.rows() || a.cols() != rho.cols()) throw InputError("observable and state dimensions differ");
  const Complex v = (a * rho).trace();
  if (std::abs(v.imag()) > tol.imag * std::max(1.0, std::abs(v.real())))
    throw NumericalDrift("expectation value has a non-negligible imaginary part");
  return v.real();
}

void validateProps(const std::vector<ObservableProp>& aps, Index dim, const Tolerances& tol) {
  if (aps.size() > kMaxPropositions) throw InputError("at most 16 atomic propositions are supported");
  for (const auto& p : aps) {
    if (p.observable.rows() != dim || p.observable.cols() != dim)
      throw InputError("observable of '" + p.name + "' has the wrong dimension");
    if (hermiticityDefect(p.observable) > tol.herm) throw InputError("observable of '" + p.name + "' is not Hermitian");
  }
}

namespace {

Interval spectralRange(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return Interval::closed(es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff());
}

}  // namespace

Letter labelState(const DensityOperator& rho, const std::vector<ObservableProp>& aps, const Tolerances& tol) {
  validateProps(aps, rho.dim(), tol);
  Letter l = 0;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    // Rounding can push an extremal expectation just past the spectrum.
    const Interval r = spectralRange(aps[i].observable);
    const double v = std::clamp(expectation(aps[i].observable, rho.mat(), tol), r.lo, r.hi);
    if (aps[i].window.contains(v)) l |= Letter(1) << i;
  }
  return l;
}

Letter labelSuperop(const SuperOperator& e, const std::vector<TraceProp>& aps, const Tolerances& tol) {
  if (aps.size() > kMaxPropositions) throw InputError("at most 16 atomic propositions are supported");
  const Complex t = e.rep().trace();
  if (std::abs(t.imag()) > tol.imag * std::max(1.0, std::abs(t.real())))
    throw NumericalDrift("trace of the matrix representation has a non-negligible imaginary part");
  Letter l = 0;
  for (std::size_t i = 0; i < aps.size(); ++i)
    if (aps[i].window.contains(t.real())) l |= Letter(1) << i;
  return l;
}

Interval expectationRange(const ObservableProp& prop, const DensityOperator& eta, double epsilon,
                          const Tolerances& tol) {
  if (!(epsilon >= 0.0)) throw InputError("epsilon must be non-negative");
  const double c = expectation(prop.observable, eta.mat(), tol);
  if (epsilon == 0.0) return Interval::point(c);
  const double r = epsilon * frobeniusNorm(prop.observable);
  return Interval(c - r, c + r, false, false);
}

Neighborhood neighborhood(const DensityOperator& eta, const std::vector<ObservableProp>& aps, double epsilon,
                          const Tolerances& tol) {
  validateProps(aps, eta.dim(), tol);
  Neighborhood out{LetterSet(aps.size()), {}};
  Letter base = 0;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    Interval range = expectationRange(aps[i], eta, epsilon, tol);
    const Interval clipped = intersect(range, spectralRange(aps[i].observable));
    if (!clipped.empty()) range = clipped;
    const bool mayTrue = aps[i].window.intersects(range);
    const bool mayFalse = !aps[i].window.covers(range);
    if (mayTrue && mayFalse)
      out.ambiguous.push_back(i);
    else if (mayTrue)
      base |= Letter(1) << i;
  }
  if (out.ambiguous.size() > tol.ambiguityCap) {
    std::ostringstream msg;
    msg << out.ambiguous.size() << " propositions are ambiguous at epsilon " << epsilon
        << "; retry with a smaller epsilon";
    throw AmbiguityCapExceeded(msg.str());
  }
  const std::size_t k = out.ambiguous.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
    Letter l = base;
    for (std::size_t j = 0; j < k; ++j)
      if ((mask >> j) & 1u) l |= Letter(1) << out.ambiguous[j];
    out.letters.insert(l);
  }
  return out;
}

LetterSet neighborhoodLetters(const DensityOperator& eta, const std::vector<ObservableProp>& aps, double epsilon,
                              const Tolerances& tol) {
  return neighborhood(eta, aps, epsilon, tol).letters;
}

std::string letterToString(Letter l, const std::vector<std::string>& aps) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    if (!((l >> i) & 1u)) continue;
    if (!first) s += ",";
    s += aps[i];
    first = false;
  }
  return s + "}";
}

}  // namespace qmcltl
