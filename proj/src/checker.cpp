#include "qmcltl/checker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "qmcltl/error.hpp"

namespace qmcltl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsedMs(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void validateConfig(const CheckConfig& cfg) {
  if (!(cfg.epsilon0 > 0.0)) throw InputError("epsilon0 must be positive");
  if (cfg.maxHalvings < 1) throw InputError("maxHalvings must be at least 1");
}

std::vector<std::string> propNames(const std::vector<ObservableProp>& aps) {
  std::vector<std::string> names;
  for (const auto& p : aps) names.push_back(p.name);
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j]) throw InputError("duplicate proposition name '" + names[i] + "'");
  return names;
}

WitnessWord toWitness(const LassoRun& run, bool satisfies) { return {satisfies, run.stemLetters, run.cycleLetters}; }

}  // namespace

std::string toString(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

Verdict verdictFromString(const std::string& s) {
  if (s == "true") return Verdict::True;
  if (s == "false") return Verdict::False;
  if (s == "unknown") return Verdict::Unknown;
  throw InputError("unknown verdict '" + s + "'");
}

PreparedChain::PreparedChain(QMC g, std::vector<ObservableProp> aps, const CheckConfig& cfg)
    : g_(std::move(g)), aps_(std::move(aps)), tol_(cfg.tol) {
  if (!g_.initial) throw InputError("state semantics needs an initial state");
  validateProps(aps_, g_.dim(), tol_);
  propNames(aps_);
  const auto start = Clock::now();
  analysis_ = analyze(g_, tol_);
  if (!analysis_.stability.stable) {
    std::ostringstream msg;
    msg << "chain is not periodically stable; contributing peripheral eigenvalues without a rational angle"
        << " (denominator cap " << analysis_.qmax << "):";
    for (const auto& z : analysis_.stability.offending) msg << " " << z;
    throw NotPeriodicallyStable(msg.str(), analysis_.stability.offending);
  }
  period_ = *analysis_.stability.period;
  limits_ = limitStates(analysis_, g_, period_, tol_);
  spectralMs_ = elapsedMs(start);
  states_.push_back(*g_.initial);
}

const DensityOperator& PreparedChain::state(std::uint64_t n) {
  while (states_.size() <= n) states_.push_back(apply(g_.superop, states_.back(), tol_));
  return states_[n];
}

Letter PreparedChain::label(std::uint64_t n) {
  while (labels_.size() <= n) labels_.push_back(labelState(state(labels_.size()), aps_, tol_));
  return labels_[n];
}

CheckReport checkPrepared(PreparedChain& chain, const Formula& phi, double epsilon, const CheckConfig& cfg) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  CheckReport r;
  r.epsilon = epsilon;
  r.aps = propNames(chain.props());
  r.period = chain.period();
  r.timings.spectralMs = chain.spectralMs();
  const NBA formulaNba = toNba(phi, r.aps);

  auto start = Clock::now();
  r.horizon = horizon(chain.analysis().decay, r.period, epsilon);
  if (r.horizon > cfg.maxHorizon) {
    std::ostringstream msg;
    msg << "horizon " << r.horizon << " exceeds the limit " << cfg.maxHorizon << " at epsilon " << epsilon;
    throw InputError(msg.str());
  }
  for (std::uint64_t n = 0; n < r.horizon; ++n) r.prefix.push_back(chain.label(n));

  LassoSpec spec;
  spec.apCount = r.aps.size();
  spec.prefixLetters = r.prefix;
  std::vector<bool> ambiguous(r.aps.size(), false);
  for (const auto& eta : chain.limits()) {
    auto nb = neighborhood(eta, chain.props(), epsilon, cfg.tol);
    for (auto i : nb.ambiguous) ambiguous[i] = true;
    r.cycle.push_back(nb.letters.letters());
    spec.cycleLetterSets.push_back(std::move(nb.letters));
  }
  for (std::size_t i = 0; i < ambiguous.size(); ++i)
    if (ambiguous[i]) r.ambiguous.push_back(r.aps[i]);
  r.timings.labelsMs = elapsedMs(start);

  start = Clock::now();
  const NBA aU = lassoNba(spec, r.aps);
  const auto below = checkEmptiness(product(aU, formulaNba));
  const auto above = checkEmptiness(product(aU, toNba(neg(phi), r.aps)));
  if (below.empty) {
    r.verdict = Verdict::False;
    if (above.witness) r.witness = toWitness(*above.witness, false);
  } else if (above.empty) {
    r.verdict = Verdict::True;
    r.witness = toWitness(*below.witness, true);
  } else {
    r.verdict = Verdict::Unknown;
    r.witness = toWitness(*above.witness, false);
  }
  r.timings.automataMs = elapsedMs(start);
  return r;
}

CheckReport checkState(const QMC& g, const std::vector<ObservableProp>& aps, const Formula& phi, double epsilon,
                       const CheckConfig& cfg) {
  PreparedChain chain(g, aps, cfg);
  return checkPrepared(chain, phi, epsilon, cfg);
}

ObservableProp liftTraceProp(const TraceProp& p, Index d) {
  const CVector omega = omegaVector(d);
  return {p.name, CMatrix(double(d) * omega * omega.adjoint()), p.window};
}

ObservableProp liftObservableProp(const ObservableProp& p, Index d) {
  if (p.observable.rows() == d * d && p.observable.cols() == d * d) return p;
  if (p.observable.rows() != d || p.observable.cols() != d)
    throw InputError("observable of '" + p.name + "' fits neither the channel nor its Choi lift");
  return {p.name, kron(p.observable, CMatrix::Identity(d, d)), p.window};
}

namespace {

std::vector<ObservableProp> liftAll(const std::vector<TraceProp>& aps, Index d) {
  std::vector<ObservableProp> lifted;
  for (const auto& p : aps) lifted.push_back(liftTraceProp(p, d));
  return lifted;
}

}  // namespace

CheckReport checkSuperop(const QMC& g, const std::vector<TraceProp>& aps, const Formula& phi, double epsilon,
                         const CheckConfig& cfg) {
  return checkState(choiLift(g), liftAll(aps, g.dim()), phi, epsilon, cfg);
}

RefinementResult checkWithRefinement(const QMC& g, const std::vector<ObservableProp>& aps, const Formula& phi,
                                     const CheckConfig& cfg) {
  validateConfig(cfg);
  PreparedChain chain(g, aps, cfg);
  RefinementResult out;
  double epsilon = cfg.epsilon0;
  for (unsigned i = 0; i <= cfg.maxHalvings; ++i, epsilon /= 2.0) {
    CheckReport r;
    try {
      r = checkPrepared(chain, phi, epsilon, cfg);
    } catch (const AmbiguityCapExceeded& e) {
      r.verdict = Verdict::Unknown;
      r.epsilon = epsilon;
      r.period = chain.period();
      r.aps = propNames(aps);
      r.note = e.what();
    }
    out.verdict = r.verdict;
    out.reports.push_back(std::move(r));
    if (out.verdict != Verdict::Unknown) break;
  }
  if (out.verdict == Verdict::Unknown && !out.reports.empty()) {
    auto& last = out.reports.back();
    std::string names;
    for (const auto& n : last.ambiguous) names += (names.empty() ? "" : ", ") + n;
    if (last.note.empty())
      last.note = "no conclusive verdict after " + std::to_string(cfg.maxHalvings) + " halvings" +
                  (names.empty() ? std::string() : "; ambiguous propositions: " + names);
  }
  return out;
}

RefinementResult checkSuperopWithRefinement(const QMC& g, const std::vector<TraceProp>& aps, const Formula& phi,
                                            const CheckConfig& cfg) {
  return checkWithRefinement(choiLift(g), liftAll(aps, g.dim()), phi, cfg);
}

}  // namespace qmcltl
