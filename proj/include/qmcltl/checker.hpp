#pragma once

// Approximate LTL model checking of quantum Markov chains.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmcltl/automata.hpp"
#include "qmcltl/ltl.hpp"
#include "qmcltl/props.hpp"
#include "qmcltl/spectral.hpp"
#include "qmcltl/superop.hpp"
#include "qmcltl/tolerances.hpp"

namespace qmcltl {

enum class Verdict { True, False, Unknown };

std::string toString(Verdict v);
/// Inverse of toString; throws InputError.
Verdict verdictFromString(const std::string& s);

struct CheckConfig {
  double epsilon0 = 0.5;
  unsigned maxHalvings = 10;
  Tolerances tol;
  /// Refuse horizons beyond this many steps instead of simulating them.
  std::uint64_t maxHorizon = 10'000'000;
};

struct StageTimings {
  double spectralMs = 0.0;
  double labelsMs = 0.0;
  double automataMs = 0.0;
  friend bool operator==(const StageTimings&, const StageTimings&) = default;
};

struct WitnessWord {
  bool satisfies = false;  ///< whether the word satisfies the formula
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
  friend bool operator==(const WitnessWord&, const WitnessWord&) = default;
};

struct CheckReport {
  Verdict verdict = Verdict::Unknown;
  double epsilon = 0.0;
  std::uint64_t period = 1;
  std::uint64_t horizon = 0;
  std::vector<std::string> aps;
  std::vector<Letter> prefix;              ///< labels of steps 0 .. horizon - 1
  std::vector<std::vector<Letter>> cycle;  ///< neighborhood letters of eta_0 .. eta_{period-1}
  std::optional<WitnessWord> witness;
  std::vector<std::string> ambiguous;  ///< props ambiguous in some neighborhood
  std::string note;
  StageTimings timings;
  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

struct RefinementResult {
  Verdict verdict = Verdict::Unknown;
  std::vector<CheckReport> reports;
  friend bool operator==(const RefinementResult&, const RefinementResult&) = default;
};

/// Spectral data and the trajectory shared by all epsilons of one chain.
class PreparedChain {
 public:
  /// Throws NotPeriodicallyStable, InputError, NumericalDrift.
  PreparedChain(QMC g, std::vector<ObservableProp> aps, const CheckConfig& cfg);

  const QMC& chain() const noexcept { return g_; }
  const std::vector<ObservableProp>& props() const noexcept { return aps_; }
  const SpectralAnalysis& analysis() const noexcept { return analysis_; }
  std::uint64_t period() const noexcept { return period_; }
  const std::vector<DensityOperator>& limits() const noexcept { return limits_; }
  double spectralMs() const noexcept { return spectralMs_; }

  /// E^n(rho0), computed by iterated application and cached.
  const DensityOperator& state(std::uint64_t n);
  Letter label(std::uint64_t n);

 private:
  QMC g_;
  std::vector<ObservableProp> aps_;
  Tolerances tol_;
  SpectralAnalysis analysis_;
  std::uint64_t period_ = 1;
  std::vector<DensityOperator> limits_;
  std::vector<DensityOperator> states_;
  std::vector<Letter> labels_;
  double spectralMs_ = 0.0;
};

CheckReport checkPrepared(PreparedChain& chain, const Formula& phi, double epsilon, const CheckConfig& cfg = {});

/// One pass of the algorithm at a fixed epsilon, state semantics.
CheckReport checkState(const QMC& g, const std::vector<ObservableProp>& aps, const Formula& phi, double epsilon,
                       const CheckConfig& cfg = {});

/// (d |Omega><Omega|, I) for the Choi lift of a d-dimensional channel.
ObservableProp liftTraceProp(const TraceProp& p, Index d);
/// A (x) I for a d x d observable; a d^2 x d^2 observable is kept as is.
ObservableProp liftObservableProp(const ObservableProp& p, Index d);

/// Super-operator semantics through the Choi lift.
CheckReport checkSuperop(const QMC& g, const std::vector<TraceProp>& aps, const Formula& phi, double epsilon,
                         const CheckConfig& cfg = {});

/// Halves epsilon from cfg.epsilon0 until the verdict is conclusive or
/// cfg.maxHalvings halvings are spent. An epsilon whose neighborhoods are
/// too ambiguous to enumerate counts as Unknown.
RefinementResult checkWithRefinement(const QMC& g, const std::vector<ObservableProp>& aps, const Formula& phi,
                                     const CheckConfig& cfg = {});
RefinementResult checkSuperopWithRefinement(const QMC& g, const std::vector<TraceProp>& aps, const Formula& phi,
                                            const CheckConfig& cfg = {});

}  // namespace qmcltl
