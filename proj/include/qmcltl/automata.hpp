#pragma once

// Buchi automata over 2^AP with explicit letter-set transition labels.

#include <optional>
#include <string>
#include <vector>

#include "qmcltl/ltl.hpp"
#include "qmcltl/props.hpp"

namespace qmcltl {

struct Transition {
  LetterSet label;
  std::size_t target = 0;
};

struct NBA {
  std::vector<std::string> aps;
  std::vector<std::vector<Transition>> transitions;  ///< outgoing, per state
  std::vector<bool> initial;
  std::vector<bool> accepting;

  explicit NBA(std::vector<std::string> aps = {}) : aps(std::move(aps)) {}

  std::size_t stateCount() const noexcept { return transitions.size(); }
  std::size_t addState(bool isInitial, bool isAccepting);
  void addTransition(std::size_t from, LetterSet label, std::size_t to);
  /// Throws InputError when a target or label does not fit the automaton.
  void validate() const;
};

/// Prefix of fixed letters followed by a cycle of letter sets.
struct LassoSpec {
  std::size_t apCount = 0;
  std::vector<Letter> prefixLetters;
  std::vector<LetterSet> cycleLetterSets;
};

/// Stem and loop; the state joining them is the only accepting state.
/// Throws InputError for an empty cycle or an empty cycle letter set.
NBA lassoNba(const LassoSpec& spec, const std::vector<std::string>& aps);

/// Intersection with a two-phase flag: states (p, q, f) where f records
/// which factor's accepting state is awaited. Only reachable states are built.
NBA product(const NBA& a, const NBA& b);

struct LassoRun {
  std::vector<std::size_t> stemStates;
  std::vector<Letter> stemLetters;
  std::vector<std::size_t> cycleStates;  ///< starts at an accepting state
  std::vector<Letter> cycleLetters;

  LassoWord word() const { return {stemLetters, cycleLetters}; }
};

struct EmptinessResult {
  bool empty = true;
  std::optional<LassoRun> witness;
};

/// Tarjan SCC decomposition; a reachable accepting state on a cycle yields
/// the witness.
EmptinessResult checkEmptiness(const NBA& a);
bool isEmpty(const NBA& a);

bool acceptsLasso(const NBA& a, const LassoWord& w);

/// L(aU) meets L(phi).
bool checkFromBelow(const NBA& aU, const Formula& phi);
/// L(aU) avoids L(!phi), i.e. L(aU) is inside L(phi).
bool checkFromAbove(const NBA& aU, const Formula& phi);

/// HOA v1 text with explicit-letter labels.
std::string toHoa(const NBA& a, const std::string& name = "");

}  // namespace qmcltl
