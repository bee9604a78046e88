#include "qmcltl/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include "qmcltl/error.hpp"

namespace qmcltl {

std::size_t NBA::addState(bool isInitial, bool isAccepting) {
  transitions.emplace_back();
  initial.push_back(isInitial);
  accepting.push_back(isAccepting);
  return transitions.size() - 1;
}

void NBA::addTransition(std::size_t from, LetterSet label, std::size_t to) {
  if (from >= stateCount() || to >= stateCount()) throw InputError("transition endpoint out of range");
  if (label.apCount() != aps.size()) throw InputError("transition label over the wrong alphabet");
  transitions[from].push_back({std::move(label), to});
}

void NBA::validate() const {
  if (initial.size() != stateCount() || accepting.size() != stateCount())
    throw InputError("automaton state flags have the wrong length");
  for (const auto& out : transitions)
    for (const auto& t : out) {
      if (t.target >= stateCount()) throw InputError("transition target out of range");
      if (t.label.apCount() != aps.size()) throw InputError("transition label over the wrong alphabet");
    }
}

NBA lassoNba(const LassoSpec& spec, const std::vector<std::string>& aps) {
  if (spec.apCount != aps.size()) throw InputError("lasso alphabet does not match the proposition list");
  if (spec.cycleLetterSets.empty()) throw InputError("lasso needs a non-empty cycle");
  for (const auto& s : spec.cycleLetterSets) {
    if (s.apCount() != aps.size()) throw InputError("cycle letter set over the wrong alphabet");
    if (s.empty()) throw InputError("cycle letter set is empty");
  }
  NBA a(aps);
  const std::size_t m = spec.prefixLetters.size();
  const std::size_t l = spec.cycleLetterSets.size();
  for (std::size_t i = 0; i < m + l; ++i) a.addState(i == 0, i == m);
  for (std::size_t i = 0; i < m; ++i) a.addTransition(i, LetterSet::singleton(aps.size(), spec.prefixLetters[i]), i + 1);
  for (std::size_t j = 0; j < l; ++j) a.addTransition(m + j, spec.cycleLetterSets[j], m + (j + 1) % l);
  return a;
}

NBA product(const NBA& a, const NBA& b) {
  if (a.aps != b.aps) throw InputError("product of automata over different alphabets");
  NBA out(a.aps);
  using Key = std::tuple<std::size_t, std::size_t, int>;
  std::map<Key, std::size_t> index;
  std::deque<Key> queue;
  auto state = [&](std::size_t p, std::size_t q, int f, bool init) {
    const Key key{p, q, f};
    const auto it = index.find(key);
    if (it != index.end()) return it->second;
    const std::size_t s = out.addState(init, f == 0 && a.accepting[p]);
    index.emplace(key, s);
    queue.push_back(key);
    return s;
  };
  for (std::size_t p = 0; p < a.stateCount(); ++p)
    if (a.initial[p])
      for (std::size_t q = 0; q < b.stateCount(); ++q)
        if (b.initial[q]) state(p, q, 0, true);
  while (!queue.empty()) {
    const auto [p, q, f] = queue.front();
    queue.pop_front();
    const std::size_t from = index.at({p, q, f});
    const int nf = f == 0 ? (a.accepting[p] ? 1 : 0) : (b.accepting[q] ? 0 : 1);
    for (const auto& ta : a.transitions[p])
      for (const auto& tb : b.transitions[q]) {
        LetterSet label = ta.label.intersect(tb.label);
        if (label.empty()) continue;
        const std::size_t to = state(ta.target, tb.target, nf, false);
        out.addTransition(from, std::move(label), to);
      }
  }
  return out;
}

namespace {

// Iterative Tarjan over the states reachable from the initial ones.
std::vector<int> sccIds(const NBA& a, std::vector<bool>& reachable) {
  const std::size_t n = a.stateCount();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> onStack(n, false);
  std::vector<std::size_t> stack;
  reachable.assign(n, false);
  int counter = 0;
  int comps = 0;
  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (!a.initial[root] || index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = true;
    reachable[root] = true;
    while (!call.empty()) {
      auto& fr = call.back();
      const std::size_t v = fr.v;
      if (fr.edge < a.transitions[v].size()) {
        const auto& t = a.transitions[v][fr.edge++];
        if (t.label.empty()) continue;
        const std::size_t w = t.target;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          reachable[w] = true;
          call.push_back({w, 0});
        } else if (onStack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        for (;;) {
          const std::size_t w = stack.back();
          stack.pop_back();
          onStack[w] = false;
          comp[w] = comps;
          if (w == v) break;
        }
        ++comps;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comp;
}

struct Step {
  std::size_t from;
  Letter letter;
};

// Shortest path by BFS from `sources` to `goal`, restricted to `allowed`.
// States along the path exclude the goal. With `nonEmpty`, the path has at
// least one edge even if a source is the goal.
bool shortestPath(const NBA& a, const std::vector<std::size_t>& sources, std::size_t goal,
                  const std::vector<bool>& allowed, bool nonEmpty, std::vector<std::size_t>& states,
                  std::vector<Letter>& letters) {
  const std::size_t n = a.stateCount();
  std::vector<bool> seen(n, false);
  std::vector<Step> parent(n, {n, 0});
  std::vector<bool> isSource(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t s : sources) {
    isSource[s] = true;
    if (!nonEmpty && s == goal) {
      states.clear();
      letters.clear();
      return true;
    }
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const auto& t : a.transitions[v]) {
      if (t.label.empty() || !allowed[t.target]) continue;
      if (t.target == goal) {
        std::vector<std::size_t> rs{v};
        std::vector<Letter> rl{t.label.first()};
        std::size_t cur = v;
        while (!isSource[cur]) {
          rl.push_back(parent[cur].letter);
          cur = parent[cur].from;
          rs.push_back(cur);
        }
        std::reverse(rs.begin(), rs.end());
        std::reverse(rl.begin(), rl.end());
        states = std::move(rs);
        letters = std::move(rl);
        return true;
      }
      if (seen[t.target]) continue;
      seen[t.target] = true;
      parent[t.target] = {v, t.label.first()};
      queue.push_back(t.target);
    }
  }
  return false;
}

}  // namespace

EmptinessResult checkEmptiness(const NBA& a) {
  a.validate();
  std::vector<bool> reachable;
  const auto comp = sccIds(a, reachable);
  const std::size_t n = a.stateCount();
  std::vector<std::size_t> compSize(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (comp[v] >= 0) ++compSize[std::size_t(comp[v])];

  for (std::size_t s = 0; s < n; ++s) {
    if (!reachable[s] || !a.accepting[s]) continue;
    const int c = comp[s];
    bool cyclic = compSize[std::size_t(c)] > 1;
    if (!cyclic)
      for (const auto& t : a.transitions[s]) cyclic = cyclic || (t.target == s && !t.label.empty());
    if (!cyclic) continue;

    EmptinessResult r;
    r.empty = false;
    LassoRun run;
    std::vector<std::size_t> initials;
    for (std::size_t v = 0; v < n; ++v)
      if (a.initial[v]) initials.push_back(v);
    std::vector<std::size_t> stem;
    std::vector<Letter> stemLetters;
    shortestPath(a, initials, s, reachable, false, stem, stemLetters);
    std::vector<bool> inComp(n, false);
    for (std::size_t v = 0; v < n; ++v) inComp[v] = comp[v] == c;
    std::vector<std::size_t> loop;
    std::vector<Letter> loopLetters;
    shortestPath(a, {s}, s, inComp, true, loop, loopLetters);
    run.stemStates = std::move(stem);
    run.stemLetters = std::move(stemLetters);
    run.cycleStates = std::move(loop);
    run.cycleLetters = std::move(loopLetters);
    r.witness = std::move(run);
    return r;
  }
  return {};
}

bool isEmpty(const NBA& a) { return checkEmptiness(a).empty; }

bool acceptsLasso(const NBA& a, const LassoWord& w) {
  LassoSpec spec;
  spec.apCount = a.aps.size();
  spec.prefixLetters = w.prefix;
  for (Letter l : w.cycle) spec.cycleLetterSets.push_back(LetterSet::singleton(a.aps.size(), l));
  return !isEmpty(product(a, lassoNba(spec, a.aps)));
}

bool checkFromBelow(const NBA& aU, const Formula& phi) { return !isEmpty(product(aU, toNba(phi, aU.aps))); }

bool checkFromAbove(const NBA& aU, const Formula& phi) { return isEmpty(product(aU, toNba(neg(phi), aU.aps))); }

std::string toHoa(const NBA& a, const std::string& name) {
  a.validate();
  const std::size_t k = a.aps.size();
  auto literal = [&](Letter l) {
    if (k == 0) return std::string("t");
    std::string s;
    for (std::size_t i = 0; i < k; ++i) {
      if (i) s += "&";
      if (!((l >> i) & 1u)) s += "!";
      s += std::to_string(i);
    }
    return s;
  };
  std::ostringstream o;
  o << "HOA: v1\n";
  if (!name.empty()) o << "name: \"" << name << "\"\n";
  o << "States: " << a.stateCount() << "\n";
  for (std::size_t s = 0; s < a.stateCount(); ++s)
    if (a.initial[s]) o << "Start: " << s << "\n";
  o << "AP: " << k;
  for (const auto& p : a.aps) {
    o << " \"";
    for (char c : p) {
      if (c == '"' || c == '\\') o << '\\';
      o << c;
    }
    o << "\"";
  }
  o << "\nacc-name: Buchi\nAcceptance: 1 Inf(0)\nproperties: explicit-labels state-acc\n--BODY--\n";
  for (std::size_t s = 0; s < a.stateCount(); ++s) {
    o << "State: " << s << (a.accepting[s] ? " {0}" : "") << "\n";
    for (const auto& t : a.transitions[s]) {
      std::string label;
      if (t.label.size() == t.label.universeSize()) {
        label = "t";
      } else {
        for (Letter l : t.label.letters()) {
          if (!label.empty()) label += " | ";
          label += literal(l);
        }
      }
      o << "[" << label << "] " << t.target << "\n";
    }
  }
  o << "--END--\n";
  return o.str();
}

}  // namespace qmcltl
