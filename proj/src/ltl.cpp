#include "qmcltl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "qmcltl/automata.hpp"
#include "qmcltl/error.hpp"

namespace qmcltl {

namespace {

Formula make(Op op, Formula l = nullptr, Formula r = nullptr, std::string name = {}, unsigned steps = 0) {
  return std::make_shared<const FormulaNode>(FormulaNode{op, std::move(name), std::move(l), std::move(r), steps});
}

void require(const Formula& f) {
  if (!f) throw InputError("null formula");
}

bool isKeyword(std::string_view s) {
  return s == "X" || s == "U" || s == "F" || s == "G" || s == "true" || s == "false";
}

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool isPlainIdentifier(const std::string& s) {
  if (s.empty() || !isIdentStart(s[0]) || isKeyword(s)) return false;
  return std::all_of(s.begin(), s.end(), isIdentChar);
}

std::string quoteName(const std::string& s) {
  if (isPlainIdentifier(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// ---- parser ---------------------------------------------------------------

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Next, Eventually, Always, Until, True, False, Ident };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  std::string text;
  unsigned steps = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    Token t;
    t.pos = i_;
    if (i_ >= s_.size()) return t;
    const char c = s_[i_];
    if (c == '(') return single(t, Tok::LParen);
    if (c == ')') return single(t, Tok::RParen);
    if (c == '!') return single(t, Tok::Not);
    if (c == '&') {
      ++i_;
      if (i_ < s_.size() && s_[i_] == '&') ++i_;
      t.kind = Tok::And;
      return t;
    }
    if (c == '|') {
      ++i_;
      if (i_ < s_.size() && s_[i_] == '|') ++i_;
      t.kind = Tok::Or;
      return t;
    }
    if (c == '-') {
      if (i_ + 1 < s_.size() && s_[i_ + 1] == '>') {
        i_ += 2;
        t.kind = Tok::Implies;
        return t;
      }
      throw SyntaxError("expected '->'", i_);
    }
    if (c == '"') return quoted(t);
    if (isIdentStart(c)) {
      std::size_t j = i_;
      while (j < s_.size() && isIdentChar(s_[j])) ++j;
      t.text = std::string(s_.substr(i_, j - i_));
      i_ = j;
      if (t.text == "true") t.kind = Tok::True;
      else if (t.text == "false") t.kind = Tok::False;
      else if (t.text == "U") t.kind = Tok::Until;
      else if (t.text == "F") t.kind = Tok::Eventually;
      else if (t.text == "G") t.kind = Tok::Always;
      else if (t.text == "X") {
        t.kind = Tok::Next;
        power(t);
      } else {
        t.kind = Tok::Ident;
      }
      return t;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", i_);
  }

 private:
  Token single(Token t, Tok k) {
    ++i_;
    t.kind = k;
    return t;
  }

  void power(Token& t) {
    std::size_t j = i_;
    while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
    if (j >= s_.size() || s_[j] != '^') return;
    ++j;
    while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
    const std::size_t start = j;
    unsigned long n = 0;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
      n = n * 10 + unsigned(s_[j] - '0');
      if (n > 1000000) throw SyntaxError("Next exponent too large", start);
      ++j;
    }
    if (j == start) throw SyntaxError("expected a number after 'X^'", j);
    t.steps = unsigned(n);
    i_ = j;
  }

  Token quoted(Token t) {
    std::size_t j = i_ + 1;
    std::string name;
    for (;;) {
      if (j >= s_.size()) throw SyntaxError("unterminated quoted name", t.pos);
      const char c = s_[j];
      if (c == '"') break;
      if (c == '\\') {
        if (j + 1 >= s_.size()) throw SyntaxError("unterminated escape", j);
        const char e = s_[j + 1];
        if (e != '"' && e != '\\') throw SyntaxError(std::string("unknown escape '\\") + e + "'", j);
        name += e;
        j += 2;
        continue;
      }
      name += c;
      ++j;
    }
    if (name.empty()) throw SyntaxError("empty quoted name", t.pos);
    i_ = j + 1;
    t.kind = Tok::Ident;
    t.text = std::move(name);
    return t;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) { cur_ = lex_.next(); }

  Formula parseAll() {
    Formula f = impl();
    if (cur_.kind != Tok::End) throw SyntaxError("unexpected trailing input", cur_.pos);
    return f;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  Formula impl() {
    Formula l = disj();
    if (cur_.kind == Tok::Implies) {
      advance();
      return implies(l, impl());
    }
    return l;
  }

  Formula disj() {
    Formula l = conj();
    while (cur_.kind == Tok::Or) {
      advance();
      l = lor(l, conj());
    }
    return l;
  }

  Formula conj() {
    Formula l = untilExpr();
    while (cur_.kind == Tok::And) {
      advance();
      l = land(l, untilExpr());
    }
    return l;
  }

  Formula untilExpr() {
    Formula l = unary();
    if (cur_.kind == Tok::Until) {
      advance();
      return until(l, untilExpr());
    }
    return l;
  }

  Formula unary() {
    switch (cur_.kind) {
      case Tok::Not:
        advance();
        return neg(unary());
      case Tok::Next: {
        const unsigned steps = cur_.steps;
        advance();
        Formula f = unary();
        return steps == 0 ? f : next(f, steps);
      }
      case Tok::Eventually:
        advance();
        return eventually(unary());
      case Tok::Always:
        advance();
        return always(unary());
      default:
        return atom();
    }
  }

  Formula atom() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::True:
        advance();
        return tt();
      case Tok::False:
        advance();
        return ff();
      case Tok::Ident:
        advance();
        return ap(t.text);
      case Tok::LParen: {
        advance();
        Formula f = impl();
        if (cur_.kind != Tok::RParen) throw SyntaxError("expected ')'", cur_.pos);
        advance();
        return f;
      }
      case Tok::End:
        throw SyntaxError("unexpected end of formula", t.pos);
      default:
        throw SyntaxError("expected a proposition, 'true', 'false' or '('", t.pos);
    }
  }

  Lexer lex_;
  Token cur_;
};

// ---- lasso evaluation -----------------------------------------------------

using Bits = std::vector<char>;

struct LassoEval {
  const std::vector<std::string>& aps;
  const LassoWord& w;
  std::size_t n;
  std::vector<std::size_t> succ;

  Bits eval(const Formula& f) {
    switch (f->op) {
      case Op::True:
        return Bits(n, 1);
      case Op::False:
        return Bits(n, 0);
      case Op::Ap: {
        const auto it = std::find(aps.begin(), aps.end(), f->name);
        if (it == aps.end()) throw InputError("unknown atomic proposition '" + f->name + "'");
        const auto bit = std::size_t(it - aps.begin());
        Bits r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = (letterAt(i) >> bit) & 1u;
        return r;
      }
      case Op::Not: {
        Bits r = eval(f->left);
        for (auto& x : r) x = !x;
        return r;
      }
      case Op::Or:
      case Op::And:
      case Op::Implies: {
        const Bits a = eval(f->left);
        const Bits b = eval(f->right);
        Bits r(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (f->op == Op::Or) r[i] = a[i] || b[i];
          else if (f->op == Op::And) r[i] = a[i] && b[i];
          else r[i] = !a[i] || b[i];
        }
        return r;
      }
      case Op::Next: {
        const Bits a = eval(f->left);
        Bits r(n);
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t j = i;
          for (unsigned s = 0; s < f->steps; ++s) j = succ[j];
          r[i] = a[j];
        }
        return r;
      }
      case Op::Until:
        return least(eval(f->left), eval(f->right));
      case Op::Eventually:
        return least(Bits(n, 1), eval(f->left));
      case Op::Release:
        return greatest(eval(f->left), eval(f->right));
      case Op::Always:
        return greatest(Bits(n, 0), eval(f->left));
    }
    throw InputError("unknown formula node");
  }

  Letter letterAt(std::size_t i) const {
    return i < w.prefix.size() ? w.prefix[i] : w.cycle[i - w.prefix.size()];
  }

  // a U b: least fixpoint of v = b | (a & X v).
  Bits least(const Bits& a, const Bits& b) {
    Bits v(n, 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = n; k-- > 0;) {
        const char nv = b[k] || (a[k] && v[succ[k]]);
        if (nv != v[k]) {
          v[k] = nv;
          changed = true;
        }
      }
    }
    return v;
  }

  // a R b: greatest fixpoint of v = b & (a | X v).
  Bits greatest(const Bits& a, const Bits& b) {
    Bits v(n, 1);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = n; k-- > 0;) {
        const char nv = b[k] && (a[k] || v[succ[k]]);
        if (nv != v[k]) {
          v[k] = nv;
          changed = true;
        }
      }
    }
    return v;
  }
};

// ---- tableau translation --------------------------------------------------

enum class NOp { True, False, Pos, NegAp, And, Or, Next, Until, Release };

class NnfPool {
 public:
  struct Entry {
    NOp op;
    int ap;
    int a;
    int b;
  };

  int intern(NOp op, int ap, int a, int b) {
    const auto key = std::make_tuple(int(op), ap, a, b);
    const auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const int id = int(entries_.size());
    entries_.push_back({op, ap, a, b});
    ids_.emplace(key, id);
    return id;
  }

  const Entry& at(int id) const { return entries_.at(std::size_t(id)); }
  std::size_t count() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  std::map<std::tuple<int, int, int, int>, int> ids_;
};

struct NnfBuilder {
  NnfPool& pool;
  const std::vector<std::string>& aps;

  int apIndex(const std::string& name) const {
    const auto it = std::find(aps.begin(), aps.end(), name);
    if (it == aps.end()) throw InputError("unknown atomic proposition '" + name + "'");
    return int(it - aps.begin());
  }

  int build(const Formula& f, bool negated) {
    switch (f->op) {
      case Op::True:
        return pool.intern(negated ? NOp::False : NOp::True, -1, -1, -1);
      case Op::False:
        return pool.intern(negated ? NOp::True : NOp::False, -1, -1, -1);
      case Op::Ap:
        return pool.intern(negated ? NOp::NegAp : NOp::Pos, apIndex(f->name), -1, -1);
      case Op::Not:
        return build(f->left, !negated);
      case Op::Or:
        return binary(negated ? NOp::And : NOp::Or, build(f->left, negated), build(f->right, negated));
      case Op::And:
        return binary(negated ? NOp::Or : NOp::And, build(f->left, negated), build(f->right, negated));
      case Op::Implies:
        return binary(negated ? NOp::And : NOp::Or, build(f->left, !negated), build(f->right, negated));
      case Op::Next: {
        int s = build(f->left, negated);
        for (unsigned k = 0; k < f->steps; ++k) s = pool.intern(NOp::Next, -1, s, -1);
        return s;
      }
      case Op::Until:
        return binary(negated ? NOp::Release : NOp::Until, build(f->left, negated), build(f->right, negated));
      case Op::Release:
        return binary(negated ? NOp::Until : NOp::Release, build(f->left, negated), build(f->right, negated));
      case Op::Eventually: {
        const int s = build(f->left, negated);
        return negated ? binary(NOp::Release, pool.intern(NOp::False, -1, -1, -1), s)
                       : binary(NOp::Until, pool.intern(NOp::True, -1, -1, -1), s);
      }
      case Op::Always: {
        const int s = build(f->left, negated);
        return negated ? binary(NOp::Until, pool.intern(NOp::True, -1, -1, -1), s)
                       : binary(NOp::Release, pool.intern(NOp::False, -1, -1, -1), s);
      }
    }
    throw InputError("unknown formula node");
  }

  int binary(NOp op, int a, int b) { return pool.intern(op, -1, a, b); }
};

constexpr int kInit = -1;

struct TableauNode {
  std::set<int> incoming;
  std::set<int> fresh;  // "New"
  std::set<int> old;
  std::set<int> next;
};

class Tableau {
 public:
  // Every node holds `top`, so nodes never differ by it alone.
  Tableau(const NnfPool& pool, int top) : pool_(pool), top_(top) {}

  void run(int root) {
    TableauNode start;
    start.incoming.insert(kInit);
    start.fresh.insert(root);
    start.fresh.insert(top_);
    expand(std::move(start));
  }

  std::vector<TableauNode> nodes;

 private:
  bool contradicts(int f, const std::set<int>& old) const {
    const auto& e = pool_.at(f);
    if (e.op == NOp::False) return true;
    if (e.op != NOp::Pos && e.op != NOp::NegAp) return false;
    for (int g : old) {
      const auto& o = pool_.at(g);
      if (o.ap == e.ap && ((o.op == NOp::Pos && e.op == NOp::NegAp) || (o.op == NOp::NegAp && e.op == NOp::Pos)))
        return true;
    }
    return false;
  }

  void addFresh(TableauNode& n, int f) {
    if (!n.old.count(f)) n.fresh.insert(f);
  }

  void expand(TableauNode n) {
    while (!n.fresh.empty()) {
      const int f = *n.fresh.begin();
      n.fresh.erase(n.fresh.begin());
      if (n.old.count(f)) continue;
      const auto& e = pool_.at(f);
      switch (e.op) {
        case NOp::True:
          n.old.insert(f);
          break;
        case NOp::False:
        case NOp::Pos:
        case NOp::NegAp:
          if (contradicts(f, n.old)) return;
          n.old.insert(f);
          break;
        case NOp::And:
          n.old.insert(f);
          addFresh(n, e.a);
          addFresh(n, e.b);
          break;
        case NOp::Next:
          n.old.insert(f);
          n.next.insert(e.a);
          break;
        case NOp::Or:
        case NOp::Until:
        case NOp::Release: {
          TableauNode second = n;
          n.old.insert(f);
          second.old.insert(f);
          if (e.op == NOp::Or) {
            addFresh(n, e.a);
            addFresh(second, e.b);
          } else if (e.op == NOp::Until) {
            addFresh(n, e.a);
            n.next.insert(f);
            addFresh(second, e.b);
          } else {
            addFresh(n, e.b);
            n.next.insert(f);
            addFresh(second, e.a);
            addFresh(second, e.b);
          }
          expand(std::move(second));
          break;
        }
      }
    }
    for (auto& existing : nodes) {
      if (existing.old == n.old && existing.next == n.next) {
        existing.incoming.insert(n.incoming.begin(), n.incoming.end());
        return;
      }
    }
    const int id = int(nodes.size());
    TableauNode successor;
    successor.incoming.insert(id);
    successor.fresh = n.next;
    successor.fresh.insert(top_);
    nodes.push_back(std::move(n));
    expand(std::move(successor));
  }

  const NnfPool& pool_;
  int top_;
};

}  // namespace

Formula tt() { return make(Op::True); }
Formula ff() { return make(Op::False); }
Formula ap(std::string name) {
  if (name.empty()) throw InputError("atomic proposition name must be non-empty");
  return make(Op::Ap, nullptr, nullptr, std::move(name));
}
Formula neg(Formula f) {
  require(f);
  return make(Op::Not, std::move(f));
}
Formula lor(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::Or, std::move(a), std::move(b));
}
Formula land(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::And, std::move(a), std::move(b));
}
Formula implies(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::Implies, std::move(a), std::move(b));
}
Formula next(Formula f, unsigned steps) {
  require(f);
  if (steps == 0) throw InputError("Next needs at least one step");
  if (f->op == Op::Next) return make(Op::Next, f->left, nullptr, {}, f->steps + steps);
  return make(Op::Next, std::move(f), nullptr, {}, steps);
}
Formula until(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::Until, std::move(a), std::move(b));
}
Formula release(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::Release, std::move(a), std::move(b));
}
Formula eventually(Formula f) {
  require(f);
  return make(Op::Eventually, std::move(f));
}
Formula always(Formula f) {
  require(f);
  return make(Op::Always, std::move(f));
}

std::size_t size(const Formula& f) {
  if (!f) return 0;
  const std::size_t own = f->op == Op::Next ? f->steps : 1;
  return own + size(f->left) + size(f->right);
}

bool equal(const Formula& a, const Formula& b) {
  if (!a || !b) return !a && !b;
  return a->op == b->op && a->name == b->name && a->steps == b->steps && equal(a->left, b->left) &&
         equal(a->right, b->right);
}

std::string toString(const Formula& f) {
  require(f);
  switch (f->op) {
    case Op::True:
      return "true";
    case Op::False:
      return "false";
    case Op::Ap:
      return quoteName(f->name);
    case Op::Not:
      return "!" + toString(f->left);
    case Op::Or:
      return "(" + toString(f->left) + " | " + toString(f->right) + ")";
    case Op::And:
      return "(" + toString(f->left) + " & " + toString(f->right) + ")";
    case Op::Implies:
      return "(" + toString(f->left) + " -> " + toString(f->right) + ")";
    case Op::Next:
      return (f->steps == 1 ? std::string("X ") : "X^" + std::to_string(f->steps) + " ") + toString(f->left);
    case Op::Until:
      return "(" + toString(f->left) + " U " + toString(f->right) + ")";
    case Op::Release:
      return "!(!" + toString(f->left) + " U !" + toString(f->right) + ")";
    case Op::Eventually:
      return "F " + toString(f->left);
    case Op::Always:
      return "G " + toString(f->left);
  }
  throw InputError("unknown formula node");
}

std::vector<std::string> atomicNames(const Formula& f) {
  std::vector<std::string> out;
  std::vector<Formula> stack{f};
  // Pre-order, left before right.
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!g) continue;
    if (g->op == Op::Ap && std::find(out.begin(), out.end(), g->name) == out.end()) out.push_back(g->name);
    stack.push_back(g->right);
    stack.push_back(g->left);
  }
  return out;
}

Formula parse(std::string_view text) { return Parser(text).parseAll(); }

bool evalLasso(const Formula& f, const LassoWord& w, const std::vector<std::string>& aps) {
  require(f);
  if (w.cycle.empty()) throw InputError("lasso word needs a non-empty cycle");
  LassoEval ev{aps, w, w.prefix.size() + w.cycle.size(), {}};
  ev.succ.resize(ev.n);
  for (std::size_t i = 0; i + 1 < ev.n; ++i) ev.succ[i] = i + 1;
  ev.succ[ev.n - 1] = w.prefix.size();
  return ev.eval(f)[0] != 0;
}

NBA toNba(const Formula& f, const std::vector<std::string>& aps) {
  require(f);
  if (aps.size() > kMaxPropositions) throw InputError("at most 16 atomic propositions are supported");
  NnfPool pool;
  NnfBuilder builder{pool, aps};
  const int root = builder.build(f, false);
  const int top = pool.intern(NOp::True, -1, -1, -1);
  Tableau tab(pool, top);
  tab.run(root);

  const std::size_t n = tab.nodes.size();
  const std::size_t apCount = aps.size();
  std::vector<LetterSet> labels;
  labels.reserve(n);
  for (const auto& node : tab.nodes) {
    Letter mustSet = 0;
    Letter mustClear = 0;
    for (int g : node.old) {
      const auto& e = pool.at(g);
      if (e.op == NOp::Pos) mustSet |= Letter(1) << e.ap;
      if (e.op == NOp::NegAp) mustClear |= Letter(1) << e.ap;
    }
    LetterSet s(apCount);
    for (Letter l = 0; l < s.universeSize(); ++l)
      if ((l & mustSet) == mustSet && (l & mustClear) == 0) s.insert(l);
    labels.push_back(std::move(s));
  }

  std::vector<int> untils;
  for (std::size_t id = 0; id < pool.count(); ++id)
    if (pool.at(int(id)).op == NOp::Until) untils.push_back(int(id));
  const std::size_t k = untils.size();
  std::vector<std::vector<bool>> fair(k, std::vector<bool>(n, false));
  for (std::size_t j = 0; j < k; ++j) {
    const int u = untils[j];
    const int rhs = pool.at(u).b;
    for (std::size_t q = 0; q < n; ++q)
      fair[j][q] = !tab.nodes[q].old.count(u) || tab.nodes[q].old.count(rhs);
  }

  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t q = 0; q < n; ++q)
    for (int from : tab.nodes[q].incoming)
      if (from != kInit) succ[std::size_t(from)].push_back(q);

  NBA out(aps);
  const std::size_t layers = std::max<std::size_t>(k, 1);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  std::deque<std::pair<std::size_t, std::size_t>> queue;
  auto accepting = [&](std::size_t q, std::size_t i) { return k == 0 || (i == 0 && fair[0][q]); };
  auto state = [&](std::size_t q, std::size_t i, bool init) {
    const auto key = std::make_pair(q, i);
    const auto it = index.find(key);
    if (it != index.end()) return it->second;
    const std::size_t s = out.addState(init, accepting(q, i));
    index.emplace(key, s);
    queue.push_back(key);
    return s;
  };
  for (std::size_t q = 0; q < n; ++q)
    if (tab.nodes[q].incoming.count(kInit)) state(q, 0, true);
  while (!queue.empty()) {
    const auto [q, i] = queue.front();
    queue.pop_front();
    const std::size_t from = index.at({q, i});
    const std::size_t ni = (k > 0 && fair[i][q]) ? (i + 1) % layers : i;
    for (std::size_t t : succ[q]) {
      const std::size_t to = state(t, ni, false);
      out.addTransition(from, labels[q], to);
    }
  }
  return out;
}

}  // namespace qmcltl
