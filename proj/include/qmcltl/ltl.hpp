#pragma once

// LTL formulas: syntax tree, parser, lasso evaluation and NBA translation.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qmcltl/props.hpp"

namespace qmcltl {

struct NBA;

enum class Op { True, False, Ap, Not, Or, And, Implies, Next, Until, Release, Eventually, Always };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

/// Immutable node. `steps` is the Next count (X^steps) and 0 elsewhere.
struct FormulaNode {
  Op op;
  std::string name;
  Formula left;
  Formula right;
  unsigned steps = 0;
};

Formula tt();
Formula ff();
Formula ap(std::string name);
Formula neg(Formula f);
Formula lor(Formula a, Formula b);
Formula land(Formula a, Formula b);
Formula implies(Formula a, Formula b);
/// X^steps f; nested Next nodes collapse into one.
Formula next(Formula f, unsigned steps = 1);
Formula until(Formula a, Formula b);
Formula release(Formula a, Formula b);
Formula eventually(Formula f);
Formula always(Formula f);

/// Node count, with X^J counted as J nodes.
std::size_t size(const Formula& f);
bool equal(const Formula& a, const Formula& b);
/// Fully parenthesized text that parse() reads back.
std::string toString(const Formula& f);
/// Atomic proposition names in order of first occurrence.
std::vector<std::string> atomicNames(const Formula& f);

/// Grammar, loosest first:
///
///   impl  := or ('->' impl)?
///   or    := and ('|' and)*
///   and   := until ('&' until)*
///   until := unary ('U' until)?
///   unary := ('!' | 'X' | 'X^' n | 'F' | 'G') unary | atom
///   atom  := 'true' | 'false' | ident | '"' quoted '"' | '(' impl ')'
///
/// `&&` and `||` are accepted as synonyms. Throws SyntaxError.
Formula parse(std::string_view text);

struct LassoWord {
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
};

/// Exact satisfaction of prefix . cycle^omega; throws InputError for an
/// empty cycle or proposition names missing from `aps`.
bool evalLasso(const Formula& f, const LassoWord& w, const std::vector<std::string>& aps);

/// Tableau translation of the negation normal form with counter
/// degeneralization of the Until obligations.
NBA toNba(const Formula& f, const std::vector<std::string>& aps);

}  // namespace qmcltl
