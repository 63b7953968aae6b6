#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ipdb/core.hpp"

namespace ipdb {

struct Term {
  bool is_var = false;
  std::string name;        // variable name
  std::size_t slot = 0;    // binding depth of the variable
  UniverseElem constant;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, Equal, Not, And, Or, Exists, Forall };

  Kind kind;
  std::string relation;            // Atom
  std::vector<Term> terms;         // Atom (args), Equal (two terms)
  std::vector<FormulaPtr> children;  // Not: 1, And/Or: 2, quantifiers: 1
  std::string var;                 // quantifiers
  std::size_t slot = 0;            // quantifiers: slot bound by this node
};

// A closed first-order formula. Quantifiers range over the active domain of
// the instance together with the constants of the query.
class Query {
 public:
  Query(FormulaPtr root, std::size_t slots);

  const Formula& root() const { return *root_; }
  const FormulaPtr& root_ptr() const { return root_; }
  const std::vector<UniverseElem>& constants() const { return constants_; }
  std::size_t slots() const { return slots_; }
  // Relations used by the query with their arities.
  const Schema& signature() const { return signature_; }

  std::string to_string() const;

 private:
  FormulaPtr root_;
  std::size_t slots_;
  std::vector<UniverseElem> constants_;
  Schema signature_;
};

// Grammar, loosest binding first:
//   formula := disj
//   disj    := conj ("|" conj)*
//   conj    := unary ("&" unary)*
//   unary   := "!" unary | ("E" | "A") var ("," var)* "." formula | primary
//   primary := "(" formula ")" | NAME "(" [term ("," term)*] ")" | term "=" term
//   term    := var | integer | "quoted string"
// Throws SyntaxError (with position), ArityMismatch, UnboundVariable.
// When a schema is given every relation must be declared there.
Query parse_query(std::string_view text, const Schema* schema = nullptr);

// Boolean satisfaction over the deduplicated instance.
bool eval_bool(const Query& q, const BagInstance& d);

// Builders for programmatic queries.
namespace qb {
Term var(std::string name);
Term val(UniverseElem v);
FormulaPtr atom(std::string relation, std::vector<Term> terms);
FormulaPtr eq(Term a, Term b);
FormulaPtr neg(FormulaPtr f);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr exists(std::string var, FormulaPtr body);
FormulaPtr forall(std::string var, FormulaPtr body);
// Resolves variable names to slots; throws UnboundVariable on free variables.
Query close(FormulaPtr root);
}  // namespace qb

}  // namespace ipdb
