#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "ipdb/error.hpp"

namespace ipdb {

using Rational = mpq_class;

// Accepts "num/den", integers and plain decimals ("0.8" is read as 4/5).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);

//===----------------------------------------------------------------------===//
// Schema
//===----------------------------------------------------------------------===//

struct Relation {
  std::string name;
  std::size_t arity = 0;

  bool operator==(const Relation&) const = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Relation> relations);

  // Throws InvalidArgument on a duplicate symbol.
  void add(Relation relation);
  // Adds the relation if missing; throws ArityMismatch if declared differently.
  void declare(const std::string& name, std::size_t arity);

  std::optional<std::size_t> arity_of(std::string_view name) const;
  const std::vector<Relation>& relations() const { return relations_; }

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Relation> relations_;
};

//===----------------------------------------------------------------------===//
// Universe elements
//===----------------------------------------------------------------------===//

enum class ElemTag : std::uint8_t { Integer = 0, Text = 1, Exact = 2, Real = 3 };

class UniverseElem {
 public:
  UniverseElem() : value_(std::int64_t{0}) {}
  UniverseElem(std::int64_t v) : value_(v) {}  // NOLINT: implicit on purpose
  UniverseElem(int v) : value_(std::int64_t{v}) {}  // NOLINT
  UniverseElem(std::string v) : value_(std::move(v)) {}  // NOLINT
  UniverseElem(const char* v) : value_(std::string(v)) {}  // NOLINT
  UniverseElem(Rational v) : value_(std::move(v)) {}  // NOLINT
  static UniverseElem real(double v) { UniverseElem e; e.value_ = v; return e; }

  ElemTag tag() const { return static_cast<ElemTag>(value_.index()); }

  std::int64_t as_integer() const;
  const std::string& as_text() const;
  const Rational& as_exact() const;
  double as_real() const;

  // Elements with different tags are distinct; reals compare by bit pattern.
  bool operator==(const UniverseElem& other) const;

  // Value comparison; throws TagMismatch across tags.
  friend std::strong_ordering compare_values(const UniverseElem& a,
                                             const UniverseElem& b);

  // Total structural order (tag first) used for canonical instance layout.
  friend bool canonical_less(const UniverseElem& a, const UniverseElem& b);

  std::string to_string() const;

 private:
  std::variant<std::int64_t, std::string, Rational, double> value_;
};

std::strong_ordering compare_values(const UniverseElem& a, const UniverseElem& b);
bool canonical_less(const UniverseElem& a, const UniverseElem& b);

//===----------------------------------------------------------------------===//
// Facts and bag instances
//===----------------------------------------------------------------------===//

struct Fact {
  std::string relation;
  std::vector<UniverseElem> args;

  Fact() = default;
  Fact(std::string rel, std::vector<UniverseElem> a)
      : relation(std::move(rel)), args(std::move(a)) {}

  std::size_t arity() const { return args.size(); }
  bool operator==(const Fact& other) const = default;
  std::string to_string() const;
};

// Canonical total order on facts: relation name, then arity, then args.
bool operator<(const Fact& a, const Fact& b);

// Throws ArityMismatch if the fact does not agree with the schema.
void check_against(const Schema& schema, const Fact& fact);

// A finite multiset of facts. Entries are kept sorted and never hold a zero
// multiplicity, so equality is structural.
class BagInstance {
 public:
  using Entry = std::pair<Fact, std::uint64_t>;

  BagInstance() = default;
  BagInstance(std::initializer_list<Fact> facts);
  // Merges duplicate facts and drops zero multiplicities.
  static BagInstance from_entries(std::vector<Entry> entries);

  void add(const Fact& fact, std::uint64_t count = 1);

  std::uint64_t multiplicity(const Fact& fact) const;
  bool contains(const Fact& fact) const { return multiplicity(fact) > 0; }
  // Total multiplicity |D|.
  std::uint64_t size() const;
  std::size_t distinct_facts() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool is_set() const;

  const std::vector<Entry>& entries() const { return entries_; }

  bool operator==(const BagInstance&) const = default;
  friend bool operator<(const BagInstance& a, const BagInstance& b);

  std::string to_string() const;

 private:
  std::vector<Entry> entries_;
};

// Additive union: multiplicities add up.
BagInstance bag_union(const BagInstance& a, const BagInstance& b);

// Clamps every multiplicity to one.
BagInstance dedup(const BagInstance& d);

//===----------------------------------------------------------------------===//
// Explicit finite-world PDBs
//===----------------------------------------------------------------------===//

// A probability space given by listing its worlds. Zero-probability worlds are
// dropped and the rest are sorted, so two laws compare equal iff they agree.
class ExplicitWorldPdb {
 public:
  using World = std::pair<BagInstance, Rational>;

  ExplicitWorldPdb();  // point mass on the empty instance

  // Validates: each probability in [0,1], worlds pairwise distinct, sum = 1.
  explicit ExplicitWorldPdb(std::vector<World> worlds);

  // Sums probabilities of repeated worlds instead of rejecting them; the
  // total must still be exactly one.
  static ExplicitWorldPdb from_weighted(std::vector<World> worlds);

  const std::vector<World>& worlds() const { return worlds_; }
  Rational prob(const BagInstance& d) const;
  Rational prob_of(const std::function<bool(const BagInstance&)>& event) const;

  // Conditions on an event of positive probability.
  ExplicitWorldPdb condition(
      const std::function<bool(const BagInstance&)>& event) const;

  // Facts occurring with positive probability, in canonical order.
  std::vector<Fact> facts() const;

  bool operator==(const ExplicitWorldPdb&) const = default;

 private:
  struct Unchecked {};
  ExplicitWorldPdb(Unchecked, std::vector<World> worlds);
  static std::vector<World> canonicalize(std::vector<World> worlds, bool merge);

  std::vector<World> worlds_;
};

Rational marginal(const ExplicitWorldPdb& pdb, const Fact& f);

// E(|D|) = sum over worlds of |D| * P({D}).
Rational expected_size(const ExplicitWorldPdb& pdb);

ExplicitWorldPdb explicit_superpose(const ExplicitWorldPdb& a,
                                    const ExplicitWorldPdb& b);

}  // namespace ipdb
