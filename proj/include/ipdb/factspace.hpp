#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ipdb/core.hpp"

namespace ipdb {

// Interval [lower, upper] of non-negative masses. A missing upper bound means
// the mass is infinite (or at least not certified finite).
struct MassBound {
  Rational lower = 0;
  std::optional<Rational> upper = Rational(0);

  static MassBound exact(Rational v) { return {v, v}; }
  static MassBound unbounded(Rational lower = 0) { return {std::move(lower), std::nullopt}; }
  // Outward-rounded bracket around a floating-point value with relative error.
  static MassBound around(double value, double rel_err);

  bool finite() const { return upper.has_value(); }
  bool is_exact() const { return upper && *upper == lower; }
  bool contains(const Rational& v) const { return v >= lower && (!upper || v <= *upper); }
};

// Generates facts f_j, j = 1, 2, ... by substituting j + offset into the
// argument slots marked as index slots.
class FactTemplate {
 public:
  struct Slot {
    bool is_index = false;
    UniverseElem constant;
  };

  FactTemplate() = default;
  // Requires at least one index slot, otherwise the enumeration is not injective.
  FactTemplate(std::string relation, std::vector<Slot> slots, std::int64_t offset = 0);

  static Slot index() { return {true, {}}; }
  static Slot constant(UniverseElem v) { return {false, std::move(v)}; }

  Fact at(std::uint64_t j) const;
  // j >= 1 with at(j) == fact, if any.
  std::optional<std::uint64_t> match(const Fact& fact) const;
  // Whether some j, j' >= 1 give at(j) == other.at(j').
  bool may_overlap(const FactTemplate& other) const;

  FactTemplate shifted(std::int64_t extra) const;

  const std::string& relation() const { return relation_; }
  const std::vector<Slot>& slots() const { return slots_; }
  std::int64_t offset() const { return offset_; }
  std::size_t arity() const { return slots_.size(); }

 private:
  std::string relation_;
  std::vector<Slot> slots_;
  std::int64_t offset_ = 0;
};

// Weights w_j = a * q^j for j >= 1 attached to the facts of a template.
struct GeometricTail {
  FactTemplate generator;
  Rational a;
  Rational q;

  Rational weight(std::uint64_t j) const;
  bool convergent() const { return a == 0 || q < 1; }
  // sum_{j > m} a q^j; nullopt when divergent.
  std::optional<Rational> mass_after(std::uint64_t m) const;
};

// A countable family of facts f_1, f_2, ... with non-negative rational weights:
// an explicit prefix followed by an optional geometric tail. Weights are
// marginals for TI-PDBs and rates for Poisson PDBs; probability bounds are
// enforced by the model that consumes the family.
class FactFamily {
 public:
  using Entry = std::pair<Fact, Rational>;

  FactFamily() = default;
  // Checks weights >= 0, distinct facts, and no prefix fact reachable by the tail.
  explicit FactFamily(std::vector<Entry> prefix,
                      std::optional<GeometricTail> tail = std::nullopt);

  static FactFamily geometric(FactTemplate generator, Rational a, Rational q) {
    return FactFamily({}, GeometricTail{std::move(generator), std::move(a), std::move(q)});
  }

  const std::vector<Entry>& prefix() const { return prefix_; }
  const std::optional<GeometricTail>& tail() const { return tail_; }
  bool is_finite() const { return !tail_; }
  // Number of facts for finite families.
  std::size_t finite_size() const { return prefix_.size(); }

  // 1-based enumeration.
  Fact fact_at(std::uint64_t i) const;
  Rational weight_at(std::uint64_t i) const;
  // 1-based index of the fact, if it belongs to the family.
  std::optional<std::uint64_t> index_of(const Fact& f) const;

  // Largest weight in the family (nullopt if unbounded).
  std::optional<Rational> max_weight() const;

  // The first n facts as an explicit finite family.
  FactFamily truncated(std::uint64_t n) const;

  // Whether some fact could belong to both families.
  bool overlaps(const FactFamily& other) const;

 private:
  std::vector<Entry> prefix_;
  std::optional<GeometricTail> tail_;
};

// p(f); zero for facts outside the family.
Rational marginal_of(const FactFamily& fam, const Fact& f);

// xi = sum of all weights; exact for every supported shape, unbounded when the
// tail diverges.
MassBound total_mass(const FactFamily& fam);

// r_n = sum_{i > n} w_i.
MassBound tail_mass(const FactFamily& fam, std::uint64_t n);

// Smallest n with tail_mass(n).upper <= eps. Throws NonconvergentFamily.
std::uint64_t truncation_index(const FactFamily& fam, const Rational& eps);

// Subset of 1-based family indices: a finite list plus optionally every
// index from `all_from` onward.
struct IndexSelection {
  std::vector<std::uint64_t> indices;
  std::optional<std::uint64_t> all_from;

  bool contains(std::uint64_t i) const;
};

// Sub-family of the selected indices, preserving enumeration order. A
// co-finite selection must start its open range inside the tail.
FactFamily select(const FactFamily& fam, const IndexSelection& keep);

}  // namespace ipdb
