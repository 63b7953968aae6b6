#pragma once

// Test-only helpers: fact builders, seeded generators for property tests and
// brute-force oracles that do not reuse the library's enumeration code.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ipdb/core.hpp"
#include "ipdb/factspace.hpp"

namespace ipdb::test {

inline Rational Q(const char* text) { return parse_rational(text); }
template <std::integral N, std::integral D = long>
Rational Q(N num, D den = 1) {
  Rational r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

inline Fact R(std::int64_t i) { return Fact("R", {UniverseElem(i)}); }
inline Fact S(std::int64_t i) { return Fact("S", {UniverseElem(i)}); }
inline Fact named(const std::string& rel, const std::string& v) {
  return Fact(rel, {UniverseElem(v)});
}

inline FactTemplate r_template(std::int64_t offset = 0) {
  return FactTemplate("R", {FactTemplate::index()}, offset);
}

// p_i = 2^{-i}, i >= 1, over R(i).
inline FactFamily halving_family() {
  return FactFamily::geometric(r_template(), Rational(1), Rational(1, 2));
}

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool coin() { return integer(0, 1) == 1; }

  // Random rational in [0, 1] with a small denominator; endpoints included.
  Rational probability(std::int64_t max_den = 12) {
    std::int64_t den = integer(1, max_den);
    Rational r(integer(0, den), den);
    r.canonicalize();
    return r;
  }

  // k distinct unary R facts with random marginals.
  std::vector<FactFamily::Entry> ti_entries(std::size_t k, std::int64_t max_den = 12) {
    std::vector<FactFamily::Entry> out;
    for (std::size_t i = 0; i < k; ++i)
      out.push_back({R(static_cast<std::int64_t>(i) + 1), probability(max_den)});
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Product of p or 1 - p over one subset mask of an explicit marginal list.
inline Rational ti_mask_prob(const std::vector<FactFamily::Entry>& entries, std::uint64_t mask) {
  Rational p = 1;
  for (std::size_t i = 0; i < entries.size(); ++i)
    p *= (mask >> i & 1) ? entries[i].second : Rational(1 - entries[i].second);
  return p;
}

inline BagInstance ti_mask_world(const std::vector<FactFamily::Entry>& entries,
                                 std::uint64_t mask) {
  BagInstance d;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (mask >> i & 1) d.add(entries[i].first);
  return d;
}

// World law of the TI-PDB over explicit entries, by direct mask enumeration.
inline std::map<BagInstance, Rational> ti_oracle(const std::vector<FactFamily::Entry>& entries) {
  std::map<BagInstance, Rational> law;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << entries.size()); ++mask) {
    Rational p = ti_mask_prob(entries, mask);
    if (p != 0) law[ti_mask_world(entries, mask)] += p;
  }
  return law;
}

inline std::map<BagInstance, Rational> as_map(const ExplicitWorldPdb& pdb) {
  return {pdb.worlds().begin(), pdb.worlds().end()};
}

// Hoeffding half-width recomputed here, independently of the library.
inline double hoeffding(std::uint64_t n, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

// 1 - prod_{i=1..terms} (1 - 2^{-i}); the tail beyond 200 terms is below 2^-200.
inline double halving_exists_oracle(int terms = 200) {
  long double prod = 1;
  for (int i = 1; i <= terms; ++i) prod *= 1.0L - std::ldexp(1.0L, -i);
  return static_cast<double>(1.0L - prod);
}

}  // namespace ipdb::test
