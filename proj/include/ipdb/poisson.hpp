#pragma once

#include <optional>
#include <vector>

#include "ipdb/core.hpp"
#include "ipdb/factspace.hpp"
#include "ipdb/random.hpp"
#include "ipdb/ti.hpp"

namespace ipdb {

// Rates of an infinite tail of facts. With `from_presence` the generated
// weights w_j = a q^j are presence probabilities and the rate is -ln(1 - w_j);
// otherwise w_j is the rate itself.
struct RateTail {
  GeometricTail weights;
  bool from_presence = false;

  double rate(std::uint64_t j) const;
  // Certified upper bound on sum_{j > m} rate(j); nullopt when divergent.
  std::optional<double> rate_after(std::uint64_t m) const;
};

// Bag PDB in which every fact's multiplicity is an independent Poisson
// variable. Rates are doubles because -ln(1 - p) is irrational in general.
class PoissonPdb {
 public:
  const std::vector<std::pair<Fact, double>>& rates() const { return rates_; }
  const std::optional<RateTail>& tail() const { return tail_; }
  bool is_finite() const { return !tail_; }

  // Total rate: exact sum (up to rounding) for finite lists, bracketed otherwise.
  double total_rate() const;
  MassBound total_rate_bound() const;

  std::optional<double> rate_of(const Fact& f) const;
  std::uint64_t size_prefix() const { return rates_.size(); }
  Fact fact_at(std::uint64_t i) const;
  double rate_at(std::uint64_t i) const;

  // Smallest n whose rate tail sum_{i > n} lambda_i is at most delta.
  std::uint64_t truncation(double delta) const;

 private:
  friend PoissonPdb validate_poisson(std::vector<std::pair<Fact, double>> rates,
                                     std::optional<RateTail> tail);
  PoissonPdb(std::vector<std::pair<Fact, double>> rates, std::optional<RateTail> tail)
      : rates_(std::move(rates)), tail_(std::move(tail)) {}

  std::vector<std::pair<Fact, double>> rates_;
  std::optional<RateTail> tail_;
};

// Succeeds iff all rates are finite, non-negative, and sum to a finite value.
// Throws DivergentRates / InvalidProbability.
PoissonPdb validate_poisson(std::vector<std::pair<Fact, double>> rates,
                            std::optional<RateTail> tail = std::nullopt);
// Rational rate family.
PoissonPdb validate_poisson(const FactFamily& rates);

struct BagProb {
  double value;
  // Bound on |computed - true| / true.
  double rel_error;
};

// e^{-sum lambda} * prod_f lambda_f^{k_f} / k_f!; finite rate lists only.
// Throws FactOutsideFamily for facts without a rate.
BagProb bag_world_prob(const PoissonPdb& pdb, const BagInstance& d);

// Independent Poisson multiplicities; infinite tails are cut where the
// remaining total rate is at most delta.
BagInstance sample_poisson(const PoissonPdb& pdb, Rng& rng,
                           const Rational& delta = kDefaultSamplingDelta);

// lambda_f = -ln(1 - p_f). The deduplicated Poisson law equals the TI law.
// Throws AlmostSureFact if some p_f = 1.
PoissonPdb dedup_rates_from_marginals(const TiPdb& ti);

MassBound empty_prob(const PoissonPdb& pdb);

}  // namespace ipdb
