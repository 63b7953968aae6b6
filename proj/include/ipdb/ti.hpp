#pragma once

#include <cstdint>
#include <functional>

#include "ipdb/core.hpp"
#include "ipdb/factspace.hpp"
#include "ipdb/random.hpp"

namespace ipdb {

// Default total-variation tolerance for sampling infinite families.
inline const Rational kDefaultSamplingDelta = Rational(1, 1000000000);

// A tuple-independent set PDB spanned by a fact family and its marginals.
// Only constructible through validate_ti, which certifies existence.
class TiPdb {
 public:
  const FactFamily& family() const { return family_; }
  // Certified xi = sum of all marginals.
  const Rational& total_mass() const { return xi_; }

 private:
  friend TiPdb validate_ti(FactFamily fam);
  TiPdb(FactFamily fam, Rational xi) : family_(std::move(fam)), xi_(std::move(xi)) {}

  FactFamily family_;
  Rational xi_;
};

// Succeeds iff every marginal lies in [0,1] and the marginals sum to a finite
// value. Throws DivergentMarginals / InvalidProbability.
TiPdb validate_ti(FactFamily fam);

// P({D}) = prod_{f in D} p(f) * prod_{f not in D} (1 - p(f)).
// Exact for finite families. For infinite ones the product is taken over the
// first max(n_ctx, max index in D) facts and the remaining factor is bracketed
// by 1 - r_n <= prod_{i>n} (1 - p_i) <= 1.
MassBound world_prob(const TiPdb& pdb, const BagInstance& d, std::uint64_t n_ctx = 0);

// Pr[D = {}] with the same bracketing as world_prob.
MassBound empty_prob(const TiPdb& pdb);

// Independent Bernoulli draw per fact. Infinite families are cut at
// truncation_index(delta), which keeps the total-variation error below delta.
BagInstance sample_ti(const TiPdb& pdb, Rng& rng,
                      const Rational& delta = kDefaultSamplingDelta);

// TI-PDB spanned by the restriction of the marginals to the selected facts.
TiPdb restrict_ti(const TiPdb& pdb, const IndexSelection& keep);
// Predicate form over (fact, index); finite families only, otherwise throws
// UnsupportedSubfamilyShape.
TiPdb restrict_ti(const TiPdb& pdb,
                  const std::function<bool(const Fact&, std::uint64_t)>& keep);

// E(|D|) = xi.
MassBound expected_size_ti(const TiPdb& pdb);

// Visits every world of a finite TI-PDB with its exact probability; branches
// of probability zero are skipped.
void for_each_world(const TiPdb& pdb,
                    const std::function<void(const BagInstance&, const Rational&)>& visit);

// Explicit world list of a finite TI-PDB (2^k worlds).
ExplicitWorldPdb to_explicit(const TiPdb& pdb);

}  // namespace ipdb
