#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "ipdb/bid.hpp"
#include "ipdb/core.hpp"
#include "ipdb/factspace.hpp"
#include "ipdb/poisson.hpp"
#include "ipdb/random.hpp"
#include "ipdb/ti.hpp"

namespace ipdb {

using ComponentModel = std::variant<TiPdb, BidPdb, PoissonPdb, ExplicitWorldPdb>;

struct Component {
  ComponentModel model;
  MassBound nonempty_prob;  // Pr[D != {}]
};

Component make_component(ComponentModel model);

// Independent superposition of finitely many components, optionally followed
// by countably many single-fact TI components: the j-th tail component holds
// fact tail->generator.at(j) with marginal a * q^j.
class SuperposedPdb {
 public:
  const std::vector<Component>& components() const { return components_; }
  const std::optional<GeometricTail>& tail() const { return tail_; }
  bool is_finite() const;  // every component finite and no tail

  // Sum of the nonempty probabilities (upper end of the bracket).
  MassBound nonempty_mass() const;

 private:
  friend SuperposedPdb superpose(std::vector<Component>, std::optional<GeometricTail>);
  SuperposedPdb(std::vector<Component> c, std::optional<GeometricTail> t)
      : components_(std::move(c)), tail_(std::move(t)) {}

  std::vector<Component> components_;
  std::optional<GeometricTail> tail_;
};

// Valid iff sum of Pr[D_i != {}] converges. Throws DivergentComponents.
SuperposedPdb superpose(std::vector<Component> components,
                        std::optional<GeometricTail> tail = std::nullopt);
// Flattened superposition of two superpositions.
SuperposedPdb superpose(const SuperposedPdb& a, const SuperposedPdb& b);

// Draws every component independently from a substream keyed by its index
// and unions the results. Each component gets an equal share of half of
// delta; the tail is cut once its remaining nonempty mass is below delta / 2.
BagInstance sample_component(const Component& c, Rng& rng, const Rational& delta);
BagInstance sample_superposed(const SuperposedPdb& sp, Rng& rng,
                              const Rational& delta = kDefaultSamplingDelta);
BagInstance sample_explicit(const ExplicitWorldPdb& pdb, Rng& rng);

// Explicit law of a finite component; throws ModeMismatch for Poisson or
// infinite models.
ExplicitWorldPdb to_explicit(const Component& c);
ExplicitWorldPdb to_explicit(const SuperposedPdb& sp);

// Upper bound on the number of worlds enumerated by to_explicit (saturating).
std::uint64_t world_count(const Component& c);

// One TI-PDB per part. The parts must partition the family's indices.
std::vector<TiPdb> decompose_ti(const TiPdb& pdb, const std::vector<IndexSelection>& parts);
// Part number for each fact of a finite family; throws
// UnsupportedSubfamilyShape for infinite families.
std::vector<TiPdb> decompose_ti(
    const TiPdb& pdb, std::size_t part_count,
    const std::function<std::size_t(const Fact&, std::uint64_t)>& part_of);

struct IndependenceReport {
  std::vector<Rational> component_probs;  // P_i(E_i)
  std::vector<Rational> superposed_probs; // P(E_i) in the superposition
  bool marginals_preserved = false;       // P(E_i) = P_i(E_i) for all i
  bool product_holds = false;             // P(∩_{i∈S} E_i) = ∏ P(E_i), every S
};

// Brute-force check of the component-event independence of a finite
// superposition. Event i is a predicate on worlds of component i; it must not
// contain a positive-probability world of any other component, otherwise
// PreconditionViolated. When the component fact sets are pairwise disjoint,
// event i is read on a superposed world through its restriction to the facts
// of component i, and probabilities come from the superposed law; otherwise
// they are taken on the product of component worlds.
IndependenceReport check_component_independence(
    const SuperposedPdb& sp,
    const std::vector<std::function<bool(const BagInstance&)>>& events);

// base ⊎ TI(extension). Throws OverlappingFactSets, NotACompletion (some
// extension marginal is 1, so Pr[extension empty] = 0), or the TI errors.
SuperposedPdb ti_completion(const TiPdb& base, const FactFamily& extension);

// True iff every extension marginal is at most lambda_cap and ti_completion
// would succeed.
bool lambda_completion_check(const TiPdb& base, const FactFamily& extension,
                             const Rational& lambda_cap);

// Whether candidate conditioned on "every fact lies in F" is exactly base,
// with that event of positive probability. F defaults to the facts of base.
bool verify_completion(const ExplicitWorldPdb& base, const ExplicitWorldPdb& candidate);
bool verify_completion(const ExplicitWorldPdb& base, const ExplicitWorldPdb& candidate,
                       const std::vector<Fact>& fact_set);

// Whether the law splits as (part on F) ⊎ (part off F) with the two parts
// independent, i.e. whether it is a superposition of PDBs over F and over its
// complement.
bool factorizes_over(const ExplicitWorldPdb& law, const std::vector<Fact>& fact_set);

}  // namespace ipdb
