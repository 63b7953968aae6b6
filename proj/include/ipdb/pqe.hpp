#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "ipdb/bid.hpp"
#include "ipdb/combinators.hpp"
#include "ipdb/core.hpp"
#include "ipdb/query.hpp"
#include "ipdb/ti.hpp"

namespace ipdb {

// Only additive guarantees are offered. No relative-error approximation of
// Pr[D |= q] exists for countable TI-PDBs in general, so none is provided.
enum class ErrorKind { Exact, Additive, Hoeffding };

struct PqeResult {
  double value = 0;
  std::optional<Rational> exact;  // set for Exact and Additive results
  ErrorKind kind = ErrorKind::Exact;
  double eps = 0;         // additive half-width (0 for exact)
  double confidence = 1;  // Hoeffding confidence level
  std::uint64_t worlds_enumerated = 0;
  std::uint64_t samples_drawn = 0;

  // approx_pqe certificate: the first n facts were kept, r_n is the marginal
  // mass beyond them, and P(every fact among the first n) >= 1 - r_n.
  std::optional<std::uint64_t> truncation_n;
  std::optional<Rational> tail_mass;
  std::optional<Rational> conditioning_mass_lower;

  // mc_pqe: total-variation tolerance handed to the sampler; included in eps.
  double sampler_delta = 0;
};

// 2^24 unless the IPDB_WORLD_BUDGET environment variable overrides it.
std::uint64_t default_world_budget();

struct PqeOptions {
  std::uint64_t world_budget = default_world_budget();
  unsigned workers = 0;  // 0: hardware concurrency
};

// Exact Pr[D |= q] by possible-world enumeration. Throws WorldBudgetExceeded,
// or ModeMismatch for infinite models. The result does not depend on the
// worker count.
PqeResult exact_pqe(const TiPdb& pdb, const Query& q, const PqeOptions& opts = {});
PqeResult exact_pqe(const BidPdb& pdb, const Query& q, const PqeOptions& opts = {});
PqeResult exact_pqe(const ExplicitWorldPdb& pdb, const Query& q, const PqeOptions& opts = {});
PqeResult exact_pqe(const SuperposedPdb& pdb, const Query& q, const PqeOptions& opts = {});

using Sampler = std::function<BagInstance(Rng&, const Rational& delta)>;

// Fraction of sampled worlds satisfying q, with the Hoeffding half-width at
// the given confidence plus the sampler's total-variation slack. Samples are
// drawn in fixed-size chunks from substreams of `seed`, so the estimate
// depends only on the seed.
PqeResult mc_pqe(const Sampler& sampler, const Query& q, std::uint64_t samples,
                 double confidence, std::uint64_t seed, unsigned workers = 0);

Sampler sampler_for(const TiPdb& pdb);
Sampler sampler_for(const BidPdb& pdb);
Sampler sampler_for(const PoissonPdb& pdb);
Sampler sampler_for(const ExplicitWorldPdb& pdb);
Sampler sampler_for(const SuperposedPdb& pdb);

// Additive eps-approximation for TI-PDBs with 0 < eps < 1/2: cut the family
// at the first n with r_n <= eps and evaluate the finite restriction exactly.
// Throws WorldBudgetExceeded (fall back to mc_pqe) or NonconvergentFamily.
PqeResult approx_pqe(const TiPdb& pdb, const Query& q, const Rational& eps,
                     const PqeOptions& opts = {});

}  // namespace ipdb
