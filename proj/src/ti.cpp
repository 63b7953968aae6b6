#include "ipdb/ti.hpp"

#include <algorithm>

namespace ipdb {

TiPdb validate_ti(FactFamily fam) {
  MassBound xi = ipdb::total_mass(fam);
  if (!xi.finite())
    throw Error(ErrorCode::DivergentMarginals,
                "marginals sum to infinity; no TI-PDB has them");
  auto max_p = fam.max_weight();
  if (!max_p || *max_p > 1)
    throw Error(ErrorCode::InvalidProbability, "a marginal exceeds 1");
  return TiPdb(std::move(fam), xi.lower);
}

namespace {

// Facts of a set instance as sorted family indices.
std::vector<std::uint64_t> indices_of(const FactFamily& fam, const BagInstance& d) {
  if (!d.is_set())
    throw Error(ErrorCode::InvalidArgument,
                "TI world probabilities are defined on set instances");
  std::vector<std::uint64_t> out;
  for (const auto& [f, m] : d.entries()) {
    auto i = fam.index_of(f);
    if (!i)
      throw Error(ErrorCode::FactOutsideFamily,
                  f.to_string() + " is not a fact of the family");
    out.push_back(*i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Horizon used when a caller gives no context: far enough that r_n < 2^-40.
std::uint64_t default_horizon(const TiPdb& pdb) {
  return truncation_index(pdb.family(), Rational(1, mpz_class(1) << 40));
}

}  // namespace

MassBound world_prob(const TiPdb& pdb, const BagInstance& d, std::uint64_t n_ctx) {
  const FactFamily& fam = pdb.family();
  auto inside = indices_of(fam, d);
  std::uint64_t n = fam.is_finite() ? fam.finite_size()
                                    : std::max(n_ctx, fam.prefix().size());
  if (!inside.empty()) n = std::max(n, inside.back());
  if (!fam.is_finite() && n_ctx == 0) n = std::max(n, default_horizon(pdb));

  Rational v = 1;
  auto next = inside.begin();
  for (std::uint64_t i = 1; i <= n && v != 0; ++i) {
    Rational p = fam.weight_at(i);
    if (next != inside.end() && *next == i) {
      v *= p;
      ++next;
    } else {
      v *= 1 - p;
    }
  }
  if (fam.is_finite()) return MassBound::exact(v);
  Rational r = ipdb::tail_mass(fam, n).lower;
  Rational lower = r >= 1 ? Rational(0) : Rational(v * (1 - r));
  return {lower, v};
}

MassBound empty_prob(const TiPdb& pdb) { return world_prob(pdb, BagInstance{}); }

BagInstance sample_ti(const TiPdb& pdb, Rng& rng, const Rational& delta) {
  const FactFamily& fam = pdb.family();
  std::uint64_t n = fam.is_finite() ? fam.finite_size() : truncation_index(fam, delta);
  std::vector<BagInstance::Entry> entries;
  for (std::uint64_t i = 1; i <= n; ++i)
    if (rng.bernoulli(fam.weight_at(i).get_d())) entries.push_back({fam.fact_at(i), 1});
  return BagInstance::from_entries(std::move(entries));
}

TiPdb restrict_ti(const TiPdb& pdb, const IndexSelection& keep) {
  return validate_ti(select(pdb.family(), keep));
}

TiPdb restrict_ti(const TiPdb& pdb,
                  const std::function<bool(const Fact&, std::uint64_t)>& keep) {
  const FactFamily& fam = pdb.family();
  if (!fam.is_finite())
    throw Error(ErrorCode::UnsupportedSubfamilyShape,
                "predicate restriction of an infinite family; use an IndexSelection");
  IndexSelection sel;
  for (std::uint64_t i = 1; i <= fam.finite_size(); ++i)
    if (keep(fam.fact_at(i), i)) sel.indices.push_back(i);
  return restrict_ti(pdb, sel);
}

MassBound expected_size_ti(const TiPdb& pdb) { return MassBound::exact(pdb.total_mass()); }

void for_each_world(const TiPdb& pdb,
                    const std::function<void(const BagInstance&, const Rational&)>& visit) {
  const FactFamily& fam = pdb.family();
  if (!fam.is_finite())
    throw Error(ErrorCode::ModeMismatch,
                "world enumeration needs a finite family");
  const auto& facts = fam.prefix();
  std::vector<BagInstance::Entry> chosen;
  // Facts are visited in family order; from_entries restores canonical order.
  std::function<void(std::size_t, const Rational&)> walk =
      [&](std::size_t i, const Rational& p) {
        if (i == facts.size()) {
          visit(BagInstance::from_entries(chosen), p);
          return;
        }
        const Rational& pf = facts[i].second;
        if (pf != 1) walk(i + 1, p * (1 - pf));
        if (pf != 0) {
          chosen.push_back({facts[i].first, 1});
          walk(i + 1, p * pf);
          chosen.pop_back();
        }
      };
  walk(0, Rational(1));
}

ExplicitWorldPdb to_explicit(const TiPdb& pdb) {
  std::vector<ExplicitWorldPdb::World> worlds;
  for_each_world(pdb, [&](const BagInstance& d, const Rational& p) {
    worlds.push_back({d, p});
  });
  return ExplicitWorldPdb::from_weighted(std::move(worlds));
}

}  // namespace ipdb
