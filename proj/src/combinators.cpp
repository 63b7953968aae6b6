#include "ipdb/combinators.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace ipdb {

namespace {

MassBound complement(const MassBound& b) {
  Rational hi = 1 - b.lower;
  Rational lo = b.upper ? Rational(1 - *b.upper) : Rational(0);
  if (lo < 0) lo = 0;
  if (hi > 1) hi = 1;
  return {lo, hi};
}

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

BagInstance restrict_to(const BagInstance& d, const std::set<Fact>& facts) {
  std::vector<BagInstance::Entry> kept;
  for (const auto& e : d.entries())
    if (facts.count(e.first)) kept.push_back(e);
  return BagInstance::from_entries(std::move(kept));
}

BagInstance restrict_away(const BagInstance& d, const std::set<Fact>& facts) {
  std::vector<BagInstance::Entry> kept;
  for (const auto& e : d.entries())
    if (!facts.count(e.first)) kept.push_back(e);
  return BagInstance::from_entries(std::move(kept));
}

}  // namespace

Component make_component(ComponentModel model) {
  MassBound nonempty = std::visit(
      [](const auto& m) -> MassBound {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitWorldPdb>)
          return MassBound::exact(1 - m.prob(BagInstance{}));
        else
          return complement(empty_prob(m));
      },
      model);
  return Component{std::move(model), std::move(nonempty)};
}

bool SuperposedPdb::is_finite() const {
  if (tail_) return false;
  return std::all_of(components_.begin(), components_.end(), [](const Component& c) {
    return std::visit(
        [](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, ExplicitWorldPdb>)
            return true;
          else if constexpr (std::is_same_v<T, TiPdb>)
            return m.family().is_finite();
          else
            return m.is_finite();
        },
        c.model);
  });
}

MassBound SuperposedPdb::nonempty_mass() const {
  MassBound total = MassBound::exact(0);
  for (const auto& c : components_) {
    total.lower += c.nonempty_prob.lower;
    *total.upper += *c.nonempty_prob.upper;
  }
  if (tail_) {
    auto rest = tail_->mass_after(0);
    if (!rest) return MassBound::unbounded(total.lower);
    total.lower += *rest;
    *total.upper += *rest;
  }
  return total;
}

SuperposedPdb superpose(std::vector<Component> components, std::optional<GeometricTail> tail) {
  if (tail) {
    if (!tail->convergent())
      throw Error(ErrorCode::DivergentComponents,
                  "component nonempty probabilities sum to infinity");
    if (tail->a * tail->q > 1)
      throw Error(ErrorCode::InvalidProbability, "a tail component marginal exceeds 1");
  }
  return SuperposedPdb(std::move(components), std::move(tail));
}

SuperposedPdb superpose(const SuperposedPdb& a, const SuperposedPdb& b) {
  if (a.tail() && b.tail())
    throw Error(ErrorCode::InvalidArgument,
                "superposing two countable tails is not supported; materialize one");
  std::vector<Component> all = a.components();
  all.insert(all.end(), b.components().begin(), b.components().end());
  return superpose(std::move(all), a.tail() ? a.tail() : b.tail());
}

BagInstance sample_explicit(const ExplicitWorldPdb& pdb, Rng& rng) {
  double u = rng.uniform();
  double acc = 0;
  for (const auto& [d, p] : pdb.worlds()) {
    acc += p.get_d();
    if (u < acc) return d;
  }
  return pdb.worlds().back().first;  // rounding slack
}

BagInstance sample_component(const Component& c, Rng& rng, const Rational& delta) {
  return std::visit(
      [&](const auto& m) -> BagInstance {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitWorldPdb>) return sample_explicit(m, rng);
        else if constexpr (std::is_same_v<T, TiPdb>) return sample_ti(m, rng, delta);
        else if constexpr (std::is_same_v<T, BidPdb>) return sample_bid(m, rng, delta);
        else return sample_poisson(m, rng, delta);
      },
      c.model);
}

BagInstance sample_superposed(const SuperposedPdb& sp, Rng& rng, const Rational& delta) {
  Rng root(rng.next_key());
  const auto& comps = sp.components();
  Rational share = comps.empty() ? delta : Rational(delta / (2 * comps.size()));
  BagInstance out;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    Rng sub = root.substream(k);
    out = bag_union(out, sample_component(comps[k], sub, share));
  }
  if (const auto& tail = sp.tail()) {
    Rng sub = root.substream(comps.size());
    std::uint64_t n = 0;
    Rational cut = delta / 2;
    while (*tail->mass_after(n) > cut) ++n;
    std::vector<BagInstance::Entry> hits;
    for (std::uint64_t j = 1; j <= n; ++j)
      if (sub.bernoulli(tail->weight(j).get_d())) hits.push_back({tail->generator.at(j), 1});
    out = bag_union(out, BagInstance::from_entries(std::move(hits)));
  }
  return out;
}

ExplicitWorldPdb to_explicit(const Component& c) {
  return std::visit(
      [](const auto& m) -> ExplicitWorldPdb {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitWorldPdb>) return m;
        else if constexpr (std::is_same_v<T, PoissonPdb>)
          throw Error(ErrorCode::ModeMismatch, "Poisson laws have infinitely many worlds");
        else return to_explicit(m);
      },
      c.model);
}

ExplicitWorldPdb to_explicit(const SuperposedPdb& sp) {
  if (sp.tail())
    throw Error(ErrorCode::ModeMismatch, "superposition has infinitely many components");
  ExplicitWorldPdb law;
  for (const auto& c : sp.components()) law = explicit_superpose(law, to_explicit(c));
  return law;
}

std::uint64_t world_count(const Component& c) {
  return std::visit(
      [](const auto& m) -> std::uint64_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitWorldPdb>) return m.worlds().size();
        else if constexpr (std::is_same_v<T, TiPdb>) {
          if (!m.family().is_finite() || m.family().finite_size() >= 64) return kSaturated;
          return std::uint64_t{1} << m.family().finite_size();
        } else if constexpr (std::is_same_v<T, BidPdb>) return world_count(m);
        else return kSaturated;
      },
      c.model);
}

//===----------------------------------------------------------------------===//

std::vector<TiPdb> decompose_ti(const TiPdb& pdb, const std::vector<IndexSelection>& parts) {
  const FactFamily& fam = pdb.family();
  std::uint64_t horizon = fam.prefix().size();
  std::size_t open_parts = 0;
  for (const auto& part : parts) {
    for (auto i : part.indices) horizon = std::max(horizon, i);
    if (part.all_from) {
      ++open_parts;
      horizon = std::max(horizon, *part.all_from);
    }
  }
  if (!fam.is_finite() && open_parts != 1)
    throw Error(ErrorCode::InvalidArgument,
                "exactly one part must take the infinite remainder of the family");
  for (std::uint64_t i = 1; i <= horizon; ++i) {
    auto owners = std::count_if(parts.begin(), parts.end(),
                                [i](const IndexSelection& s) { return s.contains(i); });
    bool exists = !fam.is_finite() || i <= fam.finite_size();
    if (exists && owners != 1)
      throw Error(ErrorCode::InvalidArgument,
                  "index " + std::to_string(i) + " is covered by " + std::to_string(owners) +
                      " parts; parts must partition the family");
  }
  std::vector<TiPdb> out;
  for (const auto& part : parts) {
    IndexSelection clipped = part;
    if (fam.is_finite()) {
      std::erase_if(clipped.indices, [&](std::uint64_t i) { return i > fam.finite_size(); });
      if (clipped.all_from && *clipped.all_from > fam.finite_size()) clipped.all_from.reset();
    }
    out.push_back(restrict_ti(pdb, clipped));
  }
  return out;
}

std::vector<TiPdb> decompose_ti(
    const TiPdb& pdb, std::size_t part_count,
    const std::function<std::size_t(const Fact&, std::uint64_t)>& part_of) {
  const FactFamily& fam = pdb.family();
  if (!fam.is_finite())
    throw Error(ErrorCode::UnsupportedSubfamilyShape,
                "per-fact partition of an infinite family; use IndexSelection parts");
  std::vector<IndexSelection> parts(part_count);
  for (std::uint64_t i = 1; i <= fam.finite_size(); ++i) {
    std::size_t p = part_of(fam.fact_at(i), i);
    if (p >= part_count) throw Error(ErrorCode::InvalidArgument, "part number out of range");
    parts[p].indices.push_back(i);
  }
  return decompose_ti(pdb, parts);
}

//===----------------------------------------------------------------------===//

IndependenceReport check_component_independence(
    const SuperposedPdb& sp,
    const std::vector<std::function<bool(const BagInstance&)>>& events) {
  const std::size_t m = sp.components().size();
  if (events.size() != m)
    throw Error(ErrorCode::InvalidArgument, "need exactly one event per component");
  if (m > 16) throw Error(ErrorCode::InvalidArgument, "too many components to check");

  std::vector<ExplicitWorldPdb> laws;
  for (const auto& c : sp.components()) laws.push_back(to_explicit(c));

  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [w, p] : laws[i].worlds()) {
      if (!events[i](w)) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i && laws[j].prob(w) > 0)
          throw Error(ErrorCode::PreconditionViolated,
                      "event " + std::to_string(i) + " contains " + w.to_string() +
                          ", a world of component " + std::to_string(j));
    }

  IndependenceReport report;
  for (std::size_t i = 0; i < m; ++i) report.component_probs.push_back(laws[i].prob_of(events[i]));

  std::vector<std::set<Fact>> fact_sets;
  bool disjoint = true;
  std::set<Fact> all;
  for (const auto& law : laws) {
    auto facts = law.facts();
    fact_sets.emplace_back(facts.begin(), facts.end());
    for (const auto& f : facts) disjoint = all.insert(f).second && disjoint;
  }

  // mass[mask] = probability that exactly the events in mask hold.
  std::vector<Rational> mass(std::size_t{1} << m, Rational(0));
  if (disjoint) {
    ExplicitWorldPdb joint = to_explicit(sp);
    for (const auto& [d, p] : joint.worlds()) {
      std::size_t mask = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (events[i](restrict_to(d, fact_sets[i]))) mask |= std::size_t{1} << i;
      mass[mask] += p;
    }
  } else {
    std::vector<std::size_t> pick(m, 0);
    while (true) {
      Rational p = 1;
      std::size_t mask = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto& [w, pw] = laws[i].worlds()[pick[i]];
        p *= pw;
        if (events[i](w)) mask |= std::size_t{1} << i;
      }
      mass[mask] += p;
      std::size_t i = 0;
      while (i < m && ++pick[i] == laws[i].worlds().size()) pick[i++] = 0;
      if (i == m) break;
    }
  }

  auto prob_all = [&](std::size_t subset) {
    Rational total = 0;
    for (std::size_t mask = 0; mask < mass.size(); ++mask)
      if ((mask & subset) == subset) total += mass[mask];
    return total;
  };
  for (std::size_t i = 0; i < m; ++i) report.superposed_probs.push_back(prob_all(std::size_t{1} << i));
  report.marginals_preserved = report.superposed_probs == report.component_probs;
  report.product_holds = true;
  for (std::size_t subset = 1; subset < mass.size(); ++subset) {
    Rational product = 1;
    for (std::size_t i = 0; i < m; ++i)
      if (subset >> i & 1) product *= report.superposed_probs[i];
    if (prob_all(subset) != product) report.product_holds = false;
  }
  return report;
}

//===----------------------------------------------------------------------===//

SuperposedPdb ti_completion(const TiPdb& base, const FactFamily& extension) {
  if (base.family().overlaps(extension))
    throw Error(ErrorCode::OverlappingFactSets,
                "extension shares facts with the base PDB");
  TiPdb ext = validate_ti(extension);
  if (*ext.family().max_weight() == 1)
    throw Error(ErrorCode::NotACompletion,
                "an extension fact has marginal 1, so the extension is never empty");
  std::vector<Component> parts;
  parts.push_back(make_component(base));
  parts.push_back(make_component(std::move(ext)));
  return superpose(std::move(parts));
}

bool lambda_completion_check(const TiPdb& base, const FactFamily& extension,
                             const Rational& lambda_cap) {
  auto max_p = extension.max_weight();
  if (!max_p || *max_p > lambda_cap) return false;
  try {
    ti_completion(base, extension);
  } catch (const Error&) {
    return false;
  }
  return true;
}

bool verify_completion(const ExplicitWorldPdb& base, const ExplicitWorldPdb& candidate) {
  return verify_completion(base, candidate, base.facts());
}

bool verify_completion(const ExplicitWorldPdb& base, const ExplicitWorldPdb& candidate,
                       const std::vector<Fact>& fact_set) {
  std::set<Fact> facts(fact_set.begin(), fact_set.end());
  auto inside = [&](const BagInstance& d) {
    return std::all_of(d.entries().begin(), d.entries().end(),
                       [&](const BagInstance::Entry& e) { return facts.count(e.first) > 0; });
  };
  for (const auto& [d, p] : base.worlds())
    if (!inside(d)) return false;
  if (candidate.prob_of(inside) == 0) return false;
  return candidate.condition(inside) == base;
}

bool factorizes_over(const ExplicitWorldPdb& law, const std::vector<Fact>& fact_set) {
  std::set<Fact> facts(fact_set.begin(), fact_set.end());
  std::map<BagInstance, Rational> on, off;
  for (const auto& [d, p] : law.worlds()) {
    on[restrict_to(d, facts)] += p;
    off[restrict_away(d, facts)] += p;
  }
  for (const auto& [a, pa] : on)
    for (const auto& [b, pb] : off)
      if (law.prob(bag_union(a, b)) != pa * pb) return false;
  return true;
}

}  // namespace ipdb
