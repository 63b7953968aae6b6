#include "ipdb/bid.hpp"

#include <limits>
#include <set>

namespace ipdb {

Rational Block::mass() const {
  Rational total = 0;
  for (const auto& e : facts) total += e.second;
  return total;
}

Rational BlockTail::weight_sum() const {
  Rational total = 0;
  for (const auto& m : members) total += m.weight;
  return total;
}

Rational BlockTail::nonempty(std::uint64_t j) const {
  return GeometricTail{members.front().generator, a * weight_sum(), q}.weight(j);
}

Block BlockTail::block(std::uint64_t j) const {
  Block b;
  Rational scale = GeometricTail{members.front().generator, a, q}.weight(j);
  for (const auto& m : members)
    if (m.weight != 0) b.facts.push_back({m.generator.at(j), scale * m.weight});
  return b;
}

std::optional<Rational> BlockTail::nonempty_after(std::uint64_t m) const {
  return GeometricTail{members.front().generator, a * weight_sum(), q}.mass_after(m);
}

std::optional<std::pair<std::uint64_t, Rational>> BidPdb::locate(const Fact& f) const {
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (const auto& [g, p] : blocks_[b].facts)
      if (g == f) return std::pair{b + 1, p};
  if (tail_) {
    for (const auto& m : tail_->members) {
      if (auto j = m.generator.match(f)) {
        Rational p = GeometricTail{m.generator, tail_->a, tail_->q}.weight(*j) * m.weight;
        if (p == 0) return std::nullopt;
        return std::pair{blocks_.size() + *j, p};
      }
    }
  }
  return std::nullopt;
}

Block BidPdb::block_at(std::uint64_t b) const {
  if (b == 0) throw Error(ErrorCode::InvalidArgument, "block indices start at 1");
  if (b <= blocks_.size()) return blocks_[b - 1];
  if (!tail_) throw Error(ErrorCode::InvalidArgument, "block index past end");
  return tail_->block(b - blocks_.size());
}

BidPdb validate_bid(std::vector<Block> blocks, std::optional<BlockTail> tail) {
  std::set<Fact> seen;
  std::vector<FactFamily::Entry> nonempty;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& facts = blocks[b].facts;
    for (const auto& [f, p] : facts) {
      if (p < 0 || p > 1)
        throw Error(ErrorCode::InvalidProbability,
                    f.to_string() + " has probability " + to_string(p));
      if (!seen.insert(f).second)
        throw Error(ErrorCode::OverlappingBlocks,
                    f.to_string() + " occurs in more than one block");
    }
    std::erase_if(facts, [](const auto& e) { return e.second == 0; });
    Rational mass = blocks[b].mass();
    if (mass > 1)
      throw Error(ErrorCode::BlockOverflow,
                  "block " + std::to_string(b + 1) + " has total probability " +
                      to_string(mass));
    // Placeholder facts only carry the block masses through the tail machinery.
    nonempty.push_back({Fact("#block", {static_cast<std::int64_t>(b + 1)}), mass});
  }

  std::optional<GeometricTail> mass_tail;
  if (tail) {
    if (tail->members.empty())
      throw Error(ErrorCode::InvalidArgument, "block tail without members");
    if (tail->a < 0 || tail->q <= 0)
      throw Error(ErrorCode::InvalidArgument, "block tail needs a >= 0 and q > 0");
    for (std::size_t k = 0; k < tail->members.size(); ++k) {
      const auto& m = tail->members[k];
      if (m.weight < 0)
        throw Error(ErrorCode::InvalidProbability, "negative member weight");
      for (const auto& f : seen)
        if (m.generator.match(f))
          throw Error(ErrorCode::OverlappingBlocks,
                      f.to_string() + " is also generated by the block tail");
      for (std::size_t l = 0; l < k; ++l)
        if (m.generator.may_overlap(tail->members[l].generator))
          throw Error(ErrorCode::OverlappingBlocks,
                      "block tail members generate a common fact");
    }
    Rational first = tail->a * tail->weight_sum();
    mass_tail = GeometricTail{FactTemplate("#block", {FactTemplate::index()},
                                           static_cast<std::int64_t>(blocks.size())),
                              first, tail->q};
    if (!mass_tail->convergent())
      throw Error(ErrorCode::DivergentBlocks,
                  "block nonempty probabilities sum to infinity");
    // Largest tail block is j = 1 since q < 1 here.
    if (first * tail->q > 1)
      throw Error(ErrorCode::BlockOverflow, "a tail block has total probability above 1");
  }
  FactFamily fam(std::move(nonempty), std::move(mass_tail));
  return BidPdb(std::move(blocks), std::move(tail), std::move(fam));
}

Rational world_prob_bid(const BidPdb& pdb, const BagInstance& d) {
  if (!pdb.is_finite())
    throw Error(ErrorCode::ModeMismatch, "exact BID world probability needs finitely many blocks");
  if (!d.is_set()) return 0;
  std::vector<const Fact*> chosen(pdb.blocks().size(), nullptr);
  Rational v = 1;
  for (const auto& [f, m] : d.entries()) {
    auto where = pdb.locate(f);
    if (!where) return 0;
    auto& slot = chosen[where->first - 1];
    if (slot) return 0;
    slot = &f;
    v *= where->second;
  }
  for (std::size_t b = 0; b < chosen.size(); ++b)
    if (!chosen[b]) v *= pdb.blocks()[b].slack();
  return v;
}

MassBound empty_prob(const BidPdb& pdb) {
  Rational v = 1;
  for (const auto& b : pdb.blocks()) v *= b.slack();
  if (pdb.is_finite()) return MassBound::exact(v);
  // Tail blocks: prod (1 - s_j) bracketed by Weierstrass over a cut with r_n < 2^-40.
  const FactFamily& fam = pdb.nonempty_family();
  std::uint64_t n = std::max<std::uint64_t>(
      truncation_index(fam, Rational(1, mpz_class(1) << 40)), fam.prefix().size());
  for (std::uint64_t i = fam.prefix().size() + 1; i <= n; ++i) v *= 1 - fam.weight_at(i);
  Rational r = tail_mass(fam, n).lower;
  return {r >= 1 ? Rational(0) : Rational(v * (1 - r)), v};
}

BagInstance sample_bid(const BidPdb& pdb, Rng& rng, const Rational& delta) {
  std::uint64_t n = pdb.blocks().size();
  if (!pdb.is_finite())
    n = std::max<std::uint64_t>(n, truncation_index(pdb.nonempty_family(), delta));
  std::vector<BagInstance::Entry> entries;
  for (std::uint64_t b = 1; b <= n; ++b) {
    Block block = pdb.block_at(b);
    double u = rng.uniform();
    double acc = 0;
    for (const auto& [f, p] : block.facts) {
      acc += p.get_d();
      if (u < acc) {
        entries.push_back({f, 1});
        break;
      }
    }
  }
  return BagInstance::from_entries(std::move(entries));
}

std::vector<ExplicitWorldPdb> bid_as_superposition(const BidPdb& pdb) {
  if (!pdb.is_finite())
    throw Error(ErrorCode::ModeMismatch, "superposition split needs finitely many blocks");
  std::vector<ExplicitWorldPdb> out;
  for (const auto& block : pdb.blocks()) {
    std::vector<ExplicitWorldPdb::World> worlds;
    worlds.push_back({BagInstance{}, block.slack()});
    for (const auto& [f, p] : block.facts) worlds.push_back({BagInstance{f}, p});
    out.push_back(ExplicitWorldPdb(std::move(worlds)));
  }
  if (out.empty()) out.push_back(ExplicitWorldPdb{});
  return out;
}

std::uint64_t world_count(const BidPdb& pdb) {
  if (!pdb.is_finite()) return std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (const auto& b : pdb.blocks()) {
    std::uint64_t options = b.facts.size() + 1;
    if (total > std::numeric_limits<std::uint64_t>::max() / options)
      return std::numeric_limits<std::uint64_t>::max();
    total *= options;
  }
  return total;
}

void for_each_world(const BidPdb& pdb,
                    const std::function<void(const BagInstance&, const Rational&)>& visit) {
  if (!pdb.is_finite())
    throw Error(ErrorCode::ModeMismatch, "world enumeration needs finitely many blocks");
  const auto& blocks = pdb.blocks();
  std::vector<BagInstance::Entry> chosen;
  std::function<void(std::size_t, const Rational&)> walk = [&](std::size_t b,
                                                               const Rational& p) {
    if (b == blocks.size()) {
      visit(BagInstance::from_entries(chosen), p);
      return;
    }
    Rational slack = blocks[b].slack();
    if (slack != 0) walk(b + 1, p * slack);
    for (const auto& [f, pf] : blocks[b].facts) {
      chosen.push_back({f, 1});
      walk(b + 1, p * pf);
      chosen.pop_back();
    }
  };
  walk(0, Rational(1));
}

ExplicitWorldPdb to_explicit(const BidPdb& pdb) {
  std::vector<ExplicitWorldPdb::World> worlds;
  for_each_world(pdb, [&](const BagInstance& d, const Rational& p) {
    worlds.push_back({d, p});
  });
  return ExplicitWorldPdb::from_weighted(std::move(worlds));
}

}  // namespace ipdb
