#include <gtest/gtest.h>

#include "ipdb/bid.hpp"
#include "support.hpp"

namespace ipdb {
namespace {

using test::Gen;
using test::Q;

Fact order(const char* id, const char* customer, const char* ship_to, std::int64_t price) {
  return Fact("Order", {UniverseElem(std::string(id)), UniverseElem(std::string(customer)),
                        UniverseElem(std::string(ship_to)), UniverseElem(price)});
}

const Fact joe = order("0000001", "Joe", "New York", 99);
const Fact bob = order("0000001", "Bob", "Los Angeles", 199);
const Fact emma = order("0000002", "Emma", "Austin", 70);
const Fact dave = order("0000003", "Dave", "Atlanta", 19);
const Fact sophia = order("0000003", "Sophia", "Bakersfield", 25);
const Fact isabella = order("0000003", "Isabella", "Boston", 100);

std::vector<Block> order_blocks() {
  return {Block{{{joe, Q("0.8")}, {bob, Q("0.2")}}},
          Block{{{emma, Q("1.0")}}},
          Block{{{dave, Q("0.2")}, {sophia, Q("0.6")}, {isabella, Q("0.1")}}}};
}

ErrorCode code_of(const std::function<void()>& action) {
  try {
    action();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(ValidateBid, Examples) {
  BidPdb pdb = validate_bid(order_blocks());
  EXPECT_EQ(pdb.blocks().size(), 3u);
  EXPECT_EQ(code_of([] { validate_bid({Block{{{test::R(1), Q("0.7")}, {test::R(2), Q("0.7")}}}}); }),
            ErrorCode::BlockOverflow);
  EXPECT_EQ(code_of([] {
              validate_bid({Block{{{test::R(1), Q(1, 2)}}}, Block{{{test::R(1), Q(1, 4)}}}});
            }),
            ErrorCode::OverlappingBlocks);
  EXPECT_EQ(code_of([] { validate_bid({Block{{{test::R(1), Q(-1, 2)}}}}); }),
            ErrorCode::InvalidProbability);
}

TEST(ValidateBid, InfiniteBlockTails) {
  BlockTail divergent{{{test::r_template(), Q(1, 2)}, {FactTemplate("S", {FactTemplate::index()}), Q(1, 4)}},
                      Q(1),
                      Q(1)};
  EXPECT_EQ(code_of([&] { validate_bid({}, divergent); }), ErrorCode::DivergentBlocks);

  BlockTail geo{{{test::r_template(), Q(1, 2)}, {FactTemplate("S", {FactTemplate::index()}), Q(1, 2)}},
                Q(1),
                Q(1, 2)};
  BidPdb pdb = validate_bid({}, geo);
  EXPECT_FALSE(pdb.is_finite());
  EXPECT_EQ(pdb.locate(test::R(3)), (std::pair<std::uint64_t, Rational>{3, Q(1, 16)}));
  EXPECT_EQ(total_mass(pdb.nonempty_family()).lower, 1);

  BlockTail overlapping{{{test::r_template(), Q(1, 2)}, {test::r_template(1), Q(1, 2)}}, Q(1), Q(1, 2)};
  EXPECT_EQ(code_of([&] { validate_bid({}, overlapping); }), ErrorCode::OverlappingBlocks);
}

TEST(WorldProbBid, OrderExample) {
  BidPdb pdb = validate_bid(order_blocks());
  EXPECT_EQ(world_prob_bid(pdb, BagInstance{joe, emma, sophia}), Q("0.48"));
  EXPECT_EQ(world_prob_bid(pdb, BagInstance{joe, bob, emma}), 0);
  EXPECT_EQ(world_prob_bid(pdb, BagInstance{}), 0);
  EXPECT_EQ(world_prob_bid(pdb, BagInstance{bob, emma}), Q("0.2") * Q("0.1"));
  EXPECT_EQ(empty_prob(pdb).lower, 0);
}

TEST(WorldProbBid, OrderExampleSumsToOneOverReachableWorlds) {
  BidPdb pdb = validate_bid(order_blocks());
  EXPECT_EQ(world_count(pdb), 24u);
  Rational total = 0;
  std::size_t positive = 0;
  for_each_world(pdb, [&](const BagInstance& d, const Rational& p) {
    EXPECT_EQ(world_prob_bid(pdb, d), p);
    EXPECT_TRUE(d.size() == 2 || d.size() == 3);
    total += p;
    positive += p > 0;
  });
  EXPECT_EQ(total, 1);
  EXPECT_EQ(positive, 8u);  // Bob/Joe x {none, Dave, Sophia, Isabella}

  // All 3 * 2 * 4 per-block outcomes, including the zero-slack ones.
  std::vector<std::vector<std::optional<Fact>>> outcomes = {
      {std::nullopt, joe, bob}, {std::nullopt, emma}, {std::nullopt, dave, sophia, isabella}};
  Rational sum = 0;
  int combos = 0;
  for (const auto& a : outcomes[0])
    for (const auto& b : outcomes[1])
      for (const auto& c : outcomes[2]) {
        BagInstance d;
        for (const auto* x : {&a, &b, &c})
          if (*x) d.add(**x);
        sum += world_prob_bid(pdb, d);
        ++combos;
      }
  EXPECT_EQ(combos, 24);
  EXPECT_EQ(sum, 1);
}

std::vector<Block> random_blocks(Gen& gen, std::int64_t& next_id) {
  std::vector<Block> blocks;
  int nb = static_cast<int>(gen.integer(0, 4));
  for (int b = 0; b < nb; ++b) {
    Block block;
    int nf = static_cast<int>(gen.integer(1, 3));
    Rational left = 1;
    for (int i = 0; i < nf; ++i) {
      Rational p = left * gen.probability(6);
      left -= p;
      block.facts.push_back({test::R(next_id++), p});
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

TEST(WorldProbBid, RandomBlocksLawProperties) {
  Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::int64_t id = 1;
    auto blocks = random_blocks(gen, id);
    BidPdb pdb = validate_bid(blocks);
    ExplicitWorldPdb law = to_explicit(pdb);
    Rational total = 0;
    for (const auto& [d, p] : law.worlds()) total += p;
    EXPECT_EQ(total, 1);

    // Cross-block products and within-block exclusion.
    for (std::size_t a = 0; a < pdb.blocks().size(); ++a)
      for (std::size_t b = 0; b < pdb.blocks().size(); ++b)
        for (const auto& [fa, pa] : pdb.blocks()[a].facts)
          for (const auto& [fb, pb] : pdb.blocks()[b].facts) {
            if (fa == fb) continue;
            Rational joint = law.prob_of(
                [&](const BagInstance& d) { return d.contains(fa) && d.contains(fb); });
            EXPECT_EQ(joint, a == b ? Rational(0) : Rational(pa * pb));
            EXPECT_EQ(world_prob_bid(pdb, BagInstance{fa, fb}) == 0 || a != b, true);
          }

    // Superposition of the per-block components equals the direct law.
    ExplicitWorldPdb sp;
    for (const auto& c : bid_as_superposition(pdb)) sp = explicit_superpose(sp, c);
    EXPECT_EQ(sp, law);
  }
}

TEST(BidAsSuperposition, Examples) {
  BidPdb pdb = validate_bid(order_blocks());
  auto parts = bid_as_superposition(pdb);
  ASSERT_EQ(parts.size(), 3u);
  ExplicitWorldPdb sp;
  for (const auto& c : parts) sp = explicit_superpose(sp, c);
  for_each_world(pdb, [&](const BagInstance& d, const Rational& p) { EXPECT_EQ(sp.prob(d), p); });

  BidPdb single = validate_bid({Block{{{test::R(1), Q(1, 3)}}}});
  auto one = bid_as_superposition(single);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.front(), to_explicit(single));

  auto none = bid_as_superposition(validate_bid({}));
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none.front(), ExplicitWorldPdb());
}

TEST(SampleBid, Examples) {
  BidPdb certain = validate_bid({Block{{{test::R(1), Q(1)}}}});
  BidPdb half = validate_bid({Block{{{test::R(1), Q(1, 2)}}}});
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_bid(certain, rng, Q(1, 1000)), BagInstance{test::R(1)});
    EXPECT_LE(sample_bid(half, rng, Q(1, 1000)).multiplicity(test::R(1)), 1u);
  }
}

TEST(SampleBid, OrderExampleMarginals) {
  BidPdb pdb = validate_bid(order_blocks());
  const std::uint64_t n = 100000;
  Rng rng(77);
  double sophia_hits = 0, joe_hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    BagInstance d = sample_bid(pdb, rng, Q(1, 1000000));
    EXPECT_TRUE(d.contains(emma));
    EXPECT_NE(d.contains(joe), d.contains(bob));
    sophia_hits += d.contains(sophia);
    joe_hits += d.contains(joe);
  }
  EXPECT_NEAR(sophia_hits / n, 0.6, 0.01);
  EXPECT_NEAR(joe_hits / n, 0.8, test::hoeffding(n, 0.99));
}

TEST(SampleBid, InfiniteTailMarginals) {
  BlockTail geo{{{test::r_template(), Q(1, 2)}, {FactTemplate("S", {FactTemplate::index()}), Q(1, 2)}},
                Q(1),
                Q(1, 2)};
  BidPdb pdb = validate_bid({}, geo);
  const std::uint64_t n = 50000;
  Rng rng(8);
  double r1 = 0, s1 = 0, both = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    BagInstance d = sample_bid(pdb, rng, Q(1, 1000000));
    r1 += d.contains(test::R(1));
    s1 += d.contains(test::S(1));
    both += d.contains(test::R(1)) && d.contains(test::S(1));
  }
  double tol = test::hoeffding(n, 0.99);
  EXPECT_NEAR(r1 / n, 0.25, tol);
  EXPECT_NEAR(s1 / n, 0.25, tol);
  EXPECT_EQ(both, 0);
}

TEST(WorldProbBid, InfiniteModelNeedsFiniteBlocks) {
  BlockTail geo{{{test::r_template(), Q(1)}}, Q(1), Q(1, 2)};
  BidPdb pdb = validate_bid({}, geo);
  EXPECT_EQ(code_of([&] { world_prob_bid(pdb, BagInstance{}); }), ErrorCode::ModeMismatch);
}

}  // namespace
}  // namespace ipdb
