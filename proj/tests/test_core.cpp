#include <gtest/gtest.h>

#include "ipdb/core.hpp"
#include "support.hpp"

namespace ipdb {
namespace {

using test::Gen;
using test::Q;

const Fact f = test::R(1);
const Fact g = test::R(2);

BagInstance bag(std::initializer_list<std::pair<Fact, std::uint64_t>> entries) {
  BagInstance d;
  for (const auto& [fact, m] : entries) d.add(fact, m);
  return d;
}

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("3/4"), Q(3, 4));
  EXPECT_EQ(parse_rational("6/8"), Q(3, 4));
  EXPECT_EQ(parse_rational("2"), Q(2));
  EXPECT_EQ(parse_rational("0.8"), Q(4, 5));
  EXPECT_EQ(parse_rational("-1/3"), Q(-1, 3));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("abc"), Error);
  EXPECT_THROW(parse_rational(""), Error);
  EXPECT_EQ(to_string(Q(6, 8)), "3/4");
}

TEST(Schema, RejectsDuplicatesAndArityConflicts) {
  Schema s;
  s.add({"R", 1});
  EXPECT_THROW(s.add({"R", 2}), Error);
  s.declare("R", 1);
  try {
    s.declare("R", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ArityMismatch);
  }
  EXPECT_EQ(s.arity_of("R"), 1u);
  EXPECT_FALSE(s.arity_of("S"));
  check_against(s, f);
  EXPECT_THROW(check_against(s, Fact("R", {UniverseElem(1), UniverseElem(2)})), Error);
}

TEST(UniverseElem, CrossTagComparisonIsAnError) {
  UniverseElem one(std::int64_t{1}), text(std::string("1"));
  EXPECT_NE(one, text);
  try {
    (void)compare_values(one, text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TagMismatch);
  }
  EXPECT_TRUE(compare_values(UniverseElem(std::int64_t{1}), UniverseElem(std::int64_t{2})) < 0);
  EXPECT_TRUE(canonical_less(one, text));
  EXPECT_EQ(text.to_string(), "\"1\"");
  EXPECT_EQ(UniverseElem(Q(1, 2)).to_string(), "1/2");
}

TEST(BagUnion, Examples) {
  EXPECT_EQ(bag_union(bag({{f, 1}}), BagInstance{}), bag({{f, 1}}));
  EXPECT_EQ(bag_union(bag({{f, 1}}), bag({{f, 1}})), bag({{f, 2}}));
  EXPECT_EQ(bag_union(bag({{f, 2}}), bag({{g, 1}})), bag({{f, 2}, {g, 1}}));
}

TEST(BagInstance, InvariantsHold) {
  BagInstance d;
  d.add(f, 0);
  EXPECT_TRUE(d.empty());
  d.add(f, 2);
  d.add(g);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_FALSE(d.is_set());
  EXPECT_TRUE(dedup(d).is_set());
  EXPECT_EQ(dedup(d), (BagInstance{f, g}));
  EXPECT_EQ(BagInstance::from_entries({{g, 1}, {f, 1}, {f, 0}, {g, 2}}), bag({{f, 1}, {g, 3}}));
}

BagInstance random_bag(Gen& gen) {
  BagInstance d;
  int n = static_cast<int>(gen.integer(0, 4));
  for (int i = 0; i < n; ++i) d.add(test::R(gen.integer(1, 3)), gen.integer(1, 3));
  return d;
}

TEST(BagUnion, IsACommutativeMonoid) {
  Gen gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    BagInstance a = random_bag(gen), b = random_bag(gen), c = random_bag(gen);
    EXPECT_EQ(bag_union(a, b), bag_union(b, a));
    EXPECT_EQ(bag_union(bag_union(a, b), c), bag_union(a, bag_union(b, c)));
    EXPECT_EQ(bag_union(a, BagInstance{}), a);
    BagInstance ab = bag_union(a, b);
    for (const auto& [fact, m] : ab.entries())
      EXPECT_EQ(m, a.multiplicity(fact) + b.multiplicity(fact));
  }
}

TEST(ExplicitWorldPdb, ValidatesItsLaw) {
  EXPECT_THROW(ExplicitWorldPdb({{BagInstance{}, Q(1, 2)}}), Error);
  EXPECT_THROW(ExplicitWorldPdb({{BagInstance{}, Q(1, 2)}, {BagInstance{}, Q(1, 2)}}), Error);
  EXPECT_THROW(ExplicitWorldPdb({{BagInstance{}, Q(3, 2)}, {BagInstance{f}, Q(-1, 2)}}), Error);
  ExplicitWorldPdb merged =
      ExplicitWorldPdb::from_weighted({{BagInstance{}, Q(1, 2)}, {BagInstance{}, Q(1, 2)}});
  EXPECT_EQ(merged, ExplicitWorldPdb());
  ExplicitWorldPdb a({{BagInstance{f}, Q(1, 2)}, {BagInstance{}, Q(1, 2)}});
  ExplicitWorldPdb b({{BagInstance{}, Q(1, 2)}, {BagInstance{f}, Q(1, 2)}});
  EXPECT_EQ(a, b);
}

TEST(Marginal, Examples) {
  ExplicitWorldPdb half({{BagInstance{}, Q(1, 2)}, {BagInstance{f}, Q(1, 2)}});
  EXPECT_EQ(marginal(half, f), Q(1, 2));
  EXPECT_EQ(marginal(ExplicitWorldPdb(), f), 0);
  ExplicitWorldPdb p2({{bag({{f, 1}}), Q(3, 4)}, {bag({{f, 2}}), Q(1, 4)}});
  EXPECT_EQ(marginal(p2, f), 1);
}

TEST(ExpectedSize, Examples) {
  ExplicitWorldPdb half({{BagInstance{}, Q(1, 2)}, {BagInstance{f}, Q(1, 2)}});
  EXPECT_EQ(expected_size(half), Q(1, 2));
  EXPECT_EQ(expected_size(ExplicitWorldPdb({{bag({{f, 2}}), Q(1)}})), 2);
}

// Worlds D_n = {R(1..2^n)} with P(D_n) proportional to 1/n^2: the expected size
// is infinite, and partial sums of |D_n| P(D_n) already exceed 1000 at n = 30.
TEST(ExpectedSize, DivergentSizeSeriesPartialSum) {
  const double norm = 6.0 / (M_PI * M_PI);
  double partial = 0;
  for (int n = 1; n <= 30; ++n) partial += std::ldexp(1.0, n) * norm / (n * n);
  EXPECT_GT(partial, 1000);
}

TEST(ExplicitSuperpose, WorkedTablesEnumerated) {
  const Fact fp = test::S(1);
  ExplicitWorldPdb d2({{bag({{f, 1}}), Q(3, 4)}, {bag({{f, 2}}), Q(1, 4)}});
  ExplicitWorldPdb d1({{BagInstance{}, Q(3, 8)}, {bag({{f, 1}}), Q(3, 8)}, {bag({{fp, 1}}), Q(2, 8)}});
  ExplicitWorldPdb sp = explicit_superpose(d2, d1);
  EXPECT_EQ(sp.worlds().size(), 5u);
  EXPECT_EQ(sp.prob(bag({{f, 1}})), Q(9, 32));
  EXPECT_EQ(sp.prob(bag({{f, 2}})), Q(12, 32));
  EXPECT_EQ(sp.prob(bag({{f, 1}, {fp, 1}})), Q(6, 32));
  EXPECT_EQ(sp.prob(bag({{f, 3}})), Q(3, 32));
  EXPECT_EQ(sp.prob(bag({{f, 2}, {fp, 1}})), Q(2, 32));
}

TEST(ExplicitSuperpose, UnitAndProduct) {
  ExplicitWorldPdb x({{BagInstance{}, Q(1, 3)}, {bag({{f, 2}}), Q(2, 3)}});
  EXPECT_EQ(explicit_superpose(x, ExplicitWorldPdb()), x);
  ExplicitWorldPdb a({{BagInstance{}, Q(1, 2)}, {BagInstance{f}, Q(1, 2)}});
  ExplicitWorldPdb b({{BagInstance{}, Q(1, 2)}, {BagInstance{g}, Q(1, 2)}});
  ExplicitWorldPdb ab = explicit_superpose(a, b);
  ASSERT_EQ(ab.worlds().size(), 4u);
  for (const auto& [d, p] : ab.worlds()) EXPECT_EQ(p, Q(1, 4));
}

ExplicitWorldPdb random_explicit(Gen& gen) {
  std::vector<ExplicitWorldPdb::World> worlds;
  int n = static_cast<int>(gen.integer(1, 4));
  Rational left = 1;
  for (int i = 0; i < n; ++i) {
    Rational p = i + 1 == n ? left : left * gen.probability(6);
    worlds.push_back({random_bag(gen), p});
    left -= p;
  }
  return ExplicitWorldPdb::from_weighted(std::move(worlds));
}

TEST(ExplicitSuperpose, NormalizedCommutativeAssociative) {
  Gen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    ExplicitWorldPdb a = random_explicit(gen), b = random_explicit(gen), c = random_explicit(gen);
    ExplicitWorldPdb ab = explicit_superpose(a, b);
    Rational total = 0;
    for (const auto& w : ab.worlds()) total += w.second;
    EXPECT_EQ(total, 1);
    EXPECT_EQ(ab, explicit_superpose(b, a));
    EXPECT_EQ(explicit_superpose(ab, c), explicit_superpose(a, explicit_superpose(b, c)));
  }
}

TEST(ExpectedSize, EqualsSumOfMarginalsOnSetPdbs) {
  Gen gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto entries = gen.ti_entries(static_cast<std::size_t>(gen.integer(0, 5)));
    std::vector<ExplicitWorldPdb::World> worlds;
    for (const auto& w : test::ti_oracle(entries)) worlds.push_back(w);
    ExplicitWorldPdb pdb(std::move(worlds));
    Rational sum = 0;
    for (const auto& fact : pdb.facts()) sum += marginal(pdb, fact);
    EXPECT_EQ(expected_size(pdb), sum);
  }
}

TEST(ExplicitWorldPdb, Conditioning) {
  ExplicitWorldPdb a({{BagInstance{}, Q(1, 4)}, {BagInstance{f}, Q(1, 4)}, {BagInstance{g}, Q(1, 2)}});
  ExplicitWorldPdb c = a.condition([&](const BagInstance& d) { return !d.contains(g); });
  EXPECT_EQ(c.prob(BagInstance{}), Q(1, 2));
  EXPECT_EQ(c.prob(BagInstance{f}), Q(1, 2));
  EXPECT_THROW(a.condition([](const BagInstance& d) { return d.size() > 5; }), Error);
}

}  // namespace
}  // namespace ipdb
