#pragma once

#include <optional>
#include <vector>

#include "ipdb/core.hpp"
#include "ipdb/factspace.hpp"
#include "ipdb/random.hpp"

namespace ipdb {

// Mutually exclusive facts; with probability `slack()` the block contributes
// nothing.
struct Block {
  std::vector<std::pair<Fact, Rational>> facts;

  Rational mass() const;
  Rational slack() const { return 1 - mass(); }
};

// Countably many generated blocks: block j (j >= 1) holds member k's fact
// members[k].generator.at(j) with probability a * q^j * members[k].weight.
struct BlockTail {
  struct Member {
    FactTemplate generator;
    Rational weight;
  };
  std::vector<Member> members;
  Rational a;
  Rational q;

  Rational weight_sum() const;
  // Pr[block j is nonempty] = a * q^j * weight_sum.
  Rational nonempty(std::uint64_t j) const;
  Block block(std::uint64_t j) const;
  // sum_{j > m} Pr[block j nonempty]; nullopt when divergent.
  std::optional<Rational> nonempty_after(std::uint64_t m) const;
};

class BidPdb {
 public:
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::optional<BlockTail>& tail() const { return tail_; }
  bool is_finite() const { return !tail_; }

  // 1-based block containing the fact, with the fact's probability.
  std::optional<std::pair<std::uint64_t, Rational>> locate(const Fact& f) const;
  Block block_at(std::uint64_t b) const;

  // Family of per-block nonempty probabilities, reused for tail bounds.
  const FactFamily& nonempty_family() const { return nonempty_; }

 private:
  friend BidPdb validate_bid(std::vector<Block> blocks, std::optional<BlockTail> tail);
  BidPdb(std::vector<Block> blocks, std::optional<BlockTail> tail, FactFamily nonempty)
      : blocks_(std::move(blocks)), tail_(std::move(tail)), nonempty_(std::move(nonempty)) {}

  std::vector<Block> blocks_;
  std::optional<BlockTail> tail_;
  FactFamily nonempty_;
};

// Zero-probability facts are dropped from the blocks. Throws BlockOverflow,
// OverlappingBlocks, DivergentBlocks or InvalidProbability.
BidPdb validate_bid(std::vector<Block> blocks,
                    std::optional<BlockTail> tail = std::nullopt);

// Product of chosen-fact probabilities and slacks of empty blocks; zero when a
// block is hit twice or a fact outside every block is present. Finite only.
Rational world_prob_bid(const BidPdb& pdb, const BagInstance& d);

MassBound empty_prob(const BidPdb& pdb);

// One categorical draw per block; tail blocks past the delta cut are omitted.
BagInstance sample_bid(const BidPdb& pdb, Rng& rng, const Rational& delta);

// Per-block PDBs with worlds {} and {f} for each fact f of the block; their
// superposition is the BID law. Zero blocks give the single component {{}: 1}.
std::vector<ExplicitWorldPdb> bid_as_superposition(const BidPdb& pdb);

// Number of worlds of a finite BID: prod (|block| + 1), saturating.
std::uint64_t world_count(const BidPdb& pdb);

void for_each_world(const BidPdb& pdb,
                    const std::function<void(const BagInstance&, const Rational&)>& visit);

ExplicitWorldPdb to_explicit(const BidPdb& pdb);

}  // namespace ipdb
