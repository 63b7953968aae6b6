#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ipdb/bid.hpp"
#include "ipdb/combinators.hpp"
#include "ipdb/continuous.hpp"
#include "ipdb/core.hpp"
#include "ipdb/poisson.hpp"
#include "ipdb/ti.hpp"

namespace ipdb::spec {

// Descriptions mirror the JSON payloads one to one; `build` turns them into
// validated models. Keeping the description lets load -> emit -> load be
// lossless (rates given as presence probabilities stay rational, etc.).

struct Weighted {
  Fact fact;
  Rational p;
  bool operator==(const Weighted&) const = default;
};

struct TailSpec {
  std::string relation;
  std::vector<std::optional<UniverseElem>> args;  // nullopt marks the index slot
  std::int64_t offset = 0;
  Rational a;
  Rational q;

  FactTemplate generator() const;
  bool operator==(const TailSpec&) const = default;
};

struct TiSpec {
  std::vector<Weighted> facts;
  std::optional<TailSpec> tail;
  bool operator==(const TiSpec&) const = default;
};

struct BidSpec {
  struct Member {
    TailSpec generator;  // a and q unused
    Rational weight;
    bool operator==(const Member&) const = default;
  };
  std::vector<std::vector<Weighted>> blocks;
  std::vector<Member> tail_members;
  std::optional<std::pair<Rational, Rational>> tail_aq;
  bool operator==(const BidSpec&) const = default;
};

struct PoissonSpec {
  struct Entry {
    Fact fact;
    Rational value;
    bool presence = false;  // value is Pr[f present]; rate = -ln(1 - value)
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> facts;
  std::optional<TailSpec> tail;
  bool tail_presence = false;
  bool operator==(const PoissonSpec&) const = default;
};

struct ExplicitSpec {
  std::vector<std::pair<BagInstance, Rational>> worlds;
  bool operator==(const ExplicitSpec&) const = default;
};

struct ContinuousSpec {
  struct Piece {
    Rational lo, hi, density;
    bool operator==(const Piece&) const = default;
  };
  std::string relation;
  std::vector<Piece> pieces;
  bool operator==(const ContinuousSpec&) const = default;
};

struct ModelSpec;

struct SuperpositionSpec {
  std::vector<ModelSpec> components;
  std::optional<TailSpec> tail;  // single-fact TI components
  bool operator==(const SuperpositionSpec&) const;
};

struct CompletionSpec {
  std::vector<ModelSpec> base;  // exactly one TI model
  TiSpec extension;
  std::optional<Rational> lambda_cap;
  bool operator==(const CompletionSpec&) const;
};

struct ModelSpec {
  std::variant<TiSpec, BidSpec, PoissonSpec, ExplicitSpec, SuperpositionSpec, CompletionSpec,
               ContinuousSpec>
      value;
  bool operator==(const ModelSpec&) const = default;
};

struct PdbSpec {
  Schema schema;
  std::vector<std::string> universe_tags;
  ModelSpec model;
  bool operator==(const PdbSpec&) const = default;
};

using AnyPdb = std::variant<ExplicitWorldPdb, TiPdb, BidPdb, PoissonPdb, SuperposedPdb,
                            PiecewiseIntensity>;

std::string_view kind_name(const ModelSpec& m);

// Throws Error(InvalidSpec) on malformed documents and ArityMismatch when a
// fact disagrees with the schema.
PdbSpec parse(const nlohmann::json& doc);
PdbSpec load_file(const std::string& path);
nlohmann::json emit(const PdbSpec& spec);

// Runs the model's validate_* operation; throws its error on failure.
AnyPdb build(const ModelSpec& model);

// Facts or templates of the description, for schema checks and combination.
Schema infer_schema(const ModelSpec& model);

}  // namespace ipdb::spec
