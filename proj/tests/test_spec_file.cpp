#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "ipdb/spec_file.hpp"
#include "support.hpp"

namespace ipdb {
namespace {

using nlohmann::json;
using test::Q;

ErrorCode code_of(const std::function<void()>& action) {
  try {
    action();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

json fact(const std::string& rel, json args) { return {{"rel", rel}, {"args", std::move(args)}}; }

json ti_doc() {
  return json::parse(R"({
    "schema": [{"name": "R", "arity": 1}],
    "model": {"kind": "ti",
              "facts": [{"fact": {"rel": "R", "args": [0]}, "p": "1/3"}],
              "tail": {"template": {"rel": "R", "args": ["$i"]}, "a": "1", "q": "1/2"}}
  })");
}

std::vector<json> every_kind() {
  std::vector<json> docs;
  docs.push_back(ti_doc());
  docs.push_back(json::parse(R"({"model": {"kind": "bid",
    "blocks": [[{"fact": {"rel": "Order", "args": [1, "Joe", {"rational": "5/2"}]}, "p": "4/5"},
                {"fact": {"rel": "Order", "args": [1, "Bob", {"real": 1.5}]}, "p": "1/5"}]],
    "tail": {"a": "1", "q": "1/2",
             "members": [{"template": {"rel": "T", "args": ["$i", "x"], "offset": 3}, "weight": "1/2"},
                         {"template": {"rel": "T", "args": ["$i", "y"]}, "weight": "1/2"}]}}})"));
  docs.push_back(json::parse(R"({"model": {"kind": "poisson",
    "facts": [{"fact": {"rel": "R", "args": [1]}, "rate": "1/2"},
              {"fact": {"rel": "R", "args": [2]}, "presence": "3/4"}],
    "tail": {"template": {"rel": "R", "args": ["$i"], "offset": 10}, "a": "1", "q": "1/2", "as": "presence"}}})"));
  docs.push_back(json::parse(R"({"model": {"kind": "explicit",
    "worlds": [{"facts": [], "p": "1/4"},
               {"facts": [{"fact": {"rel": "R", "args": [{"text": "$i"}]}, "mult": 2}], "p": "3/4"}]}})"));
  docs.push_back(json::parse(R"({"model": {"kind": "superposition",
    "components": [{"kind": "ti", "facts": [{"fact": {"rel": "R", "args": [1]}, "p": "1/2"}]},
                   {"kind": "explicit", "worlds": [{"facts": [{"fact": {"rel": "S", "args": [1]}}], "p": "1"}]}],
    "tail": {"template": {"rel": "R", "args": ["$i"], "offset": 5}, "a": "1", "q": "1/2"}}})"));
  docs.push_back(json::parse(R"({"model": {"kind": "completion",
    "base": {"kind": "ti", "facts": [{"fact": {"rel": "R", "args": [1]}, "p": "1/2"}]},
    "extension": {"facts": [{"fact": {"rel": "R", "args": [2]}, "p": "1/2"}]},
    "lambda_cap": "1/2"}})"));
  docs.push_back(json::parse(R"({"universe_tags": ["real"], "model": {"kind": "continuous", "relation": "X",
    "pieces": [{"lo": "0", "hi": "1", "density": "1"}, {"lo": "2", "hi": "3", "density": "1/2"}]}})"));
  return docs;
}

TEST(SpecFile, RoundTripsEveryKind) {
  const std::vector<std::string_view> kinds = {"ti", "bid", "poisson", "explicit", "superposition",
                                               "completion", "continuous"};
  std::vector<json> docs = every_kind();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    spec::PdbSpec s = spec::parse(docs[i]);
    EXPECT_EQ(spec::kind_name(s.model), kinds[i]);
    json emitted = spec::emit(s);
    spec::PdbSpec again = spec::parse(emitted);
    EXPECT_EQ(s, again) << emitted.dump();
    EXPECT_EQ(spec::emit(again), emitted);
    EXPECT_NO_THROW(spec::build(s.model)) << kinds[i];
  }
}

TEST(SpecFile, InfersSchema) {
  spec::PdbSpec s = spec::parse(every_kind()[1]);
  EXPECT_EQ(s.schema.arity_of("Order"), 3u);
  EXPECT_EQ(s.schema.arity_of("T"), 2u);
}

TEST(SpecFile, StructuralErrors) {
  EXPECT_EQ(code_of([] { spec::parse(json::array()); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(code_of([] { spec::parse(json::object()); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(code_of([] { spec::parse({{"model", {{"kind", "nope"}}}}); }), ErrorCode::InvalidSpec);
  json d = ti_doc();
  d["model"]["facts"][0]["p"] = 0.5;
  EXPECT_EQ(code_of([&] { spec::parse(d); }), ErrorCode::InvalidSpec);
  d = ti_doc();
  d["model"]["facts"][0]["p"] = "one half";
  EXPECT_EQ(code_of([&] { spec::parse(d); }), ErrorCode::InvalidSpec);
  d = ti_doc();
  d["model"]["facts"][0].erase("fact");
  EXPECT_EQ(code_of([&] { spec::parse(d); }), ErrorCode::InvalidSpec);
  json both = every_kind()[2];
  both["model"]["facts"][0]["presence"] = "1/2";
  EXPECT_EQ(code_of([&] { spec::parse(both); }), ErrorCode::InvalidSpec);
  json tags = ti_doc();
  tags["universe_tags"] = json::array({"str"});
  EXPECT_EQ(code_of([&] { spec::parse(tags); }), ErrorCode::InvalidSpec);
  tags["universe_tags"] = json::array({"int"});
  EXPECT_NO_THROW(spec::parse(tags));
}

TEST(SpecFile, ArityErrors) {
  json d = ti_doc();
  d["model"]["facts"].push_back({{"fact", fact("R", {1, 2})}, {"p", "1/2"}});
  EXPECT_EQ(code_of([&] { spec::parse(d); }), ErrorCode::ArityMismatch);
  json declared = ti_doc();
  declared["schema"] = json::parse(R"([{"name": "R", "arity": 2}])");
  EXPECT_EQ(code_of([&] { spec::parse(declared); }), ErrorCode::ArityMismatch);
}

TEST(SpecFile, BuildRunsValidation) {
  json divergent = ti_doc();
  divergent["model"]["tail"]["q"] = "1";
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(divergent).model); }), ErrorCode::DivergentMarginals);

  json bid = every_kind()[1];
  bid["model"]["blocks"][0][1]["p"] = "1/2";
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(bid).model); }), ErrorCode::BlockOverflow);

  json sure = every_kind()[2];
  sure["model"]["facts"][1]["presence"] = "1";
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(sure).model); }), ErrorCode::AlmostSureFact);
  sure["model"]["facts"][1]["presence"] = "3/2";
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(sure).model); }), ErrorCode::InvalidProbability);

  json explicit_bad = every_kind()[3];
  explicit_bad["model"]["worlds"][0]["p"] = "1/2";
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(explicit_bad).model); }), ErrorCode::InvalidProbability);

  json capped = every_kind()[5];
  capped["model"]["lambda_cap"] = "1/3";
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(capped).model); }), ErrorCode::NotACompletion);
  json bid_base = every_kind()[5];
  bid_base["model"]["base"] = every_kind()[1]["model"];
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(bid_base).model); }), ErrorCode::ModeMismatch);

  json two_tails = every_kind()[4];
  two_tails["model"]["components"].push_back(every_kind()[4]["model"]);
  EXPECT_EQ(code_of([&] { spec::build(spec::parse(two_tails).model); }), ErrorCode::InvalidSpec);
}

TEST(SpecFile, BuiltModelsMatchDescriptions) {
  spec::AnyPdb ti = spec::build(spec::parse(ti_doc()).model);
  ASSERT_TRUE(std::holds_alternative<TiPdb>(ti));
  EXPECT_EQ(std::get<TiPdb>(ti).family().weight_at(1), Q(1, 3));
  EXPECT_EQ(std::get<TiPdb>(ti).family().weight_at(2), Q(1, 2));

  spec::AnyPdb poisson = spec::build(spec::parse(every_kind()[2]).model);
  const PoissonPdb& p = std::get<PoissonPdb>(poisson);
  EXPECT_DOUBLE_EQ(*p.rate_of(test::R(1)), 0.5);
  EXPECT_NEAR(*p.rate_of(test::R(2)), std::log(4.0), 1e-15);

  spec::AnyPdb completion = spec::build(spec::parse(every_kind()[5]).model);
  ASSERT_TRUE(std::holds_alternative<SuperposedPdb>(completion));
  ExplicitWorldPdb law = to_explicit(std::get<SuperposedPdb>(completion));
  EXPECT_EQ(law.worlds().size(), 4u);
  for (const auto& [d, prob] : law.worlds()) EXPECT_EQ(prob, Q(1, 4));
}

TEST(SpecFile, LoadFile) {
  std::string path = ::testing::TempDir() + "ipdb_spec_test.json";
  {
    std::ofstream out(path);
    out << ti_doc().dump(2);
  }
  EXPECT_EQ(spec::load_file(path), spec::parse(ti_doc()));
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_EQ(code_of([&] { spec::load_file(path); }), ErrorCode::InvalidSpec);
  std::remove(path.c_str());
  EXPECT_THROW(spec::load_file(path), std::runtime_error);
}

}  // namespace
}  // namespace ipdb
