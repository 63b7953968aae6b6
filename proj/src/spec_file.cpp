#include "ipdb/spec_file.hpp"

#include <fstream>
#include <sstream>

namespace ipdb::spec {

using nlohmann::json;

bool SuperpositionSpec::operator==(const SuperpositionSpec& o) const {
  return components == o.components && tail == o.tail;
}

bool CompletionSpec::operator==(const CompletionSpec& o) const {
  return base == o.base && extension == o.extension && lambda_cap == o.lambda_cap;
}

FactTemplate TailSpec::generator() const {
  std::vector<FactTemplate::Slot> slots;
  for (const auto& a : args)
    slots.push_back(a ? FactTemplate::constant(*a) : FactTemplate::index());
  return FactTemplate(relation, std::move(slots), offset);
}

std::string_view kind_name(const ModelSpec& m) {
  static constexpr std::string_view names[] = {"ti",           "bid",        "poisson",
                                               "explicit",     "superposition",
                                               "completion",   "continuous"};
  return names[m.value.index()];
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::InvalidSpec, where + ": " + msg);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string text_of(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Rational rational_of(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "rationals are written as \"num/den\" strings");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

json rational_json(const Rational& r) { return to_string(r); }

UniverseElem elem_of(const json& j, const std::string& where) {
  if (j.is_number_integer()) return UniverseElem(j.get<std::int64_t>());
  if (j.is_string()) return UniverseElem(j.get<std::string>());
  if (j.is_number_float()) return UniverseElem::real(j.get<double>());
  if (j.is_object()) {
    if (j.contains("rational")) return UniverseElem(rational_of(j["rational"], where));
    if (j.contains("real")) {
      const json& r = j["real"];
      if (r.is_number()) return UniverseElem::real(r.get<double>());
      return UniverseElem::real(rational_of(r, where).get_d());
    }
    if (j.contains("text")) return UniverseElem(text_of(j["text"], where));
  }
  bad(where, "unsupported universe element " + j.dump());
}

json elem_json(const UniverseElem& e) {
  switch (e.tag()) {
    case ElemTag::Integer: return e.as_integer();
    case ElemTag::Text:
      if (e.as_text() == "$i") return json{{"text", "$i"}};
      return e.as_text();
    case ElemTag::Exact: return json{{"rational", to_string(e.as_exact())}};
    case ElemTag::Real: return json{{"real", e.as_real()}};
  }
  return nullptr;
}

std::string_view tag_name(ElemTag t) {
  switch (t) {
    case ElemTag::Integer: return "int";
    case ElemTag::Text: return "str";
    case ElemTag::Exact: return "rational";
    case ElemTag::Real: return "real";
  }
  return "";
}

Fact fact_of(const json& j, const std::string& where) {
  std::string rel = text_of(field(j, "rel", where), where + ".rel");
  const json& args = field(j, "args", where);
  if (!args.is_array()) bad(where, "args must be an array");
  std::vector<UniverseElem> elems;
  for (std::size_t i = 0; i < args.size(); ++i)
    elems.push_back(elem_of(args[i], where + ".args[" + std::to_string(i) + "]"));
  return Fact(std::move(rel), std::move(elems));
}

json fact_json(const Fact& f) {
  json args = json::array();
  for (const auto& a : f.args) args.push_back(elem_json(a));
  return json{{"rel", f.relation}, {"args", args}};
}

std::vector<Weighted> weighted_list(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<Weighted> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    // Parsed into locals first: a throw inside a braced aggregate
    // initializer can leak the members already built on some compilers.
    Fact fact = fact_of(field(j[i], "fact", w), w + ".fact");
    Rational p = rational_of(field(j[i], "p", w), w + ".p");
    out.push_back({std::move(fact), std::move(p)});
  }
  return out;
}

json weighted_json(const std::vector<Weighted>& list) {
  json out = json::array();
  for (const auto& w : list) out.push_back({{"fact", fact_json(w.fact)}, {"p", rational_json(w.p)}});
  return out;
}

TailSpec template_of(const json& j, const std::string& where, bool with_aq) {
  TailSpec t;
  const json& tmpl = field(j, "template", where);
  t.relation = text_of(field(tmpl, "rel", where + ".template"), where + ".template.rel");
  const json& args = field(tmpl, "args", where + ".template");
  if (!args.is_array()) bad(where, "template args must be an array");
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].is_string() && args[i].get<std::string>() == "$i")
      t.args.push_back(std::nullopt);
    else
      t.args.push_back(elem_of(args[i], where + ".template.args"));
  }
  if (tmpl.contains("offset")) {
    if (!tmpl["offset"].is_number_integer()) bad(where, "template offset must be an integer");
    t.offset = tmpl["offset"].get<std::int64_t>();
  }
  if (with_aq) {
    t.a = rational_of(field(j, "a", where), where + ".a");
    t.q = rational_of(field(j, "q", where), where + ".q");
  }
  return t;
}

json template_json(const TailSpec& t, bool with_aq) {
  json args = json::array();
  for (const auto& a : t.args) args.push_back(a ? elem_json(*a) : json("$i"));
  json tmpl{{"rel", t.relation}, {"args", args}};
  if (t.offset != 0) tmpl["offset"] = t.offset;
  json out{{"template", tmpl}};
  if (with_aq) {
    out["a"] = rational_json(t.a);
    out["q"] = rational_json(t.q);
  }
  return out;
}

TiSpec ti_of(const json& j, const std::string& where) {
  TiSpec s;
  s.facts = j.contains("facts") ? weighted_list(j["facts"], where + ".facts") : std::vector<Weighted>{};
  if (j.contains("tail")) s.tail = template_of(j["tail"], where + ".tail", true);
  return s;
}

json ti_json(const TiSpec& s) {
  json out{{"kind", "ti"}, {"facts", weighted_json(s.facts)}};
  if (s.tail) out["tail"] = template_json(*s.tail, true);
  return out;
}

ModelSpec model_of(const json& j, const std::string& where);

json model_json(const ModelSpec& m);

ModelSpec model_of(const json& j, const std::string& where) {
  std::string kind = text_of(field(j, "kind", where), where + ".kind");
  if (kind == "ti") return {ti_of(j, where)};
  if (kind == "bid") {
    BidSpec s;
    if (j.contains("blocks")) {
      const json& blocks = j["blocks"];
      if (!blocks.is_array()) bad(where, "blocks must be an array");
      for (std::size_t b = 0; b < blocks.size(); ++b)
        s.blocks.push_back(weighted_list(blocks[b], where + ".blocks[" + std::to_string(b) + "]"));
    }
    if (j.contains("tail")) {
      const json& tail = j["tail"];
      std::string w = where + ".tail";
      s.tail_aq = std::pair{rational_of(field(tail, "a", w), w + ".a"),
                            rational_of(field(tail, "q", w), w + ".q")};
      const json& members = field(tail, "members", w);
      if (!members.is_array()) bad(w, "members must be an array");
      for (const auto& m : members) {
        TailSpec generator = template_of(m, w + ".members", false);
        Rational weight = rational_of(field(m, "weight", w), w + ".weight");
        s.tail_members.push_back({std::move(generator), std::move(weight)});
      }
    }
    return {s};
  }
  if (kind == "poisson") {
    PoissonSpec s;
    if (j.contains("facts")) {
      const json& facts = j["facts"];
      if (!facts.is_array()) bad(where, "facts must be an array");
      for (std::size_t i = 0; i < facts.size(); ++i) {
        std::string w = where + ".facts[" + std::to_string(i) + "]";
        const json& e = facts[i];
        bool presence = e.contains("presence");
        if (presence == e.contains("rate")) bad(w, "give exactly one of 'rate' or 'presence'");
        Fact fact = fact_of(field(e, "fact", w), w + ".fact");
        Rational value = rational_of(e[presence ? "presence" : "rate"], w);
        s.facts.push_back({std::move(fact), std::move(value), presence});
      }
    }
    if (j.contains("tail")) {
      s.tail = template_of(j["tail"], where + ".tail", true);
      if (j["tail"].contains("as")) {
        std::string as = text_of(j["tail"]["as"], where + ".tail.as");
        if (as != "rate" && as != "presence") bad(where, "tail 'as' must be rate or presence");
        s.tail_presence = as == "presence";
      }
    }
    return {s};
  }
  if (kind == "explicit") {
    ExplicitSpec s;
    const json& worlds = field(j, "worlds", where);
    if (!worlds.is_array()) bad(where, "worlds must be an array");
    for (std::size_t i = 0; i < worlds.size(); ++i) {
      std::string w = where + ".worlds[" + std::to_string(i) + "]";
      const json& facts = field(worlds[i], "facts", w);
      if (!facts.is_array()) bad(w, "facts must be an array");
      BagInstance d;
      for (const auto& f : facts) {
        std::uint64_t mult = 1;
        if (f.contains("mult")) {
          if (!f["mult"].is_number_unsigned()) bad(w, "mult must be a positive integer");
          mult = f["mult"].get<std::uint64_t>();
        }
        d.add(fact_of(field(f, "fact", w), w + ".fact"), mult);
      }
      Rational p = rational_of(field(worlds[i], "p", w), w + ".p");
      s.worlds.push_back({std::move(d), std::move(p)});
    }
    return {s};
  }
  if (kind == "superposition") {
    SuperpositionSpec s;
    const json& comps = field(j, "components", where);
    if (!comps.is_array()) bad(where, "components must be an array");
    for (std::size_t i = 0; i < comps.size(); ++i)
      s.components.push_back(model_of(comps[i], where + ".components[" + std::to_string(i) + "]"));
    if (j.contains("tail")) s.tail = template_of(j["tail"], where + ".tail", true);
    return {s};
  }
  if (kind == "completion") {
    CompletionSpec s;
    s.base.push_back(model_of(field(j, "base", where), where + ".base"));
    const json& ext = field(j, "extension", where);
    s.extension = ti_of(ext, where + ".extension");
    if (j.contains("lambda_cap")) s.lambda_cap = rational_of(j["lambda_cap"], where + ".lambda_cap");
    return {s};
  }
  if (kind == "continuous") {
    ContinuousSpec s;
    s.relation = text_of(field(j, "relation", where), where + ".relation");
    const json& pieces = field(j, "pieces", where);
    if (!pieces.is_array()) bad(where, "pieces must be an array");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      std::string w = where + ".pieces[" + std::to_string(i) + "]";
      Rational lo = rational_of(field(pieces[i], "lo", w), w + ".lo");
      Rational hi = rational_of(field(pieces[i], "hi", w), w + ".hi");
      Rational density = rational_of(field(pieces[i], "density", w), w + ".density");
      s.pieces.push_back({std::move(lo), std::move(hi), std::move(density)});
    }
    return {s};
  }
  bad(where, "unknown model kind '" + kind + "'");
}

json model_json(const ModelSpec& m) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TiSpec>) {
          return ti_json(s);
        } else if constexpr (std::is_same_v<T, BidSpec>) {
          json blocks = json::array();
          for (const auto& b : s.blocks) blocks.push_back(weighted_json(b));
          json out{{"kind", "bid"}, {"blocks", blocks}};
          if (s.tail_aq) {
            json members = json::array();
            for (const auto& m : s.tail_members) {
              json mj = template_json(m.generator, false);
              mj["weight"] = rational_json(m.weight);
              members.push_back(mj);
            }
            out["tail"] = {{"a", rational_json(s.tail_aq->first)},
                           {"q", rational_json(s.tail_aq->second)},
                           {"members", members}};
          }
          return out;
        } else if constexpr (std::is_same_v<T, PoissonSpec>) {
          json facts = json::array();
          for (const auto& e : s.facts)
            facts.push_back({{"fact", fact_json(e.fact)},
                             {e.presence ? "presence" : "rate", rational_json(e.value)}});
          json out{{"kind", "poisson"}, {"facts", facts}};
          if (s.tail) {
            out["tail"] = template_json(*s.tail, true);
            out["tail"]["as"] = s.tail_presence ? "presence" : "rate";
          }
          return out;
        } else if constexpr (std::is_same_v<T, ExplicitSpec>) {
          json worlds = json::array();
          for (const auto& [d, p] : s.worlds) {
            json facts = json::array();
            for (const auto& [f, mult] : d.entries())
              facts.push_back({{"fact", fact_json(f)}, {"mult", mult}});
            worlds.push_back({{"facts", facts}, {"p", rational_json(p)}});
          }
          return {{"kind", "explicit"}, {"worlds", worlds}};
        } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
          json comps = json::array();
          for (const auto& c : s.components) comps.push_back(model_json(c));
          json out{{"kind", "superposition"}, {"components", comps}};
          if (s.tail) out["tail"] = template_json(*s.tail, true);
          return out;
        } else if constexpr (std::is_same_v<T, CompletionSpec>) {
          json ext = ti_json(s.extension);
          ext.erase("kind");
          json out{{"kind", "completion"}, {"base", model_json(s.base.front())}, {"extension", ext}};
          if (s.lambda_cap) out["lambda_cap"] = rational_json(*s.lambda_cap);
          return out;
        } else {
          json pieces = json::array();
          for (const auto& p : s.pieces)
            pieces.push_back({{"lo", rational_json(p.lo)},
                              {"hi", rational_json(p.hi)},
                              {"density", rational_json(p.density)}});
          return {{"kind", "continuous"}, {"relation", s.relation}, {"pieces", pieces}};
        }
      },
      m.value);
}

//===----------------------------------------------------------------------===//

FactFamily family_of(const TiSpec& s) {
  std::vector<FactFamily::Entry> prefix;
  for (const auto& w : s.facts) prefix.push_back({w.fact, w.p});
  std::optional<GeometricTail> tail;
  if (s.tail) tail = GeometricTail{s.tail->generator(), s.tail->a, s.tail->q};
  return FactFamily(std::move(prefix), std::move(tail));
}

void add_component(std::vector<Component>& out, std::optional<GeometricTail>& tail, AnyPdb built) {
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SuperposedPdb>) {
          for (const auto& c : m.components()) out.push_back(c);
          if (m.tail()) {
            if (tail)
              throw Error(ErrorCode::InvalidSpec,
                          "at most one countable component tail per superposition");
            tail = m.tail();
          }
        } else if constexpr (std::is_same_v<T, PiecewiseIntensity>) {
          throw Error(ErrorCode::InvalidSpec,
                      "continuous intensities cannot be superposed with discrete models");
        } else {
          out.push_back(make_component(std::move(m)));
        }
      },
      built);
}

void collect_schema(const ModelSpec& m, Schema& schema) {
  auto fact = [&](const Fact& f) { schema.declare(f.relation, f.arity()); };
  auto tmpl = [&](const TailSpec& t) { schema.declare(t.relation, t.args.size()); };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TiSpec>) {
          for (const auto& w : s.facts) fact(w.fact);
          if (s.tail) tmpl(*s.tail);
        } else if constexpr (std::is_same_v<T, BidSpec>) {
          for (const auto& b : s.blocks)
            for (const auto& w : b) fact(w.fact);
          for (const auto& m : s.tail_members) tmpl(m.generator);
        } else if constexpr (std::is_same_v<T, PoissonSpec>) {
          for (const auto& e : s.facts) fact(e.fact);
          if (s.tail) tmpl(*s.tail);
        } else if constexpr (std::is_same_v<T, ExplicitSpec>) {
          for (const auto& [d, p] : s.worlds)
            for (const auto& e : d.entries()) fact(e.first);
        } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
          for (const auto& c : s.components) collect_schema(c, schema);
          if (s.tail) tmpl(*s.tail);
        } else if constexpr (std::is_same_v<T, CompletionSpec>) {
          collect_schema(s.base.front(), schema);
          collect_schema(ModelSpec{s.extension}, schema);
        } else {
          schema.declare(s.relation, 1);
        }
      },
      m.value);
}

void collect_tags(const ModelSpec& m, std::vector<ElemTag>& tags) {
  auto elems = [&](const std::vector<UniverseElem>& args) {
    for (const auto& a : args) tags.push_back(a.tag());
  };
  auto tmpl = [&](const TailSpec& t) {
    tags.push_back(ElemTag::Integer);
    for (const auto& a : t.args)
      if (a) tags.push_back(a->tag());
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TiSpec>) {
          for (const auto& w : s.facts) elems(w.fact.args);
          if (s.tail) tmpl(*s.tail);
        } else if constexpr (std::is_same_v<T, BidSpec>) {
          for (const auto& b : s.blocks)
            for (const auto& w : b) elems(w.fact.args);
          for (const auto& m : s.tail_members) tmpl(m.generator);
        } else if constexpr (std::is_same_v<T, PoissonSpec>) {
          for (const auto& e : s.facts) elems(e.fact.args);
          if (s.tail) tmpl(*s.tail);
        } else if constexpr (std::is_same_v<T, ExplicitSpec>) {
          for (const auto& [d, p] : s.worlds)
            for (const auto& e : d.entries()) elems(e.first.args);
        } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
          for (const auto& c : s.components) collect_tags(c, tags);
          if (s.tail) tmpl(*s.tail);
        } else if constexpr (std::is_same_v<T, CompletionSpec>) {
          collect_tags(s.base.front(), tags);
          collect_tags(ModelSpec{s.extension}, tags);
        } else {
          tags.push_back(ElemTag::Real);
        }
      },
      m.value);
}

}  // namespace

//===----------------------------------------------------------------------===//

PdbSpec parse(const json& doc) {
  PdbSpec out;
  if (!doc.is_object()) bad("spec", "top level must be an object");
  if (doc.contains("schema")) {
    const json& rels = doc["schema"];
    if (!rels.is_array()) bad("spec.schema", "expected an array of relations");
    for (const auto& r : rels) {
      const json& arity = field(r, "arity", "spec.schema");
      if (!arity.is_number_unsigned()) bad("spec.schema", "arity must be a non-negative integer");
      try {
        out.schema.add({text_of(field(r, "name", "spec.schema"), "spec.schema.name"),
                        arity.get<std::size_t>()});
      } catch (const Error& e) {
        bad("spec.schema", e.what());
      }
    }
  }
  if (doc.contains("universe_tags")) {
    const json& tags = doc["universe_tags"];
    if (!tags.is_array()) bad("spec.universe_tags", "expected an array");
    for (const auto& t : tags) out.universe_tags.push_back(text_of(t, "spec.universe_tags"));
  }
  out.model = model_of(field(doc, "model", "spec"), "spec.model");

  // Schema: declared relations must match usage; undeclared ones are added.
  Schema used = infer_schema(out.model);
  for (const auto& r : used.relations()) out.schema.declare(r.name, r.arity);
  if (!out.universe_tags.empty()) {
    std::vector<ElemTag> tags;
    collect_tags(out.model, tags);
    for (auto t : tags)
      if (std::find(out.universe_tags.begin(), out.universe_tags.end(), tag_name(t)) ==
          out.universe_tags.end())
        bad("spec.universe_tags", "model uses undeclared tag '" + std::string(tag_name(t)) + "'");
  }
  return out;
}

PdbSpec load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidSpec, path + ": " + e.what());
  }
  return parse(doc);
}

json emit(const PdbSpec& spec) {
  json rels = json::array();
  for (const auto& r : spec.schema.relations()) rels.push_back({{"name", r.name}, {"arity", r.arity}});
  json out{{"schema", rels}, {"model", model_json(spec.model)}};
  if (!spec.universe_tags.empty()) out["universe_tags"] = spec.universe_tags;
  return out;
}

Schema infer_schema(const ModelSpec& model) {
  Schema s;
  collect_schema(model, s);
  return s;
}

AnyPdb build(const ModelSpec& model) {
  return std::visit(
      [](const auto& s) -> AnyPdb {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TiSpec>) {
          return validate_ti(family_of(s));
        } else if constexpr (std::is_same_v<T, BidSpec>) {
          std::vector<Block> blocks;
          for (const auto& b : s.blocks) {
            Block block;
            for (const auto& w : b) block.facts.push_back({w.fact, w.p});
            blocks.push_back(std::move(block));
          }
          std::optional<BlockTail> tail;
          if (s.tail_aq) {
            BlockTail t{{}, s.tail_aq->first, s.tail_aq->second};
            for (const auto& m : s.tail_members) t.members.push_back({m.generator.generator(), m.weight});
            tail = std::move(t);
          }
          return validate_bid(std::move(blocks), std::move(tail));
        } else if constexpr (std::is_same_v<T, PoissonSpec>) {
          std::vector<std::pair<Fact, double>> rates;
          for (const auto& e : s.facts) {
            if (e.presence) {
              if (e.value < 0 || e.value > 1)
                throw Error(ErrorCode::InvalidProbability,
                            e.fact.to_string() + " has presence " + to_string(e.value));
              if (e.value == 1)
                throw Error(ErrorCode::AlmostSureFact,
                            e.fact.to_string() + " has presence 1 and no finite rate");
              rates.push_back({e.fact, -std::log1p(-e.value.get_d())});
            } else {
              if (e.value < 0)
                throw Error(ErrorCode::InvalidProbability, e.fact.to_string() + " has a negative rate");
              rates.push_back({e.fact, e.value.get_d()});
            }
          }
          std::optional<RateTail> tail;
          if (s.tail)
            tail = RateTail{GeometricTail{s.tail->generator(), s.tail->a, s.tail->q}, s.tail_presence};
          return validate_poisson(std::move(rates), std::move(tail));
        } else if constexpr (std::is_same_v<T, ExplicitSpec>) {
          std::vector<ExplicitWorldPdb::World> worlds(s.worlds.begin(), s.worlds.end());
          return ExplicitWorldPdb(std::move(worlds));
        } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
          std::vector<Component> comps;
          std::optional<GeometricTail> tail;
          for (const auto& c : s.components) add_component(comps, tail, build(c));
          if (s.tail) {
            if (tail)
              throw Error(ErrorCode::InvalidSpec,
                          "at most one countable component tail per superposition");
            tail = GeometricTail{s.tail->generator(), s.tail->a, s.tail->q};
          }
          return superpose(std::move(comps), std::move(tail));
        } else if constexpr (std::is_same_v<T, CompletionSpec>) {
          AnyPdb base = build(s.base.front());
          const TiPdb* ti = std::get_if<TiPdb>(&base);
          if (!ti) throw Error(ErrorCode::ModeMismatch, "completions need a TI base model");
          FactFamily ext = family_of(s.extension);
          if (s.lambda_cap) {
            auto max_p = ext.max_weight();
            if (!max_p || *max_p > *s.lambda_cap)
              throw Error(ErrorCode::NotACompletion,
                          "an extension marginal exceeds lambda cap " + to_string(*s.lambda_cap));
          }
          return ti_completion(*ti, ext);
        } else {
          std::vector<PiecewiseIntensity::Piece> pieces;
          for (const auto& p : s.pieces)
            pieces.push_back({{p.lo.get_d(), p.hi.get_d()}, p.density.get_d()});
          return PiecewiseIntensity(s.relation, std::move(pieces));
        }
      },
      model.value);
}

}  // namespace ipdb::spec
