#include "ipdb/core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

namespace ipdb {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::TagMismatch: return "tag-mismatch";
    case ErrorCode::InvalidProbability: return "invalid-probability";
    case ErrorCode::DivergentMarginals: return "divergent-marginals";
    case ErrorCode::FactOutsideFamily: return "fact-outside-family";
    case ErrorCode::NonconvergentFamily: return "nonconvergent-family";
    case ErrorCode::UnsupportedSubfamilyShape: return "unsupported-subfamily-shape";
    case ErrorCode::BlockOverflow: return "block-overflow";
    case ErrorCode::OverlappingBlocks: return "overlapping-blocks";
    case ErrorCode::DivergentBlocks: return "divergent-blocks";
    case ErrorCode::DivergentRates: return "divergent-rates";
    case ErrorCode::AlmostSureFact: return "almost-sure-fact";
    case ErrorCode::DivergentComponents: return "divergent-components";
    case ErrorCode::PreconditionViolated: return "precondition-violated";
    case ErrorCode::NotACompletion: return "not-a-completion";
    case ErrorCode::OverlappingFactSets: return "overlapping-fact-sets";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::ArityMismatch: return "arity-mismatch";
    case ErrorCode::UnboundVariable: return "unbound-variable";
    case ErrorCode::WorldBudgetExceeded: return "world-budget-exceeded";
    case ErrorCode::ModeMismatch: return "mode-mismatch";
    case ErrorCode::InvalidSpec: return "invalid-spec";
  }
  return "unknown";
}

Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::InvalidArgument,
                 "not a rational literal: '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();

  std::string s(text);
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw fail();
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) throw fail();
    for (char c : whole + frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw fail();
    mpz_class num(whole + frac, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational r(num, den);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }

  auto slash = s.find('/');
  auto digits_ok = [](const std::string& part) {
    std::size_t start = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (start == part.size()) return false;
    return std::all_of(part.begin() + start, part.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den) || den[0] == '-' || den[0] == '+')
    throw fail();
  if (num[0] == '+') num.erase(0, 1);
  mpz_class d(den, 10);
  if (d == 0) throw fail();
  Rational r(mpz_class(num, 10), d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) { return value.get_str(); }

//===----------------------------------------------------------------------===//

Schema::Schema(std::vector<Relation> relations) {
  for (auto& r : relations) add(std::move(r));
}

void Schema::add(Relation relation) {
  if (arity_of(relation.name))
    throw Error(ErrorCode::InvalidArgument,
                "duplicate relation symbol '" + relation.name + "'");
  relations_.push_back(std::move(relation));
}

void Schema::declare(const std::string& name, std::size_t arity) {
  if (auto known = arity_of(name)) {
    if (*known != arity)
      throw Error(ErrorCode::ArityMismatch,
                  "relation '" + name + "' declared with arity " +
                      std::to_string(*known) + ", used with arity " +
                      std::to_string(arity));
    return;
  }
  relations_.push_back({name, arity});
}

std::optional<std::size_t> Schema::arity_of(std::string_view name) const {
  for (const auto& r : relations_)
    if (r.name == name) return r.arity;
  return std::nullopt;
}

//===----------------------------------------------------------------------===//

namespace {

Error wrong_tag(const char* wanted) {
  return Error(ErrorCode::TagMismatch,
               std::string("universe element is not ") + wanted);
}

}  // namespace

std::int64_t UniverseElem::as_integer() const {
  if (auto* v = std::get_if<std::int64_t>(&value_)) return *v;
  throw wrong_tag("an integer");
}

const std::string& UniverseElem::as_text() const {
  if (auto* v = std::get_if<std::string>(&value_)) return *v;
  throw wrong_tag("a string");
}

const Rational& UniverseElem::as_exact() const {
  if (auto* v = std::get_if<Rational>(&value_)) return *v;
  throw wrong_tag("a rational");
}

double UniverseElem::as_real() const {
  if (auto* v = std::get_if<double>(&value_)) return *v;
  throw wrong_tag("a real");
}

bool UniverseElem::operator==(const UniverseElem& other) const {
  if (value_.index() != other.value_.index()) return false;
  if (tag() == ElemTag::Real)
    return std::bit_cast<std::uint64_t>(as_real()) ==
           std::bit_cast<std::uint64_t>(other.as_real());
  return value_ == other.value_;
}

std::strong_ordering compare_values(const UniverseElem& a,
                                    const UniverseElem& b) {
  if (a.tag() != b.tag())
    throw Error(ErrorCode::TagMismatch,
                "cannot compare " + a.to_string() + " with " + b.to_string());
  switch (a.tag()) {
    case ElemTag::Integer: return a.as_integer() <=> b.as_integer();
    case ElemTag::Text: return a.as_text() <=> b.as_text();
    case ElemTag::Exact: {
      int c = cmp(a.as_exact(), b.as_exact());
      return c < 0 ? std::strong_ordering::less
                   : c > 0 ? std::strong_ordering::greater
                           : std::strong_ordering::equal;
    }
    case ElemTag::Real: {
      // Bit order breaks ties between equal-valued reals (e.g. -0.0 and 0.0).
      double x = a.as_real(), y = b.as_real();
      if (x < y) return std::strong_ordering::less;
      if (x > y) return std::strong_ordering::greater;
      return std::bit_cast<std::uint64_t>(x) <=> std::bit_cast<std::uint64_t>(y);
    }
  }
  return std::strong_ordering::equal;
}

bool canonical_less(const UniverseElem& a, const UniverseElem& b) {
  if (a.tag() != b.tag()) return a.tag() < b.tag();
  return compare_values(a, b) < 0;
}

std::string UniverseElem::to_string() const {
  switch (tag()) {
    case ElemTag::Integer: return std::to_string(as_integer());
    case ElemTag::Text: {
      std::string out = "\"";
      for (char c : as_text()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case ElemTag::Exact: {
      std::string s = as_exact().get_str();
      return s.find('/') == std::string::npos ? s + "/1" : s;
    }
    case ElemTag::Real: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", as_real());
      std::string s(buf);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
  }
  return {};
}

//===----------------------------------------------------------------------===//

bool operator<(const Fact& a, const Fact& b) {
  if (a.relation != b.relation) return a.relation < b.relation;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size();
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (canonical_less(a.args[i], b.args[i])) return true;
    if (canonical_less(b.args[i], a.args[i])) return false;
  }
  return false;
}

std::string Fact::to_string() const {
  std::string out = relation + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].to_string();
  }
  return out + ")";
}

void check_against(const Schema& schema, const Fact& fact) {
  auto arity = schema.arity_of(fact.relation);
  if (!arity)
    throw Error(ErrorCode::ArityMismatch,
                "relation '" + fact.relation + "' is not in the schema");
  if (*arity != fact.arity())
    throw Error(ErrorCode::ArityMismatch,
                fact.to_string() + " does not match declared arity " +
                    std::to_string(*arity));
}

//===----------------------------------------------------------------------===//

BagInstance::BagInstance(std::initializer_list<Fact> facts) {
  for (const auto& f : facts) add(f);
}

BagInstance BagInstance::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  BagInstance out;
  for (auto& e : entries) {
    if (e.second == 0) continue;
    if (!out.entries_.empty() && out.entries_.back().first == e.first)
      out.entries_.back().second += e.second;
    else
      out.entries_.push_back(std::move(e));
  }
  return out;
}

void BagInstance::add(const Fact& fact, std::uint64_t count) {
  if (count == 0) return;
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), fact,
      [](const Entry& e, const Fact& f) { return e.first < f; });
  if (it != entries_.end() && it->first == fact)
    it->second += count;
  else
    entries_.insert(it, {fact, count});
}

std::uint64_t BagInstance::multiplicity(const Fact& fact) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), fact,
      [](const Entry& e, const Fact& f) { return e.first < f; });
  return (it != entries_.end() && it->first == fact) ? it->second : 0;
}

std::uint64_t BagInstance::size() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) total += e.second;
  return total;
}

bool BagInstance::is_set() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.second == 1; });
}

bool operator<(const BagInstance& a, const BagInstance& b) {
  return std::lexicographical_compare(
      a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
      b.entries_.end(), [](const BagInstance::Entry& x, const BagInstance::Entry& y) {
        if (x.first < y.first) return true;
        if (y.first < x.first) return false;
        return x.second < y.second;
      });
}

std::string BagInstance::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [fact, count] : entries_) {
    for (std::uint64_t k = 0; k < count; ++k) {
      if (!first) out += ", ";
      out += fact.to_string();
      first = false;
    }
  }
  return out + "}";
}

BagInstance bag_union(const BagInstance& a, const BagInstance& b) {
  std::vector<BagInstance::Entry> merged;
  merged.reserve(a.entries().size() + b.entries().size());
  merged.insert(merged.end(), a.entries().begin(), a.entries().end());
  merged.insert(merged.end(), b.entries().begin(), b.entries().end());
  return BagInstance::from_entries(std::move(merged));
}

BagInstance dedup(const BagInstance& d) {
  std::vector<BagInstance::Entry> entries = d.entries();
  for (auto& e : entries) e.second = 1;
  return BagInstance::from_entries(std::move(entries));
}

//===----------------------------------------------------------------------===//

ExplicitWorldPdb::ExplicitWorldPdb() { worlds_.push_back({BagInstance{}, Rational(1)}); }

ExplicitWorldPdb::ExplicitWorldPdb(Unchecked, std::vector<World> worlds)
    : worlds_(std::move(worlds)) {}

std::vector<ExplicitWorldPdb::World> ExplicitWorldPdb::canonicalize(
    std::vector<World> worlds, bool merge) {
  Rational total = 0;
  for (const auto& [d, p] : worlds) {
    if (p < 0 || p > 1)
      throw Error(ErrorCode::InvalidProbability,
                  "world " + d.to_string() + " has probability " + to_string(p));
    total += p;
  }
  if (total != 1)
    throw Error(ErrorCode::InvalidProbability,
                "world probabilities sum to " + to_string(total) + ", not 1");

  std::sort(worlds.begin(), worlds.end(),
            [](const World& a, const World& b) { return a.first < b.first; });
  std::vector<World> out;
  out.reserve(worlds.size());
  for (auto& w : worlds) {
    if (!out.empty() && out.back().first == w.first) {
      if (!merge)
        throw Error(ErrorCode::InvalidArgument,
                    "world " + w.first.to_string() + " listed twice");
      out.back().second += w.second;
    } else {
      out.push_back(std::move(w));
    }
  }
  std::erase_if(out, [](const World& w) { return w.second == 0; });
  return out;
}

ExplicitWorldPdb::ExplicitWorldPdb(std::vector<World> worlds)
    : worlds_(canonicalize(std::move(worlds), false)) {}

ExplicitWorldPdb ExplicitWorldPdb::from_weighted(std::vector<World> worlds) {
  return ExplicitWorldPdb(Unchecked{}, canonicalize(std::move(worlds), true));
}

Rational ExplicitWorldPdb::prob(const BagInstance& d) const {
  auto it = std::lower_bound(
      worlds_.begin(), worlds_.end(), d,
      [](const World& w, const BagInstance& x) { return w.first < x; });
  return (it != worlds_.end() && it->first == d) ? it->second : Rational(0);
}

Rational ExplicitWorldPdb::prob_of(
    const std::function<bool(const BagInstance&)>& event) const {
  Rational total = 0;
  for (const auto& [d, p] : worlds_)
    if (event(d)) total += p;
  return total;
}

ExplicitWorldPdb ExplicitWorldPdb::condition(
    const std::function<bool(const BagInstance&)>& event) const {
  Rational mass = prob_of(event);
  if (mass == 0)
    throw Error(ErrorCode::PreconditionViolated,
                "cannot condition on an event of probability 0");
  std::vector<World> kept;
  for (const auto& [d, p] : worlds_)
    if (event(d)) kept.push_back({d, p / mass});
  return ExplicitWorldPdb(Unchecked{}, std::move(kept));
}

std::vector<Fact> ExplicitWorldPdb::facts() const {
  std::vector<Fact> out;
  for (const auto& [d, p] : worlds_)
    for (const auto& e : d.entries()) out.push_back(e.first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rational marginal(const ExplicitWorldPdb& pdb, const Fact& f) {
  return pdb.prob_of([&](const BagInstance& d) { return d.contains(f); });
}

Rational expected_size(const ExplicitWorldPdb& pdb) {
  Rational total = 0;
  for (const auto& [d, p] : pdb.worlds()) total += p * static_cast<unsigned long>(d.size());
  return total;
}

ExplicitWorldPdb explicit_superpose(const ExplicitWorldPdb& a,
                                    const ExplicitWorldPdb& b) {
  std::map<BagInstance, Rational> law;
  for (const auto& [da, pa] : a.worlds())
    for (const auto& [db, pb] : b.worlds()) law[bag_union(da, db)] += pa * pb;
  std::vector<ExplicitWorldPdb::World> worlds(law.begin(), law.end());
  return ExplicitWorldPdb::from_weighted(std::move(worlds));
}

}  // namespace ipdb
