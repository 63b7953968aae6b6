#include "ipdb/factspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ipdb {

MassBound MassBound::around(double value, double rel_err) {
  if (!std::isfinite(value)) return unbounded();
  double slack = std::abs(value) * rel_err + 1e-300;
  Rational lo(std::max(0.0, value - slack));
  Rational hi(value + slack);
  return {lo, hi};
}

//===----------------------------------------------------------------------===//

FactTemplate::FactTemplate(std::string relation, std::vector<Slot> slots,
                           std::int64_t offset)
    : relation_(std::move(relation)), slots_(std::move(slots)), offset_(offset) {
  if (std::none_of(slots_.begin(), slots_.end(),
                   [](const Slot& s) { return s.is_index; }))
    throw Error(ErrorCode::InvalidArgument,
                "fact template for '" + relation_ + "' has no index slot");
}

Fact FactTemplate::at(std::uint64_t j) const {
  std::vector<UniverseElem> args;
  args.reserve(slots_.size());
  for (const auto& s : slots_)
    args.push_back(s.is_index ? UniverseElem(static_cast<std::int64_t>(j) + offset_)
                              : s.constant);
  return Fact(relation_, std::move(args));
}

std::optional<std::uint64_t> FactTemplate::match(const Fact& fact) const {
  if (fact.relation != relation_ || fact.arity() != slots_.size())
    return std::nullopt;
  std::optional<std::int64_t> value;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    const auto& arg = fact.args[k];
    if (!slots_[k].is_index) {
      if (!(arg == slots_[k].constant)) return std::nullopt;
      continue;
    }
    if (arg.tag() != ElemTag::Integer) return std::nullopt;
    if (value && *value != arg.as_integer()) return std::nullopt;
    value = arg.as_integer();
  }
  std::int64_t j = *value - offset_;
  if (j < 1) return std::nullopt;
  return static_cast<std::uint64_t>(j);
}

bool FactTemplate::may_overlap(const FactTemplate& other) const {
  if (relation_ != other.relation_ || slots_.size() != other.slots_.size())
    return false;
  // Unknown argument values x (this) and y (other) at the index slots.
  std::optional<std::int64_t> x, y;
  bool linked = false;
  auto pin = [](std::optional<std::int64_t>& var, std::int64_t v) {
    if (var && *var != v) return false;
    var = v;
    return true;
  };
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    const Slot& s = slots_[k];
    const Slot& t = other.slots_[k];
    if (!s.is_index && !t.is_index) {
      if (!(s.constant == t.constant)) return false;
    } else if (s.is_index && t.is_index) {
      linked = true;
    } else {
      const UniverseElem& c = s.is_index ? t.constant : s.constant;
      if (c.tag() != ElemTag::Integer) return false;
      if (!pin(s.is_index ? x : y, c.as_integer())) return false;
    }
  }
  const std::int64_t x_min = 1 + offset_, y_min = 1 + other.offset_;
  if (linked) {
    if (x && y && *x != *y) return false;
    std::int64_t v = x ? *x : y ? *y : std::max(x_min, y_min);
    return v >= x_min && v >= y_min;
  }
  return (!x || *x >= x_min) && (!y || *y >= y_min);
}

FactTemplate FactTemplate::shifted(std::int64_t extra) const {
  return FactTemplate(relation_, slots_, offset_ + extra);
}

//===----------------------------------------------------------------------===//

namespace {

Rational pow_q(const Rational& q, std::uint64_t e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  return Rational(num, den);
}

}  // namespace

Rational GeometricTail::weight(std::uint64_t j) const { return a * pow_q(q, j); }

std::optional<Rational> GeometricTail::mass_after(std::uint64_t m) const {
  if (a == 0) return Rational(0);
  if (q >= 1) return std::nullopt;
  return Rational(a * pow_q(q, m + 1) / (1 - q));
}

//===----------------------------------------------------------------------===//

FactFamily::FactFamily(std::vector<Entry> prefix, std::optional<GeometricTail> tail)
    : prefix_(std::move(prefix)), tail_(std::move(tail)) {
  std::set<Fact> seen;
  for (const auto& [f, w] : prefix_) {
    if (w < 0)
      throw Error(ErrorCode::InvalidProbability,
                  f.to_string() + " has negative weight " + to_string(w));
    if (!seen.insert(f).second)
      throw Error(ErrorCode::InvalidArgument, f.to_string() + " listed twice");
    if (tail_ && tail_->generator.match(f))
      throw Error(ErrorCode::InvalidArgument,
                  f.to_string() + " is also generated by the tail");
  }
  if (tail_ && (tail_->a < 0 || tail_->q <= 0))
    throw Error(ErrorCode::InvalidArgument,
                "geometric tail needs a >= 0 and q > 0");
}

Fact FactFamily::fact_at(std::uint64_t i) const {
  if (i == 0) throw Error(ErrorCode::InvalidArgument, "family indices start at 1");
  if (i <= prefix_.size()) return prefix_[i - 1].first;
  if (!tail_) throw Error(ErrorCode::InvalidArgument, "index past end of family");
  return tail_->generator.at(i - prefix_.size());
}

Rational FactFamily::weight_at(std::uint64_t i) const {
  if (i == 0) throw Error(ErrorCode::InvalidArgument, "family indices start at 1");
  if (i <= prefix_.size()) return prefix_[i - 1].second;
  if (!tail_) throw Error(ErrorCode::InvalidArgument, "index past end of family");
  return tail_->weight(i - prefix_.size());
}

std::optional<std::uint64_t> FactFamily::index_of(const Fact& f) const {
  for (std::size_t i = 0; i < prefix_.size(); ++i)
    if (prefix_[i].first == f) return i + 1;
  if (tail_)
    if (auto j = tail_->generator.match(f)) return *j + prefix_.size();
  return std::nullopt;
}

std::optional<Rational> FactFamily::max_weight() const {
  Rational best = 0;
  for (const auto& e : prefix_) best = std::max(best, e.second);
  if (tail_ && tail_->a > 0) {
    if (tail_->q > 1) return std::nullopt;
    best = std::max(best, Rational(tail_->a * tail_->q));
  }
  return best;
}

FactFamily FactFamily::truncated(std::uint64_t n) const {
  std::vector<Entry> out;
  std::uint64_t limit = is_finite() ? std::min<std::uint64_t>(n, prefix_.size()) : n;
  out.reserve(limit);
  for (std::uint64_t i = 1; i <= limit; ++i) out.push_back({fact_at(i), weight_at(i)});
  return FactFamily(std::move(out));
}

bool FactFamily::overlaps(const FactFamily& other) const {
  std::set<Fact> mine;
  for (const auto& e : prefix_) mine.insert(e.first);
  for (const auto& e : other.prefix_)
    if (mine.count(e.first) || (tail_ && tail_->generator.match(e.first)))
      return true;
  if (other.tail_) {
    for (const auto& f : mine)
      if (other.tail_->generator.match(f)) return true;
    if (tail_ && tail_->generator.may_overlap(other.tail_->generator)) return true;
  }
  return false;
}

//===----------------------------------------------------------------------===//

Rational marginal_of(const FactFamily& fam, const Fact& f) {
  auto i = fam.index_of(f);
  return i ? fam.weight_at(*i) : Rational(0);
}

MassBound total_mass(const FactFamily& fam) { return tail_mass(fam, 0); }

MassBound tail_mass(const FactFamily& fam, std::uint64_t n) {
  const auto& prefix = fam.prefix();
  Rational head = 0;
  for (std::uint64_t i = n; i < prefix.size(); ++i) head += prefix[i].second;
  if (!fam.tail()) return MassBound::exact(head);
  std::uint64_t consumed = n > prefix.size() ? n - prefix.size() : 0;
  auto rest = fam.tail()->mass_after(consumed);
  if (!rest) return MassBound::unbounded(head);
  return MassBound::exact(head + *rest);
}

std::uint64_t truncation_index(const FactFamily& fam, const Rational& eps) {
  if (eps <= 0)
    throw Error(ErrorCode::InvalidArgument, "truncation needs eps > 0");
  if (!total_mass(fam).finite())
    throw Error(ErrorCode::NonconvergentFamily,
                "tail mass of the family does not converge to 0");
  // Suffix sums over the prefix, then closed-form tail masses.
  const std::uint64_t k = fam.prefix().size();
  Rational tail_total = fam.tail() ? *fam.tail()->mass_after(0) : Rational(0);
  std::vector<Rational> suffix(k + 1, tail_total);
  for (std::uint64_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + fam.prefix()[i].second;
  for (std::uint64_t n = 0; n <= k; ++n)
    if (suffix[n] <= eps) return n;
  const GeometricTail& tail = *fam.tail();
  Rational r = tail_total;
  for (std::uint64_t m = 1;; ++m) {
    r *= tail.q;  // mass_after(m) = mass_after(m - 1) * q
    if (r <= eps) return k + m;
  }
}

//===----------------------------------------------------------------------===//

bool IndexSelection::contains(std::uint64_t i) const {
  if (all_from && i >= *all_from) return true;
  return std::find(indices.begin(), indices.end(), i) != indices.end();
}

FactFamily select(const FactFamily& fam, const IndexSelection& keep) {
  const std::uint64_t k = fam.prefix().size();
  std::set<std::uint64_t> finite(keep.indices.begin(), keep.indices.end());
  if (finite.count(0))
    throw Error(ErrorCode::InvalidArgument, "family indices start at 1");

  std::uint64_t explicit_end = k;  // indices materialized into the new prefix
  if (fam.tail()) {
    if (keep.all_from) {
      explicit_end = std::max<std::uint64_t>(k, *keep.all_from - 1);
    } else if (!finite.empty()) {
      explicit_end = std::max(k, *finite.rbegin());
    }
  } else if (!finite.empty() && *finite.rbegin() > k) {
    throw Error(ErrorCode::InvalidArgument, "index past end of family");
  }

  std::vector<FactFamily::Entry> prefix;
  for (std::uint64_t i = 1; i <= explicit_end; ++i)
    if (keep.contains(i)) prefix.push_back({fam.fact_at(i), fam.weight_at(i)});

  std::optional<GeometricTail> tail;
  if (fam.tail() && keep.all_from) {
    const GeometricTail& t = *fam.tail();
    std::uint64_t shift = explicit_end - k;
    tail = GeometricTail{t.generator.shifted(static_cast<std::int64_t>(shift)),
                         t.a * pow_q(t.q, shift), t.q};
  }
  return FactFamily(std::move(prefix), std::move(tail));
}

}  // namespace ipdb
