#include "ipdb/poisson.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace ipdb {

double RateTail::rate(std::uint64_t j) const {
  double w = weights.weight(j).get_d();
  return from_presence ? -std::log1p(-w) : w;
}

std::optional<double> RateTail::rate_after(std::uint64_t m) const {
  auto mass = weights.mass_after(m);
  if (!mass) return std::nullopt;
  double r = mass->get_d();
  if (!from_presence) return r * (1 + 1e-15);
  // -ln(1 - x) <= x / (1 - x), and x <= w_{m+1} for every later weight.
  double largest = weights.weight(m + 1).get_d();
  if (largest >= 1) return std::numeric_limits<double>::infinity();
  return r / (1 - largest) * (1 + 1e-15);
}

double PoissonPdb::total_rate() const {
  double total = 0;
  for (const auto& e : rates_) total += e.second;
  if (tail_) total += *tail_->rate_after(0);
  return total;
}

MassBound PoissonPdb::total_rate_bound() const {
  double head = 0;
  for (const auto& e : rates_) head += e.second;
  if (!tail_) return MassBound::around(head, 1e-12);
  auto upper = MassBound::around(head + *tail_->rate_after(0), 1e-12).upper;
  return {MassBound::around(head, 1e-12).lower, upper};
}

std::optional<double> PoissonPdb::rate_of(const Fact& f) const {
  for (const auto& [g, r] : rates_)
    if (g == f) return r;
  if (tail_)
    if (auto j = tail_->weights.generator.match(f)) return tail_->rate(*j);
  return std::nullopt;
}

Fact PoissonPdb::fact_at(std::uint64_t i) const {
  if (i >= 1 && i <= rates_.size()) return rates_[i - 1].first;
  if (tail_ && i > rates_.size()) return tail_->weights.generator.at(i - rates_.size());
  throw Error(ErrorCode::InvalidArgument, "rate index out of range");
}

double PoissonPdb::rate_at(std::uint64_t i) const {
  if (i >= 1 && i <= rates_.size()) return rates_[i - 1].second;
  if (tail_ && i > rates_.size()) return tail_->rate(i - rates_.size());
  throw Error(ErrorCode::InvalidArgument, "rate index out of range");
}

std::uint64_t PoissonPdb::truncation(double delta) const {
  if (!tail_) return rates_.size();
  std::uint64_t m = 0;
  while (*tail_->rate_after(m) > delta) ++m;
  return rates_.size() + m;
}

PoissonPdb validate_poisson(std::vector<std::pair<Fact, double>> rates,
                            std::optional<RateTail> tail) {
  std::set<Fact> seen;
  for (const auto& [f, r] : rates) {
    if (!(r >= 0) || !std::isfinite(r))
      throw Error(ErrorCode::InvalidProbability,
                  f.to_string() + " has invalid rate " + std::to_string(r));
    if (!seen.insert(f).second)
      throw Error(ErrorCode::InvalidArgument, f.to_string() + " listed twice");
    if (tail && tail->weights.generator.match(f))
      throw Error(ErrorCode::InvalidArgument,
                  f.to_string() + " is also generated by the tail");
  }
  if (tail) {
    const auto& w = tail->weights;
    if (w.a < 0 || w.q <= 0)
      throw Error(ErrorCode::InvalidArgument, "rate tail needs a >= 0 and q > 0");
    if (!w.convergent())
      throw Error(ErrorCode::DivergentRates, "rates sum to infinity");
    if (tail->from_presence && w.a * w.q >= 1)
      throw Error(ErrorCode::AlmostSureFact, "presence probability 1 has no finite rate");
  }
  return PoissonPdb(std::move(rates), std::move(tail));
}

PoissonPdb validate_poisson(const FactFamily& rates) {
  std::vector<std::pair<Fact, double>> list;
  for (const auto& [f, r] : rates.prefix()) list.push_back({f, r.get_d()});
  std::optional<RateTail> tail;
  if (rates.tail()) tail = RateTail{*rates.tail(), false};
  return validate_poisson(std::move(list), std::move(tail));
}

BagProb bag_world_prob(const PoissonPdb& pdb, const BagInstance& d) {
  if (!pdb.is_finite())
    throw Error(ErrorCode::ModeMismatch, "bag probabilities need a finite rate list");
  double value = std::exp(-pdb.total_rate());
  std::uint64_t ops = pdb.rates().size() + 2;
  for (const auto& [f, k] : d.entries()) {
    auto rate = pdb.rate_of(f);
    if (!rate)
      throw Error(ErrorCode::FactOutsideFamily, f.to_string() + " has no rate");
    // lambda^k / k! as a running product keeps the rounding error linear in k.
    for (std::uint64_t m = 1; m <= k; ++m) value *= *rate / static_cast<double>(m);
    ops += 2 * k;
  }
  // Each operation contributes at most one unit roundoff; exp adds a few ulps
  // scaled by the magnitude of its argument.
  double u = std::numeric_limits<double>::epsilon() / 2;
  double rel = u * static_cast<double>(ops) + 4 * u * (1 + pdb.total_rate());
  return {value, rel};
}

BagInstance sample_poisson(const PoissonPdb& pdb, Rng& rng, const Rational& delta) {
  std::uint64_t n = pdb.truncation(delta.get_d());
  std::vector<BagInstance::Entry> entries;
  for (std::uint64_t i = 1; i <= n; ++i) {
    double rate = pdb.rate_at(i);
    if (rate <= 0) continue;
    std::poisson_distribution<std::uint64_t> draw(rate);
    if (auto k = draw(rng.engine())) entries.push_back({pdb.fact_at(i), k});
  }
  return BagInstance::from_entries(std::move(entries));
}

PoissonPdb dedup_rates_from_marginals(const TiPdb& ti) {
  const FactFamily& fam = ti.family();
  std::vector<std::pair<Fact, double>> rates;
  for (const auto& [f, p] : fam.prefix()) {
    if (p == 1)
      throw Error(ErrorCode::AlmostSureFact,
                  f.to_string() + " has marginal 1 and no finite rate");
    rates.push_back({f, -std::log1p(-p.get_d())});
  }
  std::optional<RateTail> tail;
  if (fam.tail()) tail = RateTail{*fam.tail(), true};
  return validate_poisson(std::move(rates), std::move(tail));
}

MassBound empty_prob(const PoissonPdb& pdb) {
  MassBound rate = pdb.total_rate_bound();
  double lo = std::exp(-rate.upper->get_d());
  double hi = std::exp(-rate.lower.get_d());
  auto a = MassBound::around(lo, 1e-12), b = MassBound::around(hi, 1e-12);
  Rational upper = *b.upper > 1 ? Rational(1) : *b.upper;
  return {a.lower, upper};
}

}  // namespace ipdb
