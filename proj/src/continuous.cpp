#include "ipdb/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ipdb {

PiecewiseIntensity::PiecewiseIntensity(std::string relation, std::vector<Piece> pieces)
    : relation_(std::move(relation)), pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.span.lo < b.span.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (!(p.span.lo < p.span.hi) || !std::isfinite(p.span.lo) || !std::isfinite(p.span.hi))
      throw Error(ErrorCode::InvalidArgument, "intensity piece needs finite lo < hi");
    if (!(p.density >= 0) || !std::isfinite(p.density))
      throw Error(ErrorCode::InvalidArgument, "intensity density must be finite and >= 0");
    if (i > 0 && pieces_[i - 1].span.hi > p.span.lo)
      throw Error(ErrorCode::InvalidArgument, "intensity pieces overlap");
    total_ += p.density * p.span.length();
    cumulative_.push_back(total_);
  }
}

double measure_of(const PiecewiseIntensity& intensity, const std::vector<Interval>& target) {
  std::vector<Interval> spans;
  for (const auto& t : target)
    if (t.hi > t.lo) spans.push_back(t);
  std::sort(spans.begin(), spans.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, s.hi);
    else
      merged.push_back(s);
  }
  double mass = 0;
  for (const auto& m : merged)
    for (const auto& p : intensity.pieces()) {
      double overlap = std::min(m.hi, p.span.hi) - std::max(m.lo, p.span.lo);
      if (overlap > 0) mass += overlap * p.density;
    }
  return mass;
}

BagInstance sample_poisson_process(const PiecewiseIntensity& intensity, Rng& rng) {
  BagInstance out;
  if (intensity.total() <= 0) return out;
  std::poisson_distribution<std::uint64_t> count(intensity.total());
  const std::uint64_t n = count(rng.engine());
  const auto& pieces = intensity.pieces_;
  const auto& cumulative = intensity.cumulative_;
  std::vector<BagInstance::Entry> points;
  points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    double u = rng.uniform() * intensity.total();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t k = std::min<std::size_t>(it - cumulative.begin(), pieces.size() - 1);
    // Skip zero-density pieces that share a cumulative value with a later one.
    while (pieces[k].density == 0 && k + 1 < pieces.size()) ++k;
    const auto& piece = pieces[k];
    double before = k == 0 ? 0.0 : cumulative[k - 1];
    double x = piece.span.lo + (u - before) / piece.density;
    x = std::clamp(x, piece.span.lo, std::nextafter(piece.span.hi, piece.span.lo));
    points.push_back({Fact(intensity.relation(), {UniverseElem::real(x)}), 1});
  }
  return BagInstance::from_entries(std::move(points));
}

std::uint64_t count_in(const BagInstance& d, const std::string& relation, const Interval& window) {
  std::uint64_t n = 0;
  for (const auto& [f, m] : d.entries()) {
    if (f.relation != relation || f.arity() != 1 || f.args[0].tag() != ElemTag::Real) continue;
    double x = f.args[0].as_real();
    if (x >= window.lo && x < window.hi) n += m;
  }
  return n;
}

CountReport count_statistics(const std::vector<BagInstance>& samples,
                             const PiecewiseIntensity& intensity,
                             const std::vector<Interval>& windows, double significance) {
  for (std::size_t i = 0; i < windows.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::min(windows[i].hi, windows[j].hi) > std::max(windows[i].lo, windows[j].lo))
        throw Error(ErrorCode::PreconditionViolated, "count windows must be disjoint");

  CountReport report;
  if (samples.empty()) return report;

  std::vector<std::vector<std::uint64_t>> counts(windows.size());
  std::vector<std::vector<double>> as_real(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    counts[w].reserve(samples.size());
    for (const auto& d : samples) {
      counts[w].push_back(count_in(d, intensity.relation(), windows[w]));
      as_real[w].push_back(static_cast<double>(counts[w].back()));
    }
  }

  const double n = static_cast<double>(samples.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    WindowReport wr;
    wr.window = windows[w];
    wr.expected_rate = measure_of(intensity, {windows[w]});
    std::uint64_t top = *std::max_element(counts[w].begin(), counts[w].end());
    wr.pmf.assign(top + 1, 0.0);
    double sum = 0;
    for (auto c : counts[w]) {
      wr.pmf[c] += 1 / n;
      sum += static_cast<double>(c);
    }
    wr.mean_count = sum / n;
    wr.fit = stats::chi_square_poisson(counts[w], wr.expected_rate, significance);
    report.windows.push_back(std::move(wr));
  }

  report.covariances.resize(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    for (std::size_t j = i + 1; j < windows.size(); ++j)
      report.covariances[i].push_back(stats::covariance(as_real[i], as_real[j]));
  return report;
}

}  // namespace ipdb
