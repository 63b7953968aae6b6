#pragma once

#include <string>
#include <vector>

#include "ipdb/core.hpp"
#include "ipdb/random.hpp"
#include "ipdb/stats.hpp"

namespace ipdb {

// Half-open real interval [lo, hi).
struct Interval {
  double lo = 0;
  double hi = 0;

  double length() const { return hi > lo ? hi - lo : 0; }
};

// Finite intensity measure on the real line with piecewise-constant density,
// attached to a unary relation whose single argument is a real.
class PiecewiseIntensity {
 public:
  struct Piece {
    Interval span;
    double density = 0;
  };

  // Pieces must be well-formed (lo < hi), pairwise disjoint, with finite
  // non-negative densities. Pieces are kept sorted by left end.
  PiecewiseIntensity(std::string relation, std::vector<Piece> pieces);

  const std::string& relation() const { return relation_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  // lambda(R): total mass.
  double total() const { return total_; }

 private:
  std::string relation_;
  std::vector<Piece> pieces_;
  std::vector<double> cumulative_;  // mass of pieces [0, i]
  double total_ = 0;

  friend BagInstance sample_poisson_process(const PiecewiseIntensity&, Rng&);
};

// Mass of a finite union of intervals; overlapping targets are merged first.
double measure_of(const PiecewiseIntensity& intensity, const std::vector<Interval>& target);

// N ~ Poisson(total), then N i.i.d. points by inverse CDF over the density.
BagInstance sample_poisson_process(const PiecewiseIntensity& intensity, Rng& rng);

// Points of the relation that fall into the window (with multiplicity).
std::uint64_t count_in(const BagInstance& d, const std::string& relation, const Interval& window);

struct WindowReport {
  Interval window;
  double expected_rate = 0;  // lambda(window)
  double mean_count = 0;
  std::vector<double> pmf;   // empirical Pr[count = k], k = 0..max
  stats::ChiSquareFit fit;
};

struct CountReport {
  std::vector<WindowReport> windows;
  // covariances[i][j - i - 1] holds the pair (i, j) for i < j.
  std::vector<std::vector<stats::CovarianceCheck>> covariances;
};

// Per-window empirical count distribution, chi-square fit against
// Poisson(lambda(window)) at `significance`, and pairwise covariances.
// Windows must be pairwise disjoint (PreconditionViolated otherwise).
CountReport count_statistics(const std::vector<BagInstance>& samples,
                             const PiecewiseIntensity& intensity,
                             const std::vector<Interval>& windows,
                             double significance = 0.01);

}  // namespace ipdb
