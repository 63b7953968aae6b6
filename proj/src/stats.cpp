#include "ipdb/stats.hpp"

#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "ipdb/error.hpp"

namespace ipdb::stats {

double hoeffding_half_width(std::uint64_t n, double confidence) {
  if (n == 0 || !(confidence > 0 && confidence < 1))
    throw Error(ErrorCode::InvalidArgument, "hoeffding needs n >= 1 and confidence in (0,1)");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

double poisson_pmf(std::uint64_t k, double rate) {
  if (rate == 0) return k == 0 ? 1.0 : 0.0;
  double k_d = static_cast<double>(k);
  return std::exp(k_d * std::log(rate) - rate - std::lgamma(k_d + 1));
}

ChiSquareFit chi_square_poisson(std::span<const std::uint64_t> counts, double rate,
                                double significance) {
  ChiSquareFit fit;
  const double n = static_cast<double>(counts.size());
  if (counts.empty()) return fit;

  std::map<std::uint64_t, double> observed;
  for (auto c : counts) observed[c] += 1;

  // Keep leading bins while the remaining tail still has expected mass >= 5.
  std::vector<double> expected, seen;
  double cdf = 0;
  std::uint64_t k = 0;
  while (true) {
    double e = n * poisson_pmf(k, rate);
    double rest = n * (1 - cdf - poisson_pmf(k, rate));
    if (e < 5 || rest < 5) break;
    expected.push_back(e);
    seen.push_back(observed.count(k) ? observed[k] : 0.0);
    cdf += poisson_pmf(k, rate);
    ++k;
  }
  double tail_seen = 0;
  for (const auto& [value, c] : observed)
    if (value >= k) tail_seen += c;
  expected.push_back(n * std::max(0.0, 1 - cdf));
  seen.push_back(tail_seen);

  fit.dof = static_cast<int>(expected.size()) - 1;
  if (fit.dof < 1) return fit;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    double d = seen[i] - expected[i];
    fit.statistic += d * d / expected[i];
  }
  boost::math::chi_squared dist(fit.dof);
  fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.statistic));
  fit.pass = fit.p_value >= significance;
  return fit;
}

CovarianceCheck covariance(std::span<const double> x, std::span<const double> y) {
  CovarianceCheck out;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return out;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sum = 0, sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = (x[i] - mx) * (y[i] - my);
    sum += p;
    sum_sq += p * p;
  }
  double nd = static_cast<double>(n);
  out.covariance = sum / (nd - 1);
  double mean_p = sum / nd;
  double var_p = (sum_sq / nd - mean_p * mean_p) * nd / (nd - 1);
  out.std_error = std::sqrt(std::max(var_p, 0.0) / nd);
  out.z = out.std_error > 0 ? out.covariance / out.std_error : 0.0;
  return out;
}

}  // namespace ipdb::stats
