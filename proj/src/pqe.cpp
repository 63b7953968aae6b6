#include "ipdb/pqe.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "ipdb/stats.hpp"

namespace ipdb {

std::uint64_t default_world_budget() {
  if (const char* env = std::getenv("IPDB_WORLD_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return std::uint64_t{1} << 24;
}

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, jobs) on a pool of threads.
void run_parallel(std::size_t jobs, unsigned workers, const std::function<void(std::size_t)>& job) {
  workers = worker_count(workers, jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_lock;
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < jobs;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Error over_budget(std::uint64_t needed_log2_or_count, bool is_log2, std::uint64_t budget,
                  const char* hint) {
  std::string size = is_log2 ? "2^" + std::to_string(needed_log2_or_count)
                             : std::to_string(needed_log2_or_count);
  return Error(ErrorCode::WorldBudgetExceeded,
               "needs " + size + " worlds, budget is " + std::to_string(budget) + hint);
}

PqeResult exact_result(Rational value, std::uint64_t worlds) {
  PqeResult r;
  r.value = value.get_d();
  r.exact = std::move(value);
  r.kind = ErrorKind::Exact;
  r.worlds_enumerated = worlds;
  return r;
}

// Enumerates the 2^k worlds of a finite TI list. The first `split` facts are
// fixed per job so jobs can run in parallel; partial sums are added in job
// order.
PqeResult enumerate_ti(const FactFamily& fam, const Query& q, const PqeOptions& opts) {
  const auto& facts = fam.prefix();
  const std::size_t k = facts.size();
  if (k >= 63 || (std::uint64_t{1} << k) > opts.world_budget)
    throw over_budget(k, true, opts.world_budget, "");

  const std::size_t split = std::min<std::size_t>(k, 8);
  const std::size_t jobs = std::size_t{1} << split;
  std::vector<Rational> partial(jobs, Rational(0));
  std::vector<std::uint64_t> visited(jobs, 0);

  run_parallel(jobs, opts.workers, [&](std::size_t job) {
    Rational head = 1;
    std::vector<BagInstance::Entry> chosen;
    for (std::size_t i = 0; i < split; ++i) {
      bool in = job >> i & 1;
      head *= in ? facts[i].second : Rational(1 - facts[i].second);
      if (in) chosen.push_back({facts[i].first, 1});
    }
    if (head == 0) return;
    Rational sum = 0;
    std::uint64_t count = 0;
    std::function<void(std::size_t, const Rational&)> walk = [&](std::size_t i, const Rational& p) {
      if (i == k) {
        ++count;
        if (eval_bool(q, BagInstance::from_entries(chosen))) sum += p;
        return;
      }
      const Rational& pf = facts[i].second;
      if (pf != 1) walk(i + 1, p * (1 - pf));
      if (pf != 0) {
        chosen.push_back({facts[i].first, 1});
        walk(i + 1, p * pf);
        chosen.pop_back();
      }
    };
    walk(split, head);
    partial[job] = std::move(sum);
    visited[job] = count;
  });

  Rational total = 0;
  std::uint64_t worlds = 0;
  for (std::size_t j = 0; j < jobs; ++j) {
    total += partial[j];
    worlds += visited[j];
  }
  return exact_result(std::move(total), worlds);
}

}  // namespace

PqeResult exact_pqe(const TiPdb& pdb, const Query& q, const PqeOptions& opts) {
  if (!pdb.family().is_finite())
    throw Error(ErrorCode::ModeMismatch,
                "exact evaluation needs a finite family; use approx_pqe");
  return enumerate_ti(pdb.family(), q, opts);
}

PqeResult exact_pqe(const BidPdb& pdb, const Query& q, const PqeOptions& opts) {
  if (!pdb.is_finite())
    throw Error(ErrorCode::ModeMismatch, "exact evaluation needs finitely many blocks");
  std::uint64_t count = world_count(pdb);
  if (count > opts.world_budget) throw over_budget(count, false, opts.world_budget, "");
  Rational total = 0;
  std::uint64_t worlds = 0;
  for_each_world(pdb, [&](const BagInstance& d, const Rational& p) {
    ++worlds;
    if (eval_bool(q, d)) total += p;
  });
  return exact_result(std::move(total), worlds);
}

PqeResult exact_pqe(const ExplicitWorldPdb& pdb, const Query& q, const PqeOptions& opts) {
  if (pdb.worlds().size() > opts.world_budget)
    throw over_budget(pdb.worlds().size(), false, opts.world_budget, "");
  Rational total = 0;
  for (const auto& [d, p] : pdb.worlds())
    if (eval_bool(q, d)) total += p;
  return exact_result(std::move(total), pdb.worlds().size());
}

PqeResult exact_pqe(const SuperposedPdb& pdb, const Query& q, const PqeOptions& opts) {
  if (!pdb.is_finite())
    throw Error(ErrorCode::ModeMismatch, "exact evaluation needs a finite superposition");
  std::uint64_t product = 1;
  for (const auto& c : pdb.components()) {
    std::uint64_t n = world_count(c);
    if (n != 0 && product > opts.world_budget / n)
      throw over_budget(opts.world_budget + 1, false, opts.world_budget, " or more");
    product *= n;
  }
  return exact_pqe(to_explicit(pdb), q, opts);
}

//===----------------------------------------------------------------------===//

PqeResult mc_pqe(const Sampler& sampler, const Query& q, std::uint64_t samples,
                 double confidence, std::uint64_t seed, unsigned workers) {
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "mc_pqe needs at least one sample");
  const double half_width = stats::hoeffding_half_width(samples, confidence);
  const double delta = half_width / 100;
  // Exact rational of the double, so the sampler cut is reproducible.
  const Rational delta_q(delta);

  constexpr std::uint64_t kChunk = 4096;
  const std::size_t chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  std::vector<std::uint64_t> hits(chunks, 0);
  const Rng root(seed);
  run_parallel(chunks, workers, [&](std::size_t c) {
    Rng rng = root.substream(c);
    std::uint64_t begin = c * kChunk, end = std::min(samples, begin + kChunk);
    std::uint64_t h = 0;
    for (std::uint64_t s = begin; s < end; ++s)
      if (eval_bool(q, sampler(rng, delta_q))) ++h;
    hits[c] = h;
  });

  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  PqeResult r;
  r.value = static_cast<double>(total) / static_cast<double>(samples);
  r.kind = ErrorKind::Hoeffding;
  r.eps = half_width + delta;
  r.confidence = confidence;
  r.samples_drawn = samples;
  r.sampler_delta = delta;
  return r;
}

Sampler sampler_for(const TiPdb& pdb) {
  return [pdb](Rng& rng, const Rational& delta) { return sample_ti(pdb, rng, delta); };
}

Sampler sampler_for(const BidPdb& pdb) {
  return [pdb](Rng& rng, const Rational& delta) { return sample_bid(pdb, rng, delta); };
}

Sampler sampler_for(const PoissonPdb& pdb) {
  return [pdb](Rng& rng, const Rational& delta) { return sample_poisson(pdb, rng, delta); };
}

Sampler sampler_for(const ExplicitWorldPdb& pdb) {
  return [pdb](Rng& rng, const Rational&) { return sample_explicit(pdb, rng); };
}

Sampler sampler_for(const SuperposedPdb& pdb) {
  return [pdb](Rng& rng, const Rational& delta) { return sample_superposed(pdb, rng, delta); };
}

//===----------------------------------------------------------------------===//

PqeResult approx_pqe(const TiPdb& pdb, const Query& q, const Rational& eps,
                     const PqeOptions& opts) {
  if (!(eps > 0 && eps < Rational(1, 2)))
    throw Error(ErrorCode::InvalidArgument, "approx_pqe needs 0 < eps < 1/2");
  const FactFamily& fam = pdb.family();
  const std::uint64_t n = truncation_index(fam, eps);
  if (n >= 63 || (std::uint64_t{1} << n) > opts.world_budget)
    throw over_budget(n, true, opts.world_budget,
                      "; use mc_pqe for a sampled estimate instead");

  IndexSelection first_n;
  for (std::uint64_t i = 1; i <= n; ++i) first_n.indices.push_back(i);
  TiPdb head = restrict_ti(pdb, first_n);
  PqeResult r = enumerate_ti(head.family(), q, opts);

  r.kind = ErrorKind::Additive;
  r.eps = eps.get_d();
  r.truncation_n = n;
  r.tail_mass = *tail_mass(fam, n).upper;
  Rational lower = 1 - *r.tail_mass;
  r.conditioning_mass_lower = lower < 0 ? Rational(0) : lower;
  return r;
}

}  // namespace ipdb
