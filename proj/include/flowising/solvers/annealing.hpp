#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/qubo.hpp"
#include "flowising/sample_set.hpp"

namespace flowising {

struct SaParams {
  std::size_t num_reads = 1000;
  std::size_t num_sweeps = 1000;
  // Geometric schedule endpoints; derived from the model when absent.
  std::optional<double> beta_hot;
  std::optional<double> beta_cold;
  std::uint64_t seed = 0;
  std::size_t num_threads = 0;  // 0: hardware concurrency
};

struct BetaRange {
  double hot = 0.1;
  double cold = 10.0;
};

// beta_hot = 0.1 / max single-flip |dE|, beta_cold = 10 / smallest nonzero |coefficient|.
inline BetaRange default_beta_range(const QuboModel& model) {
  QuboAdjacency adj(model);
  double max_delta = 0.0;
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < adj.size(); ++i) {
    double d = std::abs(adj.linear[i]);
    if (d > 1e-12) min_delta = std::min(min_delta, d);
    for (std::size_t k = adj.row_start[i]; k < adj.row_start[i + 1]; ++k) {
      const double w = std::abs(adj.weight[k]);
      d += w;
      if (w > 1e-12) min_delta = std::min(min_delta, w);
    }
    max_delta = std::max(max_delta, d);
  }
  if (max_delta <= 0.0 || !std::isfinite(min_delta)) return {};
  return {0.1 / max_delta, 10.0 / min_delta};
}

inline std::vector<double> geometric_schedule(double hot, double cold, std::size_t steps) {
  std::vector<double> betas(steps);
  if (steps == 1) {
    betas[0] = cold;
    return betas;
  }
  const double ratio = std::pow(cold / hot, 1.0 / static_cast<double>(steps - 1));
  double b = hot;
  for (std::size_t k = 0; k < steps; ++k, b *= ratio) betas[k] = b;
  betas.back() = cold;
  return betas;
}

namespace detail {

// One read: random start, then num_sweeps sequential single-flip Metropolis
// sweeps. Each read owns its generator so reads are independent of
// scheduling.
inline Bits anneal_one(const QuboAdjacency& adj, const std::vector<double>& betas, std::uint64_t seed,
                       std::uint64_t read) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(read), static_cast<std::uint32_t>(read >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = adj.size();
  Bits x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1U);
  std::vector<double> field(adj.linear);
  for (std::size_t v = 0; v < n; ++v) {
    if (!x[v]) continue;
    for (std::size_t k = adj.row_start[v]; k < adj.row_start[v + 1]; ++k) field[adj.col[k]] += adj.weight[k];
  }
  for (const double beta : betas) {
    for (std::size_t v = 0; v < n; ++v) {
      const double delta = x[v] ? -field[v] : field[v];
      if (delta > 0.0 && unif(rng) >= std::exp(-beta * delta)) continue;
      const double d = x[v] ? -1.0 : 1.0;
      x[v] ^= 1U;
      for (std::size_t k = adj.row_start[v]; k < adj.row_start[v + 1]; ++k) field[adj.col[k]] += d * adj.weight[k];
    }
  }
  return x;
}

}  // namespace detail

inline SampleSet simulated_annealing(const QuboModel& model, const SaParams& params = {}) {
  if (params.num_reads < 1 || params.num_sweeps < 1) throw ArgumentError("reads and sweeps must be at least 1");
  BetaRange range = default_beta_range(model);
  if (params.beta_hot) range.hot = *params.beta_hot;
  if (params.beta_cold) range.cold = *params.beta_cold;
  if (!(range.hot > 0.0) || !(range.hot < range.cold)) {
    throw ArgumentError("beta schedule needs 0 < beta_hot < beta_cold");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const QuboAdjacency adj(model);
  const auto betas = geometric_schedule(range.hot, range.cold, params.num_sweeps);

  std::vector<Bits> finals(params.num_reads);
  std::size_t threads = params.num_threads ? params.num_threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, params.num_reads);
  auto work = [&](std::size_t first, std::size_t last) {
    for (std::size_t r = first; r < last; ++r) finals[r] = detail::anneal_one(adj, betas, params.seed, r);
  };
  if (threads == 1) {
    work(0, params.num_reads);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (params.num_reads + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t first = t * chunk;
      const std::size_t last = std::min(params.num_reads, first + chunk);
      if (first < last) pool.emplace_back(work, first, last);
    }
  }

  SampleSet s;
  s.solver = "sa";
  s.seed = params.seed;
  for (auto& x : finals) {
    const double e = energy(model, x);
    s.records.push_back({std::move(x), e, std::nullopt, true, 1});
  }
  s.canonicalize();
  s.tau_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.metadata["num_reads"] = params.num_reads;
  s.metadata["num_sweeps"] = params.num_sweeps;
  s.metadata["beta_schedule"] = {{"type", "geometric"}, {"beta_hot", range.hot}, {"beta_cold", range.cold}};
  return s;
}

}  // namespace flowising
