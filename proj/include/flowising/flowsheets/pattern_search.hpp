#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"

namespace flowising {

struct Evaluation {
  double score = std::numeric_limits<double>::infinity();
  bool ok = false;
  std::string status = "ok";
};

struct PatternSearchOptions {
  std::size_t num_starts = 20;
  double shrink = 0.5;
  double min_mesh = 1e-6;
  double initial_mesh_fraction = 0.25;  // of the widest parameter range
};

struct PatternSearchResult {
  std::vector<double> best_params;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::string status;  // "ok" or "no-feasible-evaluation"
  // Last rejected point and the evaluator's status for it.
  std::vector<double> failing_params;
  std::string failure_status;
};

// Multi-start coordinate pattern search on a box. Polls +/- mesh along each
// coordinate (trial points are projected onto the box), moves to the first
// improving point, halves the mesh after a failed poll, and ends a start once
// a poll fails at mesh below `min_mesh`. Points the evaluator rejects are
// discarded (extreme barrier). Start 0 is the box centre; every further start
// is drawn uniformly from the seeded generator, redrawing until the evaluator
// accepts a point or the budget runs out. `budget` truncates this fixed
// sequence of evaluations, so the best score never gets worse as the budget
// grows.
inline PatternSearchResult pattern_search(const std::function<Evaluation(std::span<const double>)>& f,
                                          std::span<const double> lower, std::span<const double> upper,
                                          std::size_t budget, std::uint64_t seed,
                                          const PatternSearchOptions& opts = {}) {
  require_length(upper.size(), lower.size(), "upper bounds");
  if (budget < 1) throw ArgumentError("evaluation budget must be at least 1");
  const std::size_t dim = lower.size();
  double widest = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(lower[k] <= upper[k])) throw ArgumentError("lower bound exceeds upper bound");
    widest = std::max(widest, upper[k] - lower[k]);
  }

  PatternSearchResult res;
  res.status = "no-feasible-evaluation";
  auto evaluate = [&](const std::vector<double>& x) -> Evaluation {
    ++res.evaluations;
    Evaluation e = f(x);
    if (e.ok) {
      if (e.score < res.best_score) {
        res.best_score = e.score;
        res.best_params = x;
        res.status = "ok";
      }
    } else {
      res.failing_params = x;
      res.failure_status = e.status;
    }
    return e;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t start = 0; start < opts.num_starts && res.evaluations < budget; ++start) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = start == 0 ? 0.5 * (lower[k] + upper[k]) : lower[k] + unif(rng) * (upper[k] - lower[k]);
    }
    Evaluation cur = evaluate(x);
    while (!cur.ok && start > 0 && res.evaluations < budget) {
      for (std::size_t k = 0; k < dim; ++k) x[k] = lower[k] + unif(rng) * (upper[k] - lower[k]);
      cur = evaluate(x);
    }
    if (!cur.ok) continue;
    if (dim == 0 || widest == 0.0) break;

    double mesh = opts.initial_mesh_fraction * widest;
    while (res.evaluations < budget) {
      bool improved = false;
      for (std::size_t k = 0; k < dim && !improved && res.evaluations < budget; ++k) {
        for (const double dir : {1.0, -1.0}) {
          if (res.evaluations >= budget) break;
          std::vector<double> trial = x;
          trial[k] = std::clamp(x[k] + dir * mesh, lower[k], upper[k]);
          if (trial[k] == x[k]) continue;
          Evaluation e = evaluate(trial);
          if (e.ok && e.score < cur.score) {
            x = std::move(trial);
            cur = e;
            improved = true;
            break;
          }
        }
      }
      if (improved) continue;
      if (res.evaluations >= budget) break;
      if (mesh < opts.min_mesh) break;
      mesh *= opts.shrink;
    }
  }
  return res;
}

// Opaque evaluator standing in for an external process simulator. Scores are
// minimized; callers negate quantities they want to maximize.
struct BlackBoxObjective {
  std::function<Evaluation(const Bits& configuration, std::span<const double> params)> evaluate;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t budget = 1000;
};

inline PatternSearchResult run_blackbox(const BlackBoxObjective& objective, const Bits& configuration,
                                        std::uint64_t seed, const PatternSearchOptions& opts = {}) {
  if (!objective.evaluate) throw ArgumentError("black-box objective has no evaluator");
  return pattern_search([&](std::span<const double> p) { return objective.evaluate(configuration, p); },
                        objective.lower, objective.upper, objective.budget, seed, opts);
}

}  // namespace flowising
