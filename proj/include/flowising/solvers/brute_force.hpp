#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/ip.hpp"
#include "flowising/qubo.hpp"
#include "flowising/sample_set.hpp"
#include "flowising/solvers/exact.hpp"

namespace flowising {

struct BruteForceOptions {
  // QUBO: keep only this many lowest-energy records (0 keeps all 2^n).
  std::size_t keep_lowest = 0;
  // Program: also keep infeasible assignments as records.
  bool include_infeasible = false;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void check_exhaustive_bound(std::size_t n) {
  if (n > kMaxExhaustiveVars) {
    throw ExhaustionError("brute force over " + std::to_string(n) + " variables exceeds the bound of " +
                          std::to_string(kMaxExhaustiveVars));
  }
}

}  // namespace detail

inline SampleSet brute_force(const QuboModel& model, const BruteForceOptions& opts = {}) {
  const std::size_t n = model.num_vars();
  detail::check_exhaustive_bound(n);
  const auto t0 = std::chrono::steady_clock::now();

  QuboAdjacency adj(model);
  Bits x(n, 0);
  std::vector<double> field(adj.linear);
  double e = model.offset();

  auto record_less = [](const SampleRecord& a, const SampleRecord& b) {
    return a.energy < b.energy || (a.energy == b.energy && lex_less(a.assignment, b.assignment));
  };
  std::priority_queue<SampleRecord, std::vector<SampleRecord>, decltype(record_less)> heap(record_less);
  std::vector<SampleRecord> all;

  auto emit = [&]() {
    if (opts.keep_lowest == 0) {
      all.push_back({x, e, std::nullopt, true, 1});
    } else if (heap.size() < opts.keep_lowest) {
      heap.push({x, e, std::nullopt, true, 1});
    } else if (record_less(SampleRecord{x, e, std::nullopt, true, 1}, heap.top())) {
      heap.pop();
      heap.push({x, e, std::nullopt, true, 1});
    }
  };

  emit();
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < count; ++t) {
    const auto v = static_cast<std::size_t>(std::countr_zero(t));
    const double d = x[v] ? -1.0 : 1.0;
    e += d * field[v];
    x[v] ^= 1U;
    for (std::size_t k = adj.row_start[v]; k < adj.row_start[v + 1]; ++k) field[adj.col[k]] += d * adj.weight[k];
    emit();
  }

  SampleSet s;
  s.solver = "oracle";
  s.deterministic = true;
  if (opts.keep_lowest == 0) {
    s.records = std::move(all);
  } else {
    while (!heap.empty()) {
      s.records.push_back(heap.top());
      heap.pop();
    }
  }
  for (auto& r : s.records) r.energy = energy(model, r.assignment);
  s.canonicalize();
  s.tau_seconds = detail::seconds_since(t0);
  s.metadata["total_enumerated"] = count;
  return s;
}

// Enumerates every assignment of the program. Feasible assignments become
// records (energy = objective); infeasible ones are only counted unless
// include_infeasible is set.
inline SampleSet brute_force(const BinaryProgram& program, const BruteForceOptions& opts = {}) {
  validate(program);
  const std::size_t n = program.num_vars();
  detail::check_exhaustive_bound(n);
  const auto t0 = std::chrono::steady_clock::now();

  IncrementalEvaluator eval(program);
  SampleSet s;
  s.solver = "oracle";
  s.deterministic = true;
  std::uint64_t feasible = 0;
  auto emit = [&]() {
    if (eval.feasible()) {
      ++feasible;
      const double obj = objective_value(program, eval.assignment());
      s.records.push_back({eval.assignment(), obj, obj, true, 1});
    } else if (opts.include_infeasible) {
      const double obj = objective_value(program, eval.assignment());
      s.records.push_back({eval.assignment(), obj, obj, false, 1});
    }
  };
  emit();
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < count; ++t) {
    eval.flip(static_cast<std::size_t>(std::countr_zero(t)));
    emit();
  }
  s.canonicalize();
  std::set<Bits> configs;
  for (const auto& r : s.records) {
    if (r.feasible) configs.insert(project(r.assignment, program.projection));
  }
  s.tau_seconds = detail::seconds_since(t0);
  s.metadata["total_enumerated"] = count;
  s.metadata["feasible_assignments"] = feasible;
  s.metadata["projected_feasible"] = configs.size();
  return s;
}

}  // namespace flowising
