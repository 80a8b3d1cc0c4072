#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/ip.hpp"
#include "flowising/sample_set.hpp"

namespace flowising {

enum class BbMode { optimal, enumerate_all, pool };

struct BbOptions {
  BbMode mode = BbMode::optimal;
  std::size_t pool_size = 0;  // k for BbMode::pool
};

namespace detail {

// Depth-first search over a binary program. Variables are fixed in index
// order, the 1-branch first. A partial assignment is abandoned as soon as some
// constraint touching the last fixed variable can no longer be met by any
// completion.
class BbSearch {
public:
  explicit BbSearch(const BinaryProgram& p) : p_(p), vals_(p.num_vars(), -1), touching_(p.num_vars()) {
    for (std::size_t c = 0; c < p.constraints.size(); ++c) {
      const auto& con = p.constraints[c];
      for (const auto& [i, a] : con.linear) touching_[i].push_back(c);
      for (const auto& pr : con.products) {
        touching_[pr.i].push_back(c);
        touching_[pr.j].push_back(c);
      }
    }
    for (auto& t : touching_) {
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
  }

  struct Solution {
    Bits assignment;
    double objective = 0.0;
  };

  // Provably optimal assignment; ties go to the lexicographically smallest.
  std::optional<Solution> solve_optimal() {
    best_.reset();
    nodes_ = 0;
    for (const auto& con : p_.constraints) {
      if (!can_satisfy(con)) return std::nullopt;
    }
    dfs_optimal(0);
    return best_;
  }

  // Every feasible leaf, no objective pruning.
  template <class F>
  void for_each_feasible(F&& f) {
    nodes_ = 0;
    for (const auto& con : p_.constraints) {
      if (!can_satisfy(con)) return;
    }
    dfs_all(0, f);
  }

  std::uint64_t nodes() const { return nodes_; }

private:
  static constexpr double tol = 1e-9;

  bool can_satisfy(const Constraint& con) const {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& [i, a] : con.linear) {
      if (vals_[i] < 0) {
        lo += std::min(0.0, a);
        hi += std::max(0.0, a);
      } else if (vals_[i]) {
        lo += a;
        hi += a;
      }
    }
    for (const auto& pr : con.products) {
      const int a = vals_[pr.i];
      const int b = vals_[pr.j];
      if (a == 0 || b == 0) continue;
      if (a == 1 && b == 1) {
        lo += pr.coeff;
        hi += pr.coeff;
      } else {
        lo += std::min(0.0, pr.coeff);
        hi += std::max(0.0, pr.coeff);
      }
    }
    switch (con.sense) {
      case Sense::eq: return lo <= con.rhs + tol && hi >= con.rhs - tol;
      case Sense::le: return lo <= con.rhs + tol;
      case Sense::ge: return hi >= con.rhs - tol;
    }
    return false;
  }

  bool consistent_after(std::size_t v) const {
    for (auto c : touching_[v]) {
      if (!can_satisfy(p_.constraints[c])) return false;
    }
    return true;
  }

  // Fixed objective plus the most negative contribution of anything unfixed.
  double objective_bound() const {
    double b = p_.objective.constant;
    for (const auto& [i, c] : p_.objective.linear) {
      if (vals_[i] < 0) b += std::min(0.0, c);
      else if (vals_[i]) b += c;
    }
    for (const auto& pr : p_.objective.products) {
      const int a = vals_[pr.i];
      const int d = vals_[pr.j];
      if (a == 0 || d == 0) continue;
      b += (a == 1 && d == 1) ? pr.coeff : std::min(0.0, pr.coeff);
    }
    return b;
  }

  // True when no completion of the current prefix can be lexicographically
  // smaller than the incumbent.
  bool prefix_not_smaller(std::size_t depth) const {
    for (std::size_t i = 0; i < depth; ++i) {
      if (static_cast<std::uint8_t>(vals_[i]) != best_->assignment[i]) {
        return static_cast<std::uint8_t>(vals_[i]) > best_->assignment[i];
      }
    }
    return true;
  }

  void dfs_optimal(std::size_t depth) {
    ++nodes_;
    if (best_) {
      const double bound = objective_bound();
      if (bound > best_->objective + tol) return;
      if (bound >= best_->objective - tol && prefix_not_smaller(depth)) return;
    }
    if (depth == p_.num_vars()) {
      Bits x(vals_.begin(), vals_.end());
      const double obj = objective_value(p_, x);
      if (!best_ || obj < best_->objective - tol ||
          (obj <= best_->objective + tol && lex_less(x, best_->assignment))) {
        best_ = Solution{std::move(x), obj};
      }
      return;
    }
    for (const std::int8_t value : {std::int8_t{1}, std::int8_t{0}}) {
      vals_[depth] = value;
      if (consistent_after(depth)) dfs_optimal(depth + 1);
    }
    vals_[depth] = -1;
  }

  template <class F>
  void dfs_all(std::size_t depth, F& f) {
    ++nodes_;
    if (depth == p_.num_vars()) {
      Bits x(vals_.begin(), vals_.end());
      f(x, objective_value(p_, x));
      return;
    }
    for (const std::int8_t value : {std::int8_t{1}, std::int8_t{0}}) {
      vals_[depth] = value;
      if (consistent_after(depth)) dfs_all(depth + 1, f);
    }
    vals_[depth] = -1;
  }

  const BinaryProgram& p_;
  std::vector<std::int8_t> vals_;
  std::vector<std::vector<std::size_t>> touching_;
  std::optional<Solution> best_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

// `optimal`: one optimal assignment. `enumerate_all`: re-solve with a no-good
// cut over the projection after every solution until infeasible. `pool`:
// a single exhaustive search keeping the k best projection-distinct solutions.
inline SampleSet branch_and_bound(const BinaryProgram& program, const BbOptions& opts = {}) {
  validate(program);
  const auto t0 = std::chrono::steady_clock::now();
  SampleSet s;
  s.deterministic = true;
  std::uint64_t nodes = 0;

  switch (opts.mode) {
    case BbMode::optimal: {
      s.solver = "bb";
      detail::BbSearch search(program);
      auto sol = search.solve_optimal();
      nodes = search.nodes();
      if (sol) s.records.push_back({sol->assignment, sol->objective, sol->objective, true, 1});
      s.metadata["status"] = sol ? "optimal" : "infeasible";
      break;
    }
    case BbMode::enumerate_all: {
      s.solver = "bb-enumerate";
      if (program.projection.empty()) throw ArgumentError("enumeration needs a non-empty projection");
      BinaryProgram work = program;
      std::uint64_t iterations = 0;
      while (true) {
        detail::BbSearch search(work);
        auto sol = search.solve_optimal();
        nodes += search.nodes();
        if (!sol) break;
        ++iterations;
        s.records.push_back({sol->assignment, sol->objective, sol->objective, true, 1});
        work.constraints.push_back(no_good_cut(sol->assignment, program.projection));
      }
      s.metadata["iterations"] = iterations;
      s.metadata["status"] = iterations ? "enumerated" : "infeasible";
      break;
    }
    case BbMode::pool: {
      s.solver = "bb-pool";
      if (opts.pool_size == 0) throw ArgumentError("pool size must be at least 1");
      std::map<Bits, detail::BbSearch::Solution> best_per_config;
      detail::BbSearch search(program);
      search.for_each_feasible([&](const Bits& x, double obj) {
        auto key = project(x, program.projection);
        auto it = best_per_config.find(key);
        if (it == best_per_config.end()) {
          best_per_config.emplace(std::move(key), detail::BbSearch::Solution{x, obj});
        } else if (obj < it->second.objective - 1e-9 ||
                   (obj <= it->second.objective + 1e-9 && lex_less(x, it->second.assignment))) {
          it->second = {x, obj};
        }
      });
      nodes = search.nodes();
      std::vector<detail::BbSearch::Solution> all;
      for (auto& [key, sol] : best_per_config) all.push_back(std::move(sol));
      std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.objective != b.objective) return a.objective < b.objective;
        return lex_less(a.assignment, b.assignment);
      });
      if (all.size() > opts.pool_size) all.resize(opts.pool_size);
      for (auto& sol : all) s.records.push_back({sol.assignment, sol.objective, sol.objective, true, 1});
      s.metadata["pool_size"] = opts.pool_size;
      s.metadata["status"] = all.empty() ? "infeasible" : "pool";
      break;
    }
  }
  s.canonicalize();
  s.tau_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.metadata["nodes"] = nodes;
  return s;
}

}  // namespace flowising
