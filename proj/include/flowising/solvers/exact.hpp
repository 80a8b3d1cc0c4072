#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/qubo.hpp"

namespace flowising {

inline constexpr std::size_t kMaxExhaustiveVars = 24;
inline constexpr std::size_t kMaxInnerComponent = 20;

// Exact minimisation of a QUBO by enumerating a chosen "outer" subset of
// variables and minimising the remaining "inner" variables exactly for every
// outer assignment. Once the outer bits are fixed the inner variables split
// into connected components that are independent of each other, so each
// component is enumerated on its own. With an empty inner set this is plain
// exhaustive enumeration.
//
// The reformulation lays out slack and auxiliary bits so that, with the
// program's own variables as the outer set, components are a handful of
// bits each.
class ConditionalMinimizer {
public:
  ConditionalMinimizer(const QuboModel& model, std::span<const std::size_t> outer,
                       std::size_t max_outer = kMaxExhaustiveVars,
                       std::size_t max_component = kMaxInnerComponent)
      : adj_(model), offset_(model.offset()), outer_(outer.begin(), outer.end()) {
    const std::size_t n = model.num_vars();
    if (outer_.size() > max_outer) {
      throw ExhaustionError("exhaustive enumeration over " + std::to_string(outer_.size()) +
                            " variables exceeds the bound of " + std::to_string(max_outer));
    }
    is_outer_.assign(n, 0);
    for (auto v : outer_) {
      if (v >= n) throw DimensionError("outer variable index out of range");
      if (is_outer_[v]) throw ArgumentError("outer variable listed twice");
      is_outer_[v] = 1;
    }
    build_components(max_component);
  }

  std::size_t outer_size() const { return outer_.size(); }

  // Calls f(flipped, outer_bits, min_energy) for all 2^m outer assignments in
  // Gray-code order. `flipped` is the position in the outer list that changed
  // since the previous call, or npos on the first (all-zero) call.
  template <class F>
  void for_each(F&& f) const {
    const std::size_t n = adj_.size();
    const std::size_t m = outer_.size();
    Bits x(n, 0);
    Bits outer_bits(m, 0);
    std::vector<double> field(adj_.linear);  // linear + contributions from outer ones
    double outer_energy = offset_;
    std::vector<Scratch> scratch(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) scratch[c].init(components_[c]);

    auto inner_min = [&]() {
      double total = 0.0;
      for (std::size_t c = 0; c < components_.size(); ++c) {
        total += scratch[c].minimum(components_[c], field);
      }
      return total;
    };

    f(npos, static_cast<const Bits&>(outer_bits), outer_energy + inner_min());
    const std::uint64_t count = std::uint64_t{1} << m;
    for (std::uint64_t t = 1; t < count; ++t) {
      const auto pos = static_cast<std::size_t>(std::countr_zero(t));
      const std::size_t v = outer_[pos];
      const double d = x[v] ? -1.0 : 1.0;
      outer_energy += d * field[v];
      x[v] ^= 1U;
      outer_bits[pos] ^= 1U;
      for (std::size_t k = adj_.row_start[v]; k < adj_.row_start[v + 1]; ++k) {
        field[adj_.col[k]] += d * adj_.weight[k];
      }
      f(pos, static_cast<const Bits&>(outer_bits), outer_energy + inner_min());
    }
  }

  // Lexicographically smallest minimising completion for the given outer bits.
  Bits completion(std::span<const std::uint8_t> outer_bits) const {
    require_length(outer_bits.size(), outer_.size(), "outer assignment");
    const std::size_t n = adj_.size();
    Bits x(n, 0);
    for (std::size_t p = 0; p < outer_.size(); ++p) x[outer_[p]] = outer_bits[p];
    std::vector<double> field(adj_.linear);
    for (auto v : outer_) {
      if (!x[v]) continue;
      for (std::size_t k = adj_.row_start[v]; k < adj_.row_start[v + 1]; ++k) {
        field[adj_.col[k]] += adj_.weight[k];
      }
    }
    for (const auto& comp : components_) {
      const std::size_t k = comp.vars.size();
      double best = std::numeric_limits<double>::infinity();
      std::uint64_t best_code = 0;
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << k); ++code) {
        double e = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
          if (!((code >> (k - 1 - a)) & 1U)) continue;
          e += field[comp.vars[a]];
          for (std::size_t b = a + 1; b < k; ++b) {
            if ((code >> (k - 1 - b)) & 1U) e += comp.pair[a * k + b];
          }
        }
        if (e < best - 1e-9) {
          best = e;
          best_code = code;
        }
      }
      for (std::size_t a = 0; a < k; ++a) x[comp.vars[a]] = (best_code >> (k - 1 - a)) & 1U;
    }
    return x;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  struct Component {
    std::vector<std::size_t> vars;
    std::vector<double> pair;  // k*k, upper triangle used
  };

  // Gray-code walk over one component; keeps its own incremental state.
  struct Scratch {
    std::vector<std::uint8_t> s;
    std::vector<double> local;  // coupling contribution from set component bits

    void init(const Component& comp) {
      s.assign(comp.vars.size(), 0);
      local.assign(comp.vars.size(), 0.0);
    }

    double minimum(const Component& comp, const std::vector<double>& field) {
      const std::size_t k = comp.vars.size();
      std::fill(s.begin(), s.end(), 0);
      std::fill(local.begin(), local.end(), 0.0);
      double e = 0.0;
      double best = 0.0;
      const std::uint64_t count = std::uint64_t{1} << k;
      for (std::uint64_t t = 1; t < count; ++t) {
        const auto a = static_cast<std::size_t>(std::countr_zero(t));
        const double d = s[a] ? -1.0 : 1.0;
        e += d * (field[comp.vars[a]] + local[a]);
        s[a] ^= 1U;
        for (std::size_t b = 0; b < k; ++b) {
          if (b == a) continue;
          const double w = a < b ? comp.pair[a * k + b] : comp.pair[b * k + a];
          local[b] += d * w;
        }
        best = std::min(best, e);
      }
      return best;
    }
  };

  void build_components(std::size_t max_component) {
    const std::size_t n = adj_.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (std::size_t v = 0; v < n; ++v) {
      if (is_outer_[v]) continue;
      for (std::size_t k = adj_.row_start[v]; k < adj_.row_start[v + 1]; ++k) {
        const std::size_t u = adj_.col[k];
        if (!is_outer_[u]) parent[find(u)] = find(v);
      }
    }
    std::vector<std::size_t> comp_of(n, npos);
    for (std::size_t v = 0; v < n; ++v) {
      if (is_outer_[v]) continue;
      const std::size_t root = find(v);
      if (comp_of[root] == npos) {
        comp_of[root] = components_.size();
        components_.emplace_back();
      }
      components_[comp_of[root]].vars.push_back(v);
    }
    std::vector<std::size_t> local_index(n, 0);
    for (auto& comp : components_) {
      const std::size_t k = comp.vars.size();
      if (k > max_component) {
        throw ExhaustionError("inner component of " + std::to_string(k) +
                              " variables exceeds the bound of " + std::to_string(max_component));
      }
      for (std::size_t a = 0; a < k; ++a) local_index[comp.vars[a]] = a;
      comp.pair.assign(k * k, 0.0);
      for (std::size_t a = 0; a < k; ++a) {
        const std::size_t v = comp.vars[a];
        for (std::size_t e = adj_.row_start[v]; e < adj_.row_start[v + 1]; ++e) {
          const std::size_t u = adj_.col[e];
          if (is_outer_[u]) continue;
          const std::size_t b = local_index[u];
          if (a < b) comp.pair[a * k + b] += adj_.weight[e];
        }
      }
    }
  }

  QuboAdjacency adj_;
  double offset_;
  std::vector<std::size_t> outer_;
  std::vector<std::uint8_t> is_outer_;
  std::vector<Component> components_;
};

struct ExactMinimum {
  double energy = std::numeric_limits<double>::infinity();
  Bits assignment;  // lexicographically smallest minimiser
};

inline ExactMinimum exact_minimum(const QuboModel& model, std::span<const std::size_t> outer) {
  ConditionalMinimizer cm(model, outer);
  constexpr double tol = 1e-9;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Bits> tied;
  cm.for_each([&](std::size_t, const Bits& bits, double e) {
    if (e < best - tol) {
      best = e;
      tied.assign(1, bits);
    } else if (e <= best + tol && tied.size() < 4096) {
      tied.push_back(bits);
    }
  });
  ExactMinimum out;
  for (const auto& bits : tied) {
    Bits full = cm.completion(bits);
    const double e = energy(model, full);
    if (out.assignment.empty() || e < out.energy - tol ||
        (e <= out.energy + tol && lex_less(full, out.assignment))) {
      out.energy = e;
      out.assignment = std::move(full);
    }
  }
  return out;
}

// All variables outer when that is within the bound; otherwise the caller has
// to pick an outer set.
inline ExactMinimum exact_minimum(const QuboModel& model) {
  std::vector<std::size_t> all(model.num_vars());
  std::iota(all.begin(), all.end(), 0);
  return exact_minimum(model, all);
}

}  // namespace flowising
