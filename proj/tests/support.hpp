#pragma once

// Test-side oracles. These deliberately avoid the library's Gray-code and
// decomposition machinery so they can be used to check it.

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "flowising/bits.hpp"
#include "flowising/ip.hpp"
#include "flowising/qubo.hpp"

namespace testing_support {

using flowising::BinaryProgram;
using flowising::Bits;
using flowising::Constraint;
using flowising::QuboModel;
using flowising::Sense;

struct NaiveOptimum {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Bits argmin;
};

inline NaiveOptimum naive_ip_optimum(const BinaryProgram& p) {
  NaiveOptimum best;
  const std::size_t n = p.num_vars();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    const auto x = flowising::bits_from_code(code, n);
    bool ok = true;
    for (const auto& c : p.constraints) ok = ok && c.satisfied(x);
    if (!ok) continue;
    const double v = flowising::objective_value(p, x);
    if (!best.feasible || v < best.objective) best = {true, v, x};
  }
  return best;
}

inline std::set<Bits> naive_projected_feasible(const BinaryProgram& p) {
  std::set<Bits> out;
  const std::size_t n = p.num_vars();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    const auto x = flowising::bits_from_code(code, n);
    bool ok = true;
    for (const auto& c : p.constraints) ok = ok && c.satisfied(x);
    if (ok) out.insert(flowising::project(x, p.projection));
  }
  return out;
}

inline double naive_qubo_minimum(const QuboModel& q) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = q.num_vars();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    best = std::min(best, flowising::energy(q, flowising::bits_from_code(code, n)));
  }
  return best;
}

// Random binary program with integer coefficients in [-5, 5], up to
// `max_vars` variables and `max_constraints` constraints, optional product
// terms, and feasible by construction: every right-hand side is chosen so a
// hidden assignment satisfies it.
inline BinaryProgram random_program(std::mt19937_64& rng, std::size_t max_vars = 8, std::size_t max_constraints = 4) {
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<std::size_t> nvars(2, max_vars);
  std::uniform_int_distribution<std::size_t> ncons(0, max_constraints);
  std::uniform_int_distribution<int> sense(0, 2);
  std::uniform_int_distribution<int> loose(0, 2);
  std::bernoulli_distribution use(0.6);
  std::bernoulli_distribution use_product(0.25);

  BinaryProgram p;
  const std::size_t n = nvars(rng);
  for (std::size_t i = 0; i < n; ++i) p.var_names.push_back("x" + std::to_string(i));
  Bits hidden(n);
  for (auto& b : hidden) b = static_cast<std::uint8_t>(rng() & 1U);

  auto random_pair = [&] {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    return std::pair{std::min(i, j), std::max(i, j)};
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (use(rng)) {
      const int c = coeff(rng);
      if (c != 0) p.objective.linear[i] = c;
    }
  }
  if (use_product(rng)) {
    const auto [i, j] = random_pair();
    const int c = coeff(rng);
    if (c != 0) p.objective.products.push_back({i, j, static_cast<double>(c)});
  }

  const std::size_t m = ncons(rng);
  for (std::size_t k = 0; k < m; ++k) {
    Constraint c;
    c.label = "c" + std::to_string(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (use(rng)) {
        const int a = coeff(rng);
        if (a != 0) c.linear[i] = a;
      }
    }
    if (use_product(rng)) {
      const auto [i, j] = random_pair();
      const int a = coeff(rng);
      if (a != 0) c.products.push_back({i, j, static_cast<double>(a)});
    }
    if (c.linear.empty() && c.products.empty()) c.linear[k % n] = 1.0;
    const double at_hidden = c.lhs(hidden);
    switch (sense(rng)) {
      case 0:
        c.sense = Sense::eq;
        c.rhs = at_hidden;
        break;
      case 1:
        c.sense = Sense::le;
        c.rhs = at_hidden + loose(rng);
        break;
      default:
        c.sense = Sense::ge;
        c.rhs = at_hidden - loose(rng);
        break;
    }
    p.constraints.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < n; ++i) p.projection.push_back(i);
  return p;
}

}  // namespace testing_support
