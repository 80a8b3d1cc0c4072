#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/ip.hpp"
#include "flowising/qubo.hpp"
#include "flowising/sample_set.hpp"
#include "flowising/solvers/exact.hpp"

namespace flowising {

struct SlackGroup {
  std::size_t constraint = 0;  // index into the normalised program's constraints
  std::string label;
  std::vector<std::size_t> bits;  // QUBO indices
  std::vector<double> weights;    // 2^k
};

// Auxiliary binary standing in for x_i * x_j. When the program already
// defines z = x_i * x_j, z itself carries the gadget and `index` is z's
// mapped position (`reuses_program_var` set).
struct AuxProduct {
  std::size_t i = 0;  // program variable indices, i < j
  std::size_t j = 0;
  std::size_t index = 0;
  bool reuses_program_var = false;
};

struct Reformulation {
  BinaryProgram source;
  BinaryProgram normalized;
  QuboModel qubo;
  std::vector<std::size_t> var_map;  // program variable -> QUBO index
  std::vector<SlackGroup> slack_groups;
  std::vector<AuxProduct> aux_products;
  double penalty_weight = 0.0;
  bool default_penalty_weight = true;
  std::map<std::string, double> constraint_weights;  // overrides, by label
  double offset = 0.0;
};

struct ReformulateOptions {
  std::optional<double> rho;
  std::map<std::string, double> constraint_weights;
};

inline double default_penalty_weight(const BinaryProgram& p) {
  return 1.0 + p.objective.abs_coefficient_sum();
}

// Rosenberg gadget x*y - 2(x + y)w + 3w: zero iff w = x*y, at least 1 otherwise.
inline double rosenberg_penalty(int x, int y, int w) {
  return static_cast<double>(x * y - 2 * (x + y) * w + 3 * w);
}

namespace detail {

inline bool is_integral(double v) { return std::abs(v - std::round(v)) <= 1e-9; }

// Matches a*z - a*x*y = 0 (z distinct from x, y); returns (z, x, y).
inline std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> match_product_definition(
    const Constraint& c) {
  if (c.sense != Sense::eq || c.rhs != 0.0 || c.linear.size() != 1 || c.products.size() != 1) {
    return std::nullopt;
  }
  const auto [z, a] = *c.linear.begin();
  const auto& pr = c.products.front();
  if (a == 0.0 || pr.coeff != -a || z == pr.i || z == pr.j) return std::nullopt;
  return std::tuple{z, std::min(pr.i, pr.j), std::max(pr.i, pr.j)};
}

class PenaltyAccumulator {
public:
  void add_linear(std::size_t i, double q) { terms_.push_back({i, i, q}); }
  void add_pair(std::size_t i, std::size_t j, double q) { terms_.push_back({i, j, q}); }
  void add_constant(double c) { constant_ += c; }

  // w * (sum_k a_k v_k - b)^2 with v binary.
  void add_squared(const std::map<std::size_t, double>& row, double b, double w) {
    std::vector<std::pair<std::size_t, double>> items(row.begin(), row.end());
    for (std::size_t a = 0; a < items.size(); ++a) {
      const auto [i, ai] = items[a];
      add_linear(i, w * (ai * ai - 2.0 * b * ai));
      for (std::size_t c = a + 1; c < items.size(); ++c) {
        const auto [j, aj] = items[c];
        add_pair(i, j, w * 2.0 * ai * aj);
      }
    }
    add_constant(w * b * b);
  }

  void add_rosenberg(std::size_t x, std::size_t y, std::size_t z, double w) {
    add_pair(x, y, w);
    add_pair(x, z, -2.0 * w);
    add_pair(y, z, -2.0 * w);
    add_linear(z, 3.0 * w);
  }

  const std::vector<QuboTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }

private:
  std::vector<QuboTerm> terms_;
  double constant_ = 0.0;
};

}  // namespace detail

// Compiles a binary program into a QUBO. Variable layout: program variables
// first (identity map), then auxiliary product bits in sorted pair order, then
// slack bits in constraint order.
inline Reformulation reformulate(const BinaryProgram& program, const ReformulateOptions& options = {}) {
  validate(program);
  Reformulation r;
  r.source = program;
  r.normalized = normalize(program);
  r.default_penalty_weight = !options.rho.has_value();
  r.penalty_weight = options.rho.value_or(default_penalty_weight(program));
  r.constraint_weights = options.constraint_weights;
  if (!(r.penalty_weight > 0.0) || !std::isfinite(r.penalty_weight)) {
    throw ArgumentError("penalty weight must be positive and finite");
  }
  for (const auto& [label, w] : r.constraint_weights) {
    if (!(w > 0.0)) throw ArgumentError("penalty weight override for '" + label + "' must be positive");
  }
  const double rho = r.penalty_weight;
  auto weight_for = [&](const Constraint& c) {
    auto it = r.constraint_weights.find(c.label);
    return it == r.constraint_weights.end() ? rho : it->second;
  };

  const auto& np = r.normalized;
  const std::size_t n = np.num_vars();
  r.var_map.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.var_map[i] = i;

  // Products the program defines itself (z = x*y) reuse z as the gadget bit.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> defined;
  std::vector<std::uint8_t> is_definition(np.constraints.size(), 0);
  for (std::size_t c = 0; c < np.constraints.size(); ++c) {
    if (auto m = detail::match_product_definition(np.constraints[c])) {
      const auto [z, x, y] = *m;
      if (defined.emplace(std::pair{x, y}, z).second) is_definition[c] = 1;
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> aux_index;
  for (std::size_t c = 0; c < np.constraints.size(); ++c) {
    if (is_definition[c]) continue;
    for (const auto& pr : np.constraints[c].products) {
      const std::pair key{std::min(pr.i, pr.j), std::max(pr.i, pr.j)};
      if (!defined.count(key)) aux_index.emplace(key, 0);
    }
  }
  std::size_t next = n;
  for (auto& [key, idx] : aux_index) idx = next++;

  std::vector<std::string> names = np.var_names;
  names.resize(next);
  for (const auto& [key, idx] : aux_index) {
    names[idx] = "aux[" + np.var_names[key.first] + "*" + np.var_names[key.second] + "]";
  }

  detail::PenaltyAccumulator acc;

  for (std::size_t c = 0; c < np.constraints.size(); ++c) {
    const auto& con = np.constraints[c];
    if (is_definition[c]) {
      const auto [z, x, y] = *detail::match_product_definition(con);
      acc.add_rosenberg(x, y, z, weight_for(con));
      r.aux_products.push_back({x, y, z, true});
      continue;
    }
    std::map<std::size_t, double> row;
    for (const auto& [i, a] : con.linear) row[i] += a;
    for (const auto& pr : con.products) {
      const std::pair key{std::min(pr.i, pr.j), std::max(pr.i, pr.j)};
      auto d = defined.find(key);
      row[d != defined.end() ? d->second : aux_index.at(key)] += pr.coeff;
    }
    std::erase_if(row, [](const auto& t) { return t.second == 0.0; });

    if (con.sense != Sense::eq) {
      bool integral = detail::is_integral(con.rhs);
      double min_lhs = 0.0;
      double max_lhs = 0.0;
      for (const auto& [i, a] : row) {
        integral = integral && detail::is_integral(a);
        min_lhs += std::min(0.0, a);
        max_lhs += std::max(0.0, a);
      }
      if (!integral) {
        throw ReformulationError("inequality '" + con.label +
                                 "' has non-integer coefficients; slack range is not integral");
      }
      const double range = con.sense == Sense::le ? con.rhs - min_lhs : max_lhs - con.rhs;
      if (range < -1e-9) {
        throw ReformulationError("inequality '" + con.label + "' cannot be satisfied by any assignment");
      }
      const auto span_units = static_cast<std::uint64_t>(std::llround(range));
      std::size_t k = 0;
      while (((std::uint64_t{1} << k) - 1) < span_units) ++k;
      SlackGroup g;
      g.constraint = c;
      g.label = con.label;
      const double sign = con.sense == Sense::le ? 1.0 : -1.0;
      for (std::size_t b = 0; b < k; ++b) {
        const double w = static_cast<double>(std::uint64_t{1} << b);
        g.bits.push_back(next);
        g.weights.push_back(w);
        names.push_back("slack[" + con.label + "#" + std::to_string(b) + "]");
        row[next] += sign * w;
        ++next;
      }
      r.slack_groups.push_back(std::move(g));
    }
    acc.add_squared(row, con.rhs, weight_for(con));
  }

  for (const auto& [key, idx] : aux_index) {
    acc.add_rosenberg(key.first, key.second, idx, rho);
    r.aux_products.push_back({key.first, key.second, idx, false});
  }
  std::sort(r.aux_products.begin(), r.aux_products.end(),
            [](const AuxProduct& a, const AuxProduct& b) { return std::pair{a.i, a.j} < std::pair{b.i, b.j}; });

  for (const auto& [i, c] : np.objective.linear) acc.add_linear(i, c);
  for (const auto& pr : np.objective.products) acc.add_pair(pr.i, pr.j, pr.coeff);
  acc.add_constant(np.objective.constant);

  r.qubo = QuboModel(next, acc.terms(), acc.constant(), std::move(names));
  r.offset = r.qubo.offset();
  return r;
}

struct DecodedSample {
  Bits assignment;  // program variables
  bool feasible = false;
  double objective = 0.0;
  std::vector<std::string> violations;
};

// Feasibility is always re-checked on the original program.
inline DecodedSample decode(const Reformulation& r, std::span<const std::uint8_t> qubo_bits) {
  require_length(qubo_bits.size(), r.qubo.num_vars(), "QUBO assignment");
  DecodedSample d;
  d.assignment.resize(r.var_map.size());
  for (std::size_t i = 0; i < r.var_map.size(); ++i) d.assignment[i] = qubo_bits[r.var_map[i]];
  auto f = is_feasible(r.source, d.assignment);
  d.feasible = f.feasible;
  d.violations = std::move(f.violations);
  d.objective = objective_value(r.source, d.assignment);
  return d;
}

struct VerifyReport {
  struct Entry {
    Bits assignment;  // program variables
    double min_energy = 0.0;
    double objective = 0.0;
  };

  bool refused = false;
  std::string refusal_reason;
  bool passed = false;

  std::uint64_t assignments_checked = 0;
  std::uint64_t feasible_count = 0;
  double feasible_optimum = std::numeric_limits<double>::infinity();

  double qubo_minimum = std::numeric_limits<double>::infinity();
  Bits qubo_argmin;
  bool argmin_feasible = false;
  bool argmin_optimal = false;

  std::uint64_t exactness_failure_count = 0;
  std::uint64_t dominance_failure_count = 0;
  std::vector<Entry> exactness_failures;  // first few, for diagnostics
  std::vector<Entry> dominance_failures;
};

// Checks the penalty construction exhaustively over every program assignment:
// (a) each feasible assignment has a completion whose energy equals its
// objective, (b) each infeasible assignment has all completions strictly above
// the feasible optimum. Slack and auxiliary bits are minimised exactly per
// program assignment.
inline VerifyReport verify(const Reformulation& r, std::size_t max_listed = 64) {
  VerifyReport rep;
  if (r.var_map.size() > kMaxExhaustiveVars) {
    rep.refused = true;
    rep.refusal_reason = "program has " + std::to_string(r.var_map.size()) +
                         " variables; exhaustive bound is " + std::to_string(kMaxExhaustiveVars);
    return rep;
  }
  std::optional<ConditionalMinimizer> cm;
  try {
    cm.emplace(r.qubo, r.var_map);
  } catch (const ExhaustionError& e) {
    rep.refused = true;
    rep.refusal_reason = e.what();
    return rep;
  }

  IncrementalEvaluator eval(r.source);
  constexpr double tol = 1e-9;
  struct Infeasible {
    Bits bits;
    double e;
  };
  std::vector<Infeasible> lowest_infeasible;  // kept below the running feasible optimum
  double min_infeasible = std::numeric_limits<double>::infinity();
  std::vector<Bits> tied_min;

  cm->for_each([&](std::size_t flipped, const Bits& bits, double e) {
    if (flipped != ConditionalMinimizer::npos) eval.flip(flipped);
    ++rep.assignments_checked;
    if (e < rep.qubo_minimum - tol) {
      rep.qubo_minimum = e;
      tied_min.assign(1, bits);
    } else if (e <= rep.qubo_minimum + tol && tied_min.size() < 4096) {
      tied_min.push_back(bits);
    }
    if (eval.feasible()) {
      ++rep.feasible_count;
      const double obj = objective_value(r.source, bits);
      rep.feasible_optimum = std::min(rep.feasible_optimum, obj);
      if (std::abs(e - obj) > tol * std::max(1.0, std::abs(obj))) {
        ++rep.exactness_failure_count;
        if (rep.exactness_failures.size() < max_listed) rep.exactness_failures.push_back({bits, e, obj});
      }
    } else {
      min_infeasible = std::min(min_infeasible, e);
      if (lowest_infeasible.size() < 4 * max_listed || e < lowest_infeasible.back().e) {
        lowest_infeasible.push_back({bits, e});
        std::sort(lowest_infeasible.begin(), lowest_infeasible.end(),
                  [](const Infeasible& a, const Infeasible& b) { return a.e < b.e; });
        if (lowest_infeasible.size() > 4 * max_listed) lowest_infeasible.pop_back();
      }
    }
  });

  // Dominance is judged against the final feasible optimum; the count needs a
  // second look only when some infeasible energy falls at or below it.
  if (min_infeasible <= rep.feasible_optimum + tol) {
    cm->for_each([&, eval2 = IncrementalEvaluator(r.source)](std::size_t flipped, const Bits&,
                                                              double e) mutable {
      if (flipped != ConditionalMinimizer::npos) eval2.flip(flipped);
      if (!eval2.feasible() && e <= rep.feasible_optimum + tol) ++rep.dominance_failure_count;
    });
    for (const auto& inf : lowest_infeasible) {
      if (inf.e <= rep.feasible_optimum + tol && rep.dominance_failures.size() < max_listed) {
        rep.dominance_failures.push_back({inf.bits, inf.e, objective_value(r.source, inf.bits)});
      }
    }
  }

  for (const auto& bits : tied_min) {
    Bits full = cm->completion(bits);
    if (rep.qubo_argmin.empty() || lex_less(full, rep.qubo_argmin)) rep.qubo_argmin = std::move(full);
  }
  if (!rep.qubo_argmin.empty()) {
    rep.qubo_minimum = energy(r.qubo, rep.qubo_argmin);
    const auto d = decode(r, rep.qubo_argmin);
    rep.argmin_feasible = d.feasible;
    rep.argmin_optimal = d.feasible && std::abs(d.objective - rep.feasible_optimum) <=
                                           tol * std::max(1.0, std::abs(rep.feasible_optimum));
  }
  rep.passed = rep.exactness_failure_count == 0 && rep.dominance_failure_count == 0 &&
               (rep.feasible_count == 0 || rep.argmin_optimal);
  return rep;
}

inline nlohmann::json sidecar_json(const Reformulation& r) {
  nlohmann::json var_map = nlohmann::json::object();
  for (std::size_t i = 0; i < r.var_map.size(); ++i) var_map[r.source.var_names[i]] = r.var_map[i];
  nlohmann::json slack = nlohmann::json::array();
  for (const auto& g : r.slack_groups) {
    slack.push_back({{"constraint", g.label}, {"bits", g.bits}, {"weights", g.weights}});
  }
  nlohmann::json aux = nlohmann::json::array();
  for (const auto& a : r.aux_products) {
    aux.push_back({{"factors", {r.source.var_names[a.i], r.source.var_names[a.j]}},
                   {"index", a.index},
                   {"reuses_program_var", a.reuses_program_var}});
  }
  nlohmann::json j;
  j["var_map"] = std::move(var_map);
  j["slack_groups"] = std::move(slack);
  j["aux_products"] = std::move(aux);
  j["rho"] = r.penalty_weight;
  j["rho_rule"] = r.default_penalty_weight ? "default: 1 + sum |objective coefficients|" : "user override";
  j["constraint_weights"] = r.constraint_weights;
  j["offset"] = r.offset;
  j["num_qubo_vars"] = r.qubo.num_vars();
  return j;
}

// Maps every record of a QUBO-level sample set back onto program variables.
// Energies stay the QUBO energies; objective and feasibility refer to the
// original program. Records that collapse onto the same program assignment
// are merged.
inline SampleSet decode_samples(const Reformulation& r, const SampleSet& qubo_samples) {
  SampleSet out = qubo_samples;
  out.records.clear();
  for (const auto& rec : qubo_samples.records) {
    auto d = decode(r, rec.assignment);
    out.records.push_back({std::move(d.assignment), rec.energy, d.objective, d.feasible, rec.occurrences});
  }
  out.canonicalize();
  return out;
}

}  // namespace flowising
