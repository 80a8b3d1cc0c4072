#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"

namespace flowising {

inline constexpr double kFeasibilityTol = 1e-9;

enum class Sense { eq, le, ge };

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::eq: return "=";
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
  }
  return "?";
}

inline Sense sense_from_string(const std::string& s) {
  if (s == "=" || s == "==") return Sense::eq;
  if (s == "<=") return Sense::le;
  if (s == ">=") return Sense::ge;
  throw SchemaError("unknown constraint sense '" + s + "'");
}

struct ProductTerm {
  std::size_t i = 0;
  std::size_t j = 0;
  double coeff = 0.0;
  friend bool operator==(const ProductTerm&, const ProductTerm&) = default;
};

// sum linear + sum products  (sense)  rhs
struct Constraint {
  std::map<std::size_t, double> linear;
  std::vector<ProductTerm> products;
  Sense sense = Sense::eq;
  double rhs = 0.0;
  std::string label;

  double lhs(std::span<const std::uint8_t> x) const {
    double v = 0.0;
    for (const auto& [i, a] : linear) {
      if (x[i]) v += a;
    }
    for (const auto& p : products) {
      if (x[p.i] && x[p.j]) v += p.coeff;
    }
    return v;
  }

  bool holds_for(double lhs_value) const {
    switch (sense) {
      case Sense::eq: return std::abs(lhs_value - rhs) <= kFeasibilityTol;
      case Sense::le: return lhs_value <= rhs + kFeasibilityTol;
      case Sense::ge: return lhs_value >= rhs - kFeasibilityTol;
    }
    return false;
  }

  bool satisfied(std::span<const std::uint8_t> x) const { return holds_for(lhs(x)); }

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// Linear part plus optional pairwise products (see builder notes in the
// ionic-liquid flowsheet for why products are allowed here).
struct Objective {
  std::map<std::size_t, double> linear;
  std::vector<ProductTerm> products;
  double constant = 0.0;

  // Sum of absolute objective coefficients (linear and product terms).
  double abs_coefficient_sum() const {
    double s = 0.0;
    for (const auto& [i, c] : linear) s += std::abs(c);
    for (const auto& p : products) s += std::abs(p.coeff);
    return s;
  }

  friend bool operator==(const Objective&, const Objective&) = default;
};

struct BinaryProgram {
  std::vector<std::string> var_names;
  Objective objective;
  std::vector<Constraint> constraints;
  // Variables whose values identify a configuration; counting and cuts work
  // on this subset.
  std::vector<std::size_t> projection;

  std::size_t num_vars() const { return var_names.size(); }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(var_names.begin(), var_names.end(), name);
    if (it == var_names.end()) throw ModelError("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - var_names.begin());
  }

  friend bool operator==(const BinaryProgram&, const BinaryProgram&) = default;
};

inline void validate(const BinaryProgram& p) {
  const std::size_t n = p.num_vars();
  auto check_index = [&](std::size_t i, const std::string& where) {
    if (i >= n) {
      throw ModelError(where + " references undeclared variable index " + std::to_string(i));
    }
  };
  auto check_products = [&](const std::vector<ProductTerm>& products, const std::string& where) {
    for (const auto& pr : products) {
      check_index(pr.i, where);
      check_index(pr.j, where);
      if (pr.i == pr.j) throw ModelError(where + " has a product of a variable with itself");
    }
  };
  for (const auto& [i, c] : p.objective.linear) check_index(i, "objective");
  check_products(p.objective.products, "objective");
  for (const auto& c : p.constraints) {
    for (const auto& [i, a] : c.linear) check_index(i, "constraint '" + c.label + "'");
    check_products(c.products, "constraint '" + c.label + "'");
  }
  for (auto i : p.projection) check_index(i, "projection");
  std::vector<std::string> sorted = p.var_names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ModelError("duplicate variable name");
  }
}

inline double objective_value(const BinaryProgram& p, std::span<const std::uint8_t> x) {
  require_length(x.size(), p.num_vars(), "IP assignment");
  double v = p.objective.constant;
  for (const auto& [i, c] : p.objective.linear) {
    if (x[i]) v += c;
  }
  for (const auto& pr : p.objective.products) {
    if (x[pr.i] && x[pr.j]) v += pr.coeff;
  }
  return v;
}

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::string> violations;
};

inline FeasibilityReport is_feasible(const BinaryProgram& p, std::span<const std::uint8_t> x) {
  require_length(x.size(), p.num_vars(), "IP assignment");
  FeasibilityReport r;
  for (const auto& c : p.constraints) {
    bool in_range = std::all_of(c.linear.begin(), c.linear.end(),
                                [&](const auto& t) { return t.first < x.size(); });
    for (const auto& pr : c.products) in_range = in_range && pr.i < x.size() && pr.j < x.size();
    if (!in_range) throw ModelError("constraint '" + c.label + "' references unknown variable");
    if (!c.satisfied(x)) {
      r.feasible = false;
      r.violations.push_back(c.label);
    }
  }
  return r;
}

// sum_{y in subset, y=1} (1 - y) + sum_{y in subset, y=0} y >= 1
inline Constraint no_good_cut(std::span<const std::uint8_t> assignment,
                              std::span<const std::size_t> subset) {
  if (subset.empty()) throw ArgumentError("no-good cut needs a non-empty variable subset");
  Constraint cut;
  cut.sense = Sense::ge;
  cut.rhs = 1.0;
  cut.label = "no-good cut";
  for (auto i : subset) {
    if (i >= assignment.size()) throw DimensionError("no-good cut subset index out of range");
    if (assignment[i]) {
      cut.linear[i] -= 1.0;
      cut.rhs -= 1.0;
    } else {
      cut.linear[i] += 1.0;
    }
  }
  return cut;
}

namespace detail {

// Matches k*x*y - k*x (= 0), i.e. x*y = x, returning (x, y).
inline std::optional<std::pair<std::size_t, std::size_t>> match_implication(const Constraint& c) {
  if (c.sense != Sense::eq || c.rhs != 0.0 || c.linear.size() != 1 || c.products.size() != 1) {
    return std::nullopt;
  }
  const auto [x, a] = *c.linear.begin();
  const auto& pr = c.products.front();
  if (a == 0.0 || pr.coeff != -a) return std::nullopt;
  if (pr.i == x) return std::pair{x, pr.j};
  if (pr.j == x) return std::pair{x, pr.i};
  return std::nullopt;
}

// Matches k*x + k*y - k*x*y = k, returning (x, y).
inline std::optional<std::pair<std::size_t, std::size_t>> match_disjunction(const Constraint& c) {
  if (c.sense != Sense::eq || c.linear.size() != 2 || c.products.size() != 1) return std::nullopt;
  auto it = c.linear.begin();
  const auto [x, a] = *it++;
  const auto [y, b] = *it;
  const auto& pr = c.products.front();
  if (a == 0.0 || a != b || pr.coeff != -a || c.rhs != a) return std::nullopt;
  if (!((pr.i == x && pr.j == y) || (pr.i == y && pr.j == x))) return std::nullopt;
  return std::pair{x, y};
}

}  // namespace detail

// Rewrites x*y = x into x <= y and x + y - x*y = 1 into x + y >= 1. Both
// rewrites have the same binary solution set and drop the product.
inline BinaryProgram normalize(const BinaryProgram& p) {
  BinaryProgram out = p;
  for (auto& c : out.constraints) {
    if (auto m = detail::match_implication(c)) {
      Constraint r;
      r.linear[m->first] += 1.0;
      r.linear[m->second] -= 1.0;
      r.sense = Sense::le;
      r.rhs = 0.0;
      r.label = c.label;
      c = std::move(r);
    } else if (auto d = detail::match_disjunction(c)) {
      Constraint r;
      r.linear[d->first] = 1.0;
      r.linear[d->second] = 1.0;
      r.sense = Sense::ge;
      r.rhs = 1.0;
      r.label = c.label;
      c = std::move(r);
    }
  }
  return out;
}

inline BinaryProgram with_constraint(BinaryProgram p, Constraint c) {
  p.constraints.push_back(std::move(c));
  return p;
}

// Incremental evaluator for walking assignments one flip at a time. Constraint
// left-hand sides are exact whenever coefficients are integers, which holds
// for every constraint the builders emit.
class IncrementalEvaluator {
public:
  explicit IncrementalEvaluator(const BinaryProgram& p)
      : program_(&p), x_(p.num_vars(), 0), lin_(p.num_vars()), prod_(p.num_vars()),
        obj_lin_(p.num_vars(), 0.0), obj_prod_(p.num_vars()) {
    for (std::size_t c = 0; c < p.constraints.size(); ++c) {
      const auto& con = p.constraints[c];
      for (const auto& [i, a] : con.linear) lin_[i].push_back({c, a});
      for (const auto& pr : con.products) {
        prod_[pr.i].push_back({c, pr.j, pr.coeff});
        prod_[pr.j].push_back({c, pr.i, pr.coeff});
      }
    }
    for (const auto& [i, c] : p.objective.linear) obj_lin_[i] += c;
    for (const auto& pr : p.objective.products) {
      obj_prod_[pr.i].push_back({pr.j, pr.coeff});
      obj_prod_[pr.j].push_back({pr.i, pr.coeff});
    }
    reset(Bits(p.num_vars(), 0));
  }

  void reset(std::span<const std::uint8_t> x) {
    require_length(x.size(), x_.size(), "IP assignment");
    x_.assign(x.begin(), x.end());
    lhs_.assign(program_->constraints.size(), 0.0);
    sat_.assign(program_->constraints.size(), 0);
    violated_ = 0;
    for (std::size_t c = 0; c < program_->constraints.size(); ++c) {
      lhs_[c] = program_->constraints[c].lhs(x_);
      sat_[c] = program_->constraints[c].holds_for(lhs_[c]);
      if (!sat_[c]) ++violated_;
    }
    objective_ = objective_value(*program_, x_);
  }

  void flip(std::size_t v) {
    const double d = x_[v] ? -1.0 : 1.0;
    x_[v] ^= 1U;
    for (const auto& e : lin_[v]) {
      lhs_[e.constraint] += d * e.coeff;
      refresh(e.constraint);
    }
    for (const auto& e : prod_[v]) {
      if (x_[e.other]) {
        lhs_[e.constraint] += d * e.coeff;
        refresh(e.constraint);
      }
    }
    objective_ += d * obj_lin_[v];
    for (const auto& [u, q] : obj_prod_[v]) {
      if (x_[u]) objective_ += d * q;
    }
  }

  bool feasible() const { return violated_ == 0; }
  std::size_t violated_count() const { return violated_; }
  double objective() const { return objective_; }
  const Bits& assignment() const { return x_; }

private:
  struct LinEntry {
    std::size_t constraint;
    double coeff;
  };
  struct ProdEntry {
    std::size_t constraint;
    std::size_t other;
    double coeff;
  };

  void refresh(std::size_t c) {
    const bool now = program_->constraints[c].holds_for(lhs_[c]);
    if (now != static_cast<bool>(sat_[c])) {
      sat_[c] = now;
      if (now) --violated_; else ++violated_;
    }
  }

  const BinaryProgram* program_;
  Bits x_;
  std::vector<std::vector<LinEntry>> lin_;
  std::vector<std::vector<ProdEntry>> prod_;
  std::vector<double> obj_lin_;
  std::vector<std::vector<std::pair<std::size_t, double>>> obj_prod_;
  std::vector<double> lhs_;
  std::vector<std::uint8_t> sat_;
  std::size_t violated_ = 0;
  double objective_ = 0.0;
};

// ---- JSON ----------------------------------------------------------------
// Variables are referenced by name so files stay readable and hand-editable.

namespace detail {

inline nlohmann::json linear_to_json(const std::map<std::size_t, double>& lin,
                                     const std::vector<std::string>& names) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [i, a] : lin) j[names.at(i)] = a;
  return j;
}

inline nlohmann::json products_to_json(const std::vector<ProductTerm>& prods,
                                       const std::vector<std::string>& names) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& pr : prods) j.push_back({names.at(pr.i), names.at(pr.j), pr.coeff});
  return j;
}

inline std::map<std::size_t, double> linear_from_json(const nlohmann::json& j,
                                                      const BinaryProgram& p) {
  std::map<std::size_t, double> out;
  if (!j.is_object()) throw SchemaError("linear terms must be an object {name: coeff}");
  for (const auto& [name, v] : j.items()) out[p.index_of(name)] += v.get<double>();
  return out;
}

inline std::vector<ProductTerm> products_from_json(const nlohmann::json& j, const BinaryProgram& p) {
  std::vector<ProductTerm> out;
  if (!j.is_array()) throw SchemaError("products must be an array of [a, b, coeff]");
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3) throw SchemaError("product term must be [a, b, coeff]");
    out.push_back({p.index_of(t[0].get<std::string>()), p.index_of(t[1].get<std::string>()),
                   t[2].get<double>()});
  }
  return out;
}

}  // namespace detail

inline nlohmann::json to_json(const BinaryProgram& p) {
  nlohmann::json j;
  j["var_names"] = p.var_names;
  j["objective"] = {{"linear", detail::linear_to_json(p.objective.linear, p.var_names)},
                    {"products", detail::products_to_json(p.objective.products, p.var_names)},
                    {"constant", p.objective.constant}};
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : p.constraints) {
    cons.push_back({{"label", c.label},
                    {"linear", detail::linear_to_json(c.linear, p.var_names)},
                    {"products", detail::products_to_json(c.products, p.var_names)},
                    {"sense", to_string(c.sense)},
                    {"rhs", c.rhs}});
  }
  j["constraints"] = std::move(cons);
  nlohmann::json proj = nlohmann::json::array();
  for (auto i : p.projection) proj.push_back(p.var_names.at(i));
  j["projection"] = std::move(proj);
  return j;
}

inline BinaryProgram program_from_json(const nlohmann::json& j) {
  try {
    BinaryProgram p;
    p.var_names = j.at("var_names").get<std::vector<std::string>>();
    const auto& obj = j.at("objective");
    p.objective.linear = detail::linear_from_json(obj.value("linear", nlohmann::json::object()), p);
    p.objective.products =
        detail::products_from_json(obj.value("products", nlohmann::json::array()), p);
    p.objective.constant = obj.value("constant", 0.0);
    for (const auto& c : j.at("constraints")) {
      Constraint con;
      con.label = c.value("label", std::string("c") + std::to_string(p.constraints.size()));
      con.linear = detail::linear_from_json(c.value("linear", nlohmann::json::object()), p);
      con.products = detail::products_from_json(c.value("products", nlohmann::json::array()), p);
      con.sense = sense_from_string(c.at("sense").get<std::string>());
      con.rhs = c.at("rhs").get<double>();
      p.constraints.push_back(std::move(con));
    }
    if (j.contains("projection")) {
      for (const auto& name : j.at("projection")) p.projection.push_back(p.index_of(name));
    } else {
      for (std::size_t i = 0; i < p.num_vars(); ++i) p.projection.push_back(i);
    }
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed binary program JSON: ") + e.what());
  }
}

// Small helper for writing models by variable name.
class ProgramBuilder {
public:
  std::size_t add_var(const std::string& name) {
    if (index_.count(name)) throw ModelError("duplicate variable '" + name + "'");
    index_[name] = p_.var_names.size();
    p_.var_names.push_back(name);
    return index_[name];
  }

  std::size_t var(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ModelError("unknown variable '" + name + "'");
    return it->second;
  }

  void add_objective(const std::string& name, double c) { p_.objective.linear[var(name)] += c; }
  void add_objective_product(const std::string& a, const std::string& b, double c) {
    p_.objective.products.push_back({var(a), var(b), c});
  }
  void add_objective_constant(double c) { p_.objective.constant += c; }

  struct Row {
    std::vector<std::pair<std::string, double>> linear;
    std::vector<std::tuple<std::string, std::string, double>> products;
  };

  void add_constraint(const std::string& label, const Row& row, Sense sense, double rhs) {
    Constraint c;
    c.label = label;
    c.sense = sense;
    c.rhs = rhs;
    for (const auto& [name, a] : row.linear) c.linear[var(name)] += a;
    for (const auto& [a, b, q] : row.products) c.products.push_back({var(a), var(b), q});
    p_.constraints.push_back(std::move(c));
  }

  void set_projection(const std::vector<std::string>& names) {
    p_.projection.clear();
    for (const auto& n : names) p_.projection.push_back(var(n));
  }

  BinaryProgram build() const {
    validate(p_);
    return p_;
  }

private:
  BinaryProgram p_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace flowising
