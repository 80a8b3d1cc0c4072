#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/flowsheets/pattern_search.hpp"
#include "flowising/ip.hpp"

// Reactor/separator network with ionic-liquid (cation, anion) selection.
//
// Discrete side: unit selection y, source/sink/interconnection flows f, ion
// choice z and pair indicator w. The objective charges fixed cost per unit
// plus twice the conversion-weighted reactor operating cost and twice the
// separation-weighted separator operating cost. The factor 2 on both
// operating terms is kept as published; no derivation for it is given.
// The separator term y_s * w_{c,a} is a product of two binaries and is stored
// as an objective product term rather than through an extra variable.
//
// Continuous side (fixed y, z): reactor inlet flows u_r, separator inlet
// flows in_s, outlet streams out_s = beta_{s,c,a} in_s for the chosen pair,
// reactor outlets alpha_r u_r, demand sum out_s >= d. Cost adds
// c_r * u_r^0.6, c_s * in_s^2 and the waste charge c^e_s * (in_s - out_s).

namespace flowising {

struct IlReactor {
  std::string name;
  double c_fixed = 0.0;
  double c_oper = 0.0;
  double alpha = 1.0;
  double c_inlet = 0.0;  // coefficient of u^0.6
  double f_lower = 0.0;
  double f_upper = 0.0;
};

struct IlSeparator {
  std::string name;
  double c_fixed = 0.0;
  double c_oper = 0.0;
  double c_inlet = 0.0;  // coefficient of in^2
  double c_waste = 0.0;
  double f_lower = 0.0;
  double f_upper = 0.0;
  std::vector<std::vector<double>> beta;  // [cation][anion]
};

struct IlDesignSpace {
  std::vector<IlReactor> reactors;
  std::vector<IlSeparator> separators;
  std::vector<std::string> cations;
  std::vector<std::string> anions;
  double demand = 0.0;
  double big_m = 0.0;
  std::string provenance;

  void validate() const {
    if (reactors.empty() || separators.empty()) throw ModelError("need at least one reactor and one separator");
    if (cations.empty() || anions.empty()) throw ModelError("need at least one cation and one anion");
    for (const auto& r : reactors) {
      if (!(r.alpha > 0.0 && r.alpha <= 1.0)) throw ModelError("reactor " + r.name + ": alpha must lie in (0, 1]");
      if (!(r.f_lower >= 0.0 && r.f_lower <= r.f_upper)) throw ModelError("reactor " + r.name + ": bad flow bounds");
    }
    for (const auto& s : separators) {
      if (!(s.f_lower >= 0.0 && s.f_lower <= s.f_upper)) throw ModelError("separator " + s.name + ": bad flow bounds");
      if (s.beta.size() != cations.size()) throw ModelError("separator " + s.name + ": beta needs one row per cation");
      for (const auto& row : s.beta) {
        if (row.size() != anions.size()) throw ModelError("separator " + s.name + ": beta needs one column per anion");
        for (double b : row) {
          if (!(b >= 0.0 && b <= 1.0)) throw ModelError("separator " + s.name + ": beta must lie in [0, 1]");
        }
      }
    }
    if (!(demand >= 0.0)) throw ModelError("demand must be non-negative");
    if (!(big_m > 0.0)) throw ModelError("big-M must be positive");
  }
};

inline nlohmann::json to_json(const IlDesignSpace& sp) {
  nlohmann::json j;
  j["provenance"] = sp.provenance;
  for (const auto& r : sp.reactors) {
    j["reactors"].push_back({{"name", r.name},
                             {"c_fixed", r.c_fixed},
                             {"c_oper", r.c_oper},
                             {"alpha", r.alpha},
                             {"c_inlet", r.c_inlet},
                             {"f_lower", r.f_lower},
                             {"f_upper", r.f_upper}});
  }
  for (const auto& s : sp.separators) {
    j["separators"].push_back({{"name", s.name},
                               {"c_fixed", s.c_fixed},
                               {"c_oper", s.c_oper},
                               {"c_inlet", s.c_inlet},
                               {"c_waste", s.c_waste},
                               {"f_lower", s.f_lower},
                               {"f_upper", s.f_upper},
                               {"beta", s.beta}});
  }
  j["cations"] = sp.cations;
  j["anions"] = sp.anions;
  j["demand"] = sp.demand;
  j["big_m"] = sp.big_m;
  return j;
}

inline IlDesignSpace il_space_from_json(const nlohmann::json& j) {
  try {
    IlDesignSpace sp;
    sp.provenance = j.value("provenance", std::string());
    for (const auto& r : j.at("reactors")) {
      sp.reactors.push_back({r.at("name").get<std::string>(), r.at("c_fixed").get<double>(),
                             r.at("c_oper").get<double>(), r.at("alpha").get<double>(), r.at("c_inlet").get<double>(),
                             r.at("f_lower").get<double>(), r.at("f_upper").get<double>()});
    }
    for (const auto& s : j.at("separators")) {
      sp.separators.push_back({s.at("name").get<std::string>(), s.at("c_fixed").get<double>(),
                               s.at("c_oper").get<double>(), s.at("c_inlet").get<double>(),
                               s.at("c_waste").get<double>(), s.at("f_lower").get<double>(),
                               s.at("f_upper").get<double>(), s.at("beta").get<std::vector<std::vector<double>>>()});
    }
    sp.cations = j.at("cations").get<std::vector<std::string>>();
    sp.anions = j.at("anions").get<std::vector<std::string>>();
    sp.demand = j.at("demand").get<double>();
    sp.big_m = j.at("big_m").get<double>();
    sp.validate();
    return sp;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed ionic-liquid design space: ") + e.what());
  } catch (const ModelError& e) {
    throw SchemaError(e.what());
  }
}

// Bundled synthetic coefficients (not taken from any publication). Mirrors
// data/il_synthetic.json.
inline IlDesignSpace il_synthetic_space() {
  IlDesignSpace sp;
  sp.provenance = "synthetic";
  sp.reactors = {{"R1", 100.0, 15.0, 0.8, 6.0, 1.0, 100.0}, {"R2", 120.0, 10.0, 0.9, 5.0, 1.0, 100.0}};
  sp.separators = {
      {"S1", 50.0, 8.0, 0.02, 2.0, 1.0, 100.0, {{0.85, 0.70}, {0.60, 0.90}}},
      {"S2", 65.0, 6.0, 0.015, 1.5, 1.0, 100.0, {{0.75, 0.80}, {0.95, 0.65}}},
      {"S3", 80.0, 5.0, 0.01, 1.8, 1.0, 100.0, {{0.92, 0.55}, {0.70, 0.88}}},
  };
  sp.cations = {"C1", "C2"};
  sp.anions = {"A1", "A2"};
  sp.demand = 40.0;
  sp.big_m = 500.0;
  return sp;
}

namespace il_names {
inline std::string y(const std::string& unit) { return "y_" + unit; }
inline std::string src(const std::string& r) { return "f_src_" + r; }
inline std::string sink(const std::string& s) { return "f_" + s + "_sink"; }
inline std::string link(const std::string& r, const std::string& s) { return "f_" + r + "_" + s; }
inline std::string z(const std::string& ion) { return "z_" + ion; }
inline std::string w(const std::string& c, const std::string& a) { return "w_" + c + "_" + a; }
}  // namespace il_names

inline BinaryProgram build_il_discrete(const IlDesignSpace& sp) {
  sp.validate();
  using namespace il_names;
  ProgramBuilder b;
  for (const auto& r : sp.reactors) b.add_var(y(r.name));
  for (const auto& s : sp.separators) b.add_var(y(s.name));
  for (const auto& r : sp.reactors) b.add_var(src(r.name));
  for (const auto& s : sp.separators) b.add_var(sink(s.name));
  for (const auto& r : sp.reactors) {
    for (const auto& s : sp.separators) b.add_var(link(r.name, s.name));
  }
  for (const auto& c : sp.cations) b.add_var(z(c));
  for (const auto& a : sp.anions) b.add_var(z(a));
  for (const auto& c : sp.cations) {
    for (const auto& a : sp.anions) b.add_var(w(c, a));
  }

  for (const auto& r : sp.reactors) {
    b.add_objective(y(r.name), r.c_fixed + 2.0 * r.c_oper * r.alpha);
  }
  for (const auto& s : sp.separators) {
    b.add_objective(y(s.name), s.c_fixed);
    for (std::size_t c = 0; c < sp.cations.size(); ++c) {
      for (std::size_t a = 0; a < sp.anions.size(); ++a) {
        const double coeff = 2.0 * s.c_oper * s.beta[c][a];
        if (coeff != 0.0) b.add_objective_product(y(s.name), w(sp.cations[c], sp.anions[a]), coeff);
      }
    }
  }

  for (const auto& r : sp.reactors) {
    b.add_constraint("reactor_selection[" + r.name + "]", {{{src(r.name), 1.0}, {y(r.name), -1.0}}, {}}, Sense::eq,
                     0.0);
  }
  for (const auto& s : sp.separators) {
    b.add_constraint("separator_selection[" + s.name + "]", {{{sink(s.name), 1.0}, {y(s.name), -1.0}}, {}},
                     Sense::eq, 0.0);
  }

  // At least one source flow. Two reactors use the inclusion-exclusion form
  // f1 + f2 - f1*f2 = 1; other counts fall back to a plain covering row.
  if (sp.reactors.size() == 2) {
    const auto a = src(sp.reactors[0].name);
    const auto c = src(sp.reactors[1].name);
    b.add_constraint("source_activation", {{{a, 1.0}, {c, 1.0}}, {{a, c, -1.0}}}, Sense::eq, 1.0);
  } else {
    ProgramBuilder::Row row;
    for (const auto& r : sp.reactors) row.linear.emplace_back(src(r.name), 1.0);
    b.add_constraint("source_activation", row, Sense::ge, 1.0);
  }
  {
    ProgramBuilder::Row row;
    for (const auto& s : sp.separators) row.linear.emplace_back(sink(s.name), 1.0);
    b.add_constraint("sink_activation", row, Sense::ge, 1.0);
  }

  for (const auto& r : sp.reactors) {
    for (const auto& s : sp.separators) {
      const auto l = link(r.name, s.name);
      b.add_constraint("link_needs_source[" + r.name + "," + s.name + "]", {{{l, -1.0}}, {{l, src(r.name), 1.0}}},
                       Sense::eq, 0.0);
      b.add_constraint("link_needs_sink[" + r.name + "," + s.name + "]", {{{l, -1.0}}, {{l, sink(s.name), 1.0}}},
                       Sense::eq, 0.0);
    }
  }
  for (const auto& r : sp.reactors) {
    ProgramBuilder::Row row{{{src(r.name), -1.0}}, {}};
    for (const auto& s : sp.separators) row.linear.emplace_back(link(r.name, s.name), 1.0);
    b.add_constraint("reactor_outflow[" + r.name + "]", row, Sense::ge, 0.0);
  }
  for (const auto& s : sp.separators) {
    ProgramBuilder::Row row{{{sink(s.name), -1.0}}, {}};
    for (const auto& r : sp.reactors) row.linear.emplace_back(link(r.name, s.name), 1.0);
    b.add_constraint("separator_inflow[" + s.name + "]", row, Sense::ge, 0.0);
  }

  {
    ProgramBuilder::Row cat;
    ProgramBuilder::Row an;
    for (const auto& c : sp.cations) cat.linear.emplace_back(z(c), 1.0);
    for (const auto& a : sp.anions) an.linear.emplace_back(z(a), 1.0);
    b.add_constraint("one_cation", cat, Sense::eq, 1.0);
    b.add_constraint("one_anion", an, Sense::eq, 1.0);
  }
  for (const auto& c : sp.cations) {
    for (const auto& a : sp.anions) {
      b.add_constraint("pair_indicator[" + c + "," + a + "]", {{{w(c, a), 1.0}}, {{z(c), z(a), -1.0}}}, Sense::eq,
                       0.0);
    }
  }

  std::vector<std::string> projection;
  for (const auto& r : sp.reactors) projection.push_back(y(r.name));
  for (const auto& s : sp.separators) projection.push_back(y(s.name));
  for (const auto& c : sp.cations) projection.push_back(z(c));
  for (const auto& a : sp.anions) projection.push_back(z(a));
  b.set_projection(projection);
  return b.build();
}

// A discrete choice as seen by the continuous subproblem.
struct IlConfiguration {
  std::vector<std::uint8_t> reactor_on;
  std::vector<std::uint8_t> separator_on;
  std::size_t cation = 0;
  std::size_t anion = 0;
};

// Reads a projected assignment (reactor bits, separator bits, cation bits,
// anion bits). Throws ModelError for selections the discrete model forbids.
inline IlConfiguration il_configuration(const IlDesignSpace& sp, std::span<const std::uint8_t> projected) {
  const std::size_t nr = sp.reactors.size();
  const std::size_t ns = sp.separators.size();
  const std::size_t nc = sp.cations.size();
  const std::size_t na = sp.anions.size();
  require_length(projected.size(), nr + ns + nc + na, "ionic-liquid configuration");
  IlConfiguration cfg;
  cfg.reactor_on.assign(projected.begin(), projected.begin() + static_cast<std::ptrdiff_t>(nr));
  cfg.separator_on.assign(projected.begin() + static_cast<std::ptrdiff_t>(nr),
                          projected.begin() + static_cast<std::ptrdiff_t>(nr + ns));
  auto pick_one = [&](std::size_t first, std::size_t count, const char* what) {
    std::size_t chosen = count;
    for (std::size_t k = 0; k < count; ++k) {
      if (!projected[first + k]) continue;
      if (chosen != count) throw ModelError(std::string("more than one ") + what + " selected");
      chosen = k;
    }
    if (chosen == count) throw ModelError(std::string("no ") + what + " selected");
    return chosen;
  };
  cfg.cation = pick_one(nr + ns, nc, "cation");
  cfg.anion = pick_one(nr + ns + nc, na, "anion");
  if (std::none_of(cfg.reactor_on.begin(), cfg.reactor_on.end(), [](auto v) { return v != 0; })) {
    throw ModelError("configuration selects no reactor");
  }
  if (std::none_of(cfg.separator_on.begin(), cfg.separator_on.end(), [](auto v) { return v != 0; })) {
    throw ModelError("configuration selects no separator");
  }
  return cfg;
}

inline double il_fixed_cost(const IlDesignSpace& sp, const IlConfiguration& cfg) {
  double c = 0.0;
  for (std::size_t r = 0; r < sp.reactors.size(); ++r) {
    if (cfg.reactor_on[r]) c += sp.reactors[r].c_fixed;
  }
  for (std::size_t s = 0; s < sp.separators.size(); ++s) {
    if (cfg.separator_on[s]) c += sp.separators[s].c_fixed;
  }
  return c;
}

// Stream flows of the network. Unselected units carry zero flow.
struct IlFlows {
  std::vector<double> reactor_in;                 // source -> r
  std::vector<std::vector<double>> link;          // r -> s
  std::vector<double> separator_out;              // s -> sink

  double separator_in(std::size_t s) const {
    double v = 0.0;
    for (const auto& row : link) v += row[s];
    return v;
  }
  double reactor_out(std::size_t r) const {
    double v = 0.0;
    for (double x : link[r]) v += x;
    return v;
  }
};

inline double il_continuous_objective(const IlDesignSpace& sp, const IlConfiguration& cfg, const IlFlows& x) {
  double obj = il_fixed_cost(sp, cfg);
  for (std::size_t r = 0; r < sp.reactors.size(); ++r) {
    obj += sp.reactors[r].c_inlet * std::pow(std::max(0.0, x.reactor_in[r]), 0.6);
  }
  for (std::size_t s = 0; s < sp.separators.size(); ++s) {
    const double in = x.separator_in(s);
    obj += sp.separators[s].c_inlet * in * in + sp.separators[s].c_waste * (in - x.separator_out[s]);
  }
  return obj;
}

// Largest absolute violation over every constraint of the continuous model:
// unit flow bounds, reactor conversion, both big-M separation rows for every
// (separator, cation, anion), demand and non-negativity.
inline double il_constraint_violation(const IlDesignSpace& sp, const IlConfiguration& cfg, const IlFlows& x) {
  double worst = 0.0;
  auto over = [&](double v) { worst = std::max(worst, v); };
  const std::size_t nr = sp.reactors.size();
  const std::size_t ns = sp.separators.size();
  for (std::size_t r = 0; r < nr; ++r) {
    const double y = cfg.reactor_on[r];
    over(sp.reactors[r].f_lower * y - x.reactor_in[r]);
    over(x.reactor_in[r] - sp.reactors[r].f_upper * y);
    over(std::abs(x.reactor_out(r) - sp.reactors[r].alpha * x.reactor_in[r]));
    over(-x.reactor_in[r]);
    for (double f : x.link[r]) over(-f);
  }
  double delivered = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    const double y = cfg.separator_on[s];
    const double in = x.separator_in(s);
    const double out = x.separator_out[s];
    over(sp.separators[s].f_lower * y - in);
    over(in - sp.separators[s].f_upper * y);
    over(-out);
    for (std::size_t c = 0; c < sp.cations.size(); ++c) {
      for (std::size_t a = 0; a < sp.anions.size(); ++a) {
        const double zc = c == cfg.cation ? 1.0 : 0.0;
        const double za = a == cfg.anion ? 1.0 : 0.0;
        const double relax = sp.big_m * (2.0 - zc - za);
        const double target = sp.separators[s].beta[c][a] * in;
        over(target - relax - out);
        over(out - target - relax);
      }
    }
    delivered += out;
  }
  over(sp.demand - delivered);
  return worst;
}

struct IlContinuousResult {
  std::string status;  // "ok" or "continuous-infeasible"
  double objective = std::numeric_limits<double>::infinity();
  IlFlows flows;
  std::size_t evaluations = 0;
};

namespace detail {

// Decision vector: inlet flow of every selected reactor, then inlet flow of
// every selected separator except the last one, which takes the remaining
// reactor output.
struct IlReducedModel {
  const IlDesignSpace& sp;
  const IlConfiguration& cfg;
  std::vector<std::size_t> reactors;
  std::vector<std::size_t> separators;

  IlReducedModel(const IlDesignSpace& s, const IlConfiguration& c) : sp(s), cfg(c) {
    for (std::size_t r = 0; r < sp.reactors.size(); ++r) {
      if (cfg.reactor_on[r]) reactors.push_back(r);
    }
    for (std::size_t k = 0; k < sp.separators.size(); ++k) {
      if (cfg.separator_on[k]) separators.push_back(k);
    }
  }

  std::size_t dim() const { return reactors.size() + separators.size() - 1; }

  void bounds(std::vector<double>& lo, std::vector<double>& hi) const {
    for (auto r : reactors) {
      lo.push_back(sp.reactors[r].f_lower);
      hi.push_back(sp.reactors[r].f_upper);
    }
    for (std::size_t k = 0; k + 1 < separators.size(); ++k) {
      lo.push_back(sp.separators[separators[k]].f_lower);
      hi.push_back(sp.separators[separators[k]].f_upper);
    }
  }

  // Full stream flows for a decision vector, or false when the implied last
  // separator inlet leaves its bounds or demand is missed.
  bool expand(std::span<const double> v, IlFlows& x) const {
    const std::size_t nr = sp.reactors.size();
    const std::size_t ns = sp.separators.size();
    x.reactor_in.assign(nr, 0.0);
    x.link.assign(nr, std::vector<double>(ns, 0.0));
    x.separator_out.assign(ns, 0.0);
    std::vector<double> sep_in(ns, 0.0);
    double produced = 0.0;
    for (std::size_t k = 0; k < reactors.size(); ++k) {
      x.reactor_in[reactors[k]] = v[k];
      produced += sp.reactors[reactors[k]].alpha * v[k];
    }
    double assigned = 0.0;
    for (std::size_t k = 0; k + 1 < separators.size(); ++k) {
      sep_in[separators[k]] = v[reactors.size() + k];
      assigned += v[reactors.size() + k];
    }
    const std::size_t last = separators.back();
    const double rest = produced - assigned;
    constexpr double eps = 1e-12;
    if (rest < sp.separators[last].f_lower - eps || rest > sp.separators[last].f_upper + eps) return false;
    sep_in[last] = std::clamp(rest, sp.separators[last].f_lower, sp.separators[last].f_upper);

    double total_in = 0.0;
    for (auto s : separators) total_in += sep_in[s];
    double delivered = 0.0;
    for (auto s : separators) {
      x.separator_out[s] = sp.separators[s].beta[cfg.cation][cfg.anion] * sep_in[s];
      delivered += x.separator_out[s];
      if (total_in <= 0.0) continue;
      for (auto r : reactors) {
        x.link[r][s] = sp.reactors[r].alpha * x.reactor_in[r] * sep_in[s] / total_in;
      }
    }
    return delivered >= sp.demand - eps;
  }
};

}  // namespace detail

// Best continuous operating point for a fixed discrete configuration.
inline IlContinuousResult il_continuous_solve(const IlDesignSpace& sp, std::span<const std::uint8_t> projected,
                                              std::uint64_t seed, std::size_t budget = 20000,
                                              const PatternSearchOptions& opts = {}) {
  sp.validate();
  const IlConfiguration cfg = il_configuration(sp, projected);
  const detail::IlReducedModel model(sp, cfg);
  std::vector<double> lo;
  std::vector<double> hi;
  model.bounds(lo, hi);
  IlFlows scratch;
  auto f = [&](std::span<const double> v) -> Evaluation {
    if (!model.expand(v, scratch)) return {std::numeric_limits<double>::infinity(), false, "constraint-violation"};
    return {il_continuous_objective(sp, cfg, scratch), true, "ok"};
  };
  const auto ps = pattern_search(f, lo, hi, budget, seed, opts);
  IlContinuousResult out;
  out.evaluations = ps.evaluations;
  if (ps.status != "ok") {
    out.status = "continuous-infeasible";
    return out;
  }
  out.status = "ok";
  model.expand(ps.best_params, out.flows);
  out.objective = il_continuous_objective(sp, cfg, out.flows);
  return out;
}

inline nlohmann::json to_json(const IlDesignSpace& sp, const IlFlows& x) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t r = 0; r < sp.reactors.size(); ++r) {
    j["src-" + sp.reactors[r].name] = x.reactor_in[r];
    for (std::size_t s = 0; s < sp.separators.size(); ++s) {
      j[sp.reactors[r].name + "-" + sp.separators[s].name] = x.link[r][s];
    }
  }
  for (std::size_t s = 0; s < sp.separators.size(); ++s) j[sp.separators[s].name + "-sink"] = x.separator_out[s];
  return j;
}

}  // namespace flowising
