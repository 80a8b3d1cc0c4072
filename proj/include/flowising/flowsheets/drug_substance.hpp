#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/flowsheets/pattern_search.hpp"
#include "flowising/ip.hpp"

namespace flowising {

struct DsNode {
  std::string name;
  std::vector<std::string> in;
  std::vector<std::string> out;
};

// Logic rule written as a clause: at least one literal holds. A leading '!'
// negates the flow, so {"!f01", "!f10", "f06"} reads (1-f01)+(1-f10)+f06 >= 1.
struct DsRule {
  std::string label;
  std::vector<std::string> literals;
};

struct DsDesignSpace {
  std::vector<std::string> flows;
  std::map<std::string, double> cost;
  std::vector<DsNode> nodes;
  std::vector<DsRule> rules;
  std::string source;
  std::string sink;
  std::vector<std::string> configuration_flows;
  std::string provenance;

  void validate() const {
    std::set<std::string> known(flows.begin(), flows.end());
    if (known.size() != flows.size()) throw ModelError("duplicate flow id");
    if (!known.count(source) || !known.count(sink)) throw ModelError("source and sink flows must be declared");
    std::set<std::string> incident;
    for (const auto& n : nodes) {
      for (const auto* side : {&n.in, &n.out}) {
        for (const auto& f : *side) {
          if (!known.count(f)) throw ModelError("node " + n.name + " references unknown flow '" + f + "'");
          incident.insert(f);
        }
      }
    }
    for (const auto& f : flows) {
      if (!incident.count(f)) throw ModelError("flow '" + f + "' touches no node");
    }
    for (const auto& [f, c] : cost) {
      if (!known.count(f)) throw ModelError("cost given for unknown flow '" + f + "'");
      if (c < 0.0) throw ModelError("flow costs must be non-negative");
    }
    for (const auto& r : rules) {
      if (r.literals.empty()) throw ModelError("rule " + r.label + " has no literals");
      for (const auto& lit : r.literals) {
        const std::string f = !lit.empty() && lit[0] == '!' ? lit.substr(1) : lit;
        if (!known.count(f)) throw ModelError("rule " + r.label + " references unknown flow '" + f + "'");
      }
    }
    for (const auto& f : configuration_flows) {
      if (!known.count(f)) throw ModelError("configuration flow '" + f + "' is not declared");
    }
  }
};

inline nlohmann::json to_json(const DsDesignSpace& sp) {
  nlohmann::json j;
  j["provenance"] = sp.provenance;
  j["flows"] = sp.flows;
  j["cost"] = sp.cost;
  for (const auto& n : sp.nodes) j["nodes"].push_back({{"name", n.name}, {"in", n.in}, {"out", n.out}});
  for (const auto& r : sp.rules) j["rules"].push_back({{"label", r.label}, {"literals", r.literals}});
  j["source"] = sp.source;
  j["sink"] = sp.sink;
  j["configuration_flows"] = sp.configuration_flows;
  return j;
}

inline DsDesignSpace ds_space_from_json(const nlohmann::json& j) {
  try {
    DsDesignSpace sp;
    sp.provenance = j.value("provenance", std::string());
    sp.flows = j.at("flows").get<std::vector<std::string>>();
    sp.cost = j.value("cost", std::map<std::string, double>{});
    for (const auto& n : j.at("nodes")) {
      sp.nodes.push_back({n.at("name").get<std::string>(), n.at("in").get<std::vector<std::string>>(),
                          n.at("out").get<std::vector<std::string>>()});
    }
    for (const auto& r : j.at("rules")) {
      sp.rules.push_back({r.at("label").get<std::string>(), r.at("literals").get<std::vector<std::string>>()});
    }
    sp.source = j.at("source").get<std::string>();
    sp.sink = j.at("sink").get<std::string>();
    sp.configuration_flows = j.at("configuration_flows").get<std::vector<std::string>>();
    sp.validate();
    return sp;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed drug-substance design space: ") + e.what());
  } catch (const ModelError& e) {
    throw SchemaError(e.what());
  }
}

// Superstructure: source -> reactor 1 (PFR f01 | CSTR f02 | batch f03) ->
// bypass f05 or holding tank f06 -> reactor 2 (PFR f08 | CSTR f09 | batch f10)
// -> evaporator -> crystallizer (batch f13 | MSMPR stages f14..f16) ->
// filtration -> sink. Capital costs are synthetic placeholders.
inline DsDesignSpace ds_synthetic_space() {
  DsDesignSpace sp;
  sp.provenance = "synthetic";
  for (int i = 0; i <= 18; ++i) sp.flows.push_back((i < 10 ? "f0" : "f") + std::to_string(i));
  sp.cost = {{"f01", 1.2}, {"f02", 1.5}, {"f03", 0.8}, {"f06", 0.3}, {"f08", 1.2}, {"f09", 1.5}, {"f10", 0.8},
             {"f11", 0.6}, {"f13", 1.0}, {"f14", 0.7}, {"f15", 1.3}, {"f16", 1.9}, {"f17", 0.4}};
  sp.nodes = {
      {"feed_split", {"f00"}, {"f01", "f02", "f03"}},
      {"reactor1_mix", {"f01", "f02", "f03"}, {"f04"}},
      {"tank_split", {"f04"}, {"f05", "f06"}},
      {"tank_mix", {"f05", "f06"}, {"f07"}},
      {"reactor2_split", {"f07"}, {"f08", "f09", "f10"}},
      {"reactor2_mix", {"f08", "f09", "f10"}, {"f11"}},
      {"evaporator", {"f11"}, {"f12"}},
      {"crystallizer_split", {"f12"}, {"f13", "f14", "f15", "f16"}},
      {"crystallizer_mix", {"f13", "f14", "f15", "f16"}, {"f17"}},
      {"filtration", {"f17"}, {"f18"}},
  };
  sp.rules = {
      {"ctb1", {"!f01", "!f10", "f06"}}, {"ctb2", {"!f02", "!f10", "f06"}}, {"ctb3", {"!f03", "!f10", "!f06"}},
      {"ctb4", {"f01", "f02", "f05"}},   {"ctb5", {"f05", "f10"}},
  };
  sp.source = "f00";
  sp.sink = "f18";
  sp.configuration_flows = {"f01", "f02", "f03", "f06", "f08", "f09", "f10", "f13", "f14", "f15", "f16"};
  return sp;
}

inline BinaryProgram build_ds_discrete(const DsDesignSpace& sp) {
  sp.validate();
  ProgramBuilder b;
  for (const auto& f : sp.flows) b.add_var(f);
  for (const auto& [f, c] : sp.cost) {
    if (c != 0.0) b.add_objective(f, c);
  }
  for (const auto& n : sp.nodes) {
    ProgramBuilder::Row row;
    for (const auto& f : n.in) row.linear.emplace_back(f, 1.0);
    for (const auto& f : n.out) row.linear.emplace_back(f, -1.0);
    b.add_constraint("balance[" + n.name + "]", row, Sense::eq, 0.0);
  }
  b.add_constraint("source/sink activation[" + sp.source + "]", {{{sp.source, 1.0}}, {}}, Sense::eq, 1.0);
  b.add_constraint("source/sink activation[" + sp.sink + "]", {{{sp.sink, 1.0}}, {}}, Sense::eq, 1.0);
  for (const auto& r : sp.rules) {
    ProgramBuilder::Row row;
    double rhs = 1.0;
    for (const auto& lit : r.literals) {
      if (lit[0] == '!') {
        row.linear.emplace_back(lit.substr(1), -1.0);
        rhs -= 1.0;
      } else {
        row.linear.emplace_back(lit, 1.0);
      }
    }
    b.add_constraint(r.label, row, Sense::ge, rhs);
  }
  b.set_projection(sp.configuration_flows);
  return b.build();
}

// Synthetic stand-in for the process simulator: two operating parameters
// (residence-time scale in [0.5, 4] and crystallizer temperature in
// [5, 40] C) scored as the negated weighted sum of production rate and mean
// crystal size. Only intended for exercising sweeps and Pareto output.
inline BlackBoxObjective ds_synthetic_blackbox(const DsDesignSpace& sp, std::size_t budget = 400,
                                               double size_weight = 0.5) {
  auto pos = [&](const std::string& f) {
    for (std::size_t k = 0; k < sp.configuration_flows.size(); ++k) {
      if (sp.configuration_flows[k] == f) return static_cast<std::ptrdiff_t>(k);
    }
    return std::ptrdiff_t{-1};
  };
  struct Unit {
    std::ptrdiff_t pos;
    double rate;
    double size;
  };
  const std::vector<Unit> units = {
      {pos("f01"), 1.10, 0.95}, {pos("f02"), 1.00, 1.00}, {pos("f03"), 0.80, 1.05}, {pos("f06"), 0.97, 1.02},
      {pos("f08"), 1.10, 0.95}, {pos("f09"), 1.00, 1.00}, {pos("f10"), 0.80, 1.05}, {pos("f13"), 0.70, 1.40},
      {pos("f14"), 1.00, 0.90}, {pos("f15"), 1.05, 1.00}, {pos("f16"), 1.10, 1.10},
  };
  BlackBoxObjective obj;
  obj.lower = {0.5, 5.0};
  obj.upper = {4.0, 40.0};
  obj.budget = budget;
  obj.evaluate = [units, size_weight](const Bits& cfg, std::span<const double> p) -> Evaluation {
    double rate_factor = 1.0;
    double size_factor = 1.0;
    for (const auto& u : units) {
      if (u.pos >= 0 && static_cast<std::size_t>(u.pos) < cfg.size() && cfg[static_cast<std::size_t>(u.pos)]) {
        rate_factor *= u.rate;
        size_factor *= u.size;
      }
    }
    const double tau = p[0];
    const double temp = p[1];
    // Yield saturates with residence time; throughput falls with it.
    const double rate = rate_factor * (1.0 - std::exp(-1.5 * tau)) / (0.3 + 0.2 * tau);
    // Crystal size peaks at a moderate temperature and grows with residence time.
    const double size = size_factor * (1.0 + 0.3 * std::log1p(tau)) * std::exp(-std::pow((temp - 20.0) / 15.0, 2));
    return {-(rate + size_weight * size), true, "ok"};
  };
  return obj;
}

}  // namespace flowising
