#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>

#include "flowising/flowsheets/drug_substance.hpp"
#include "flowising/flowsheets/ionic_liquid.hpp"
#include "flowising/flowsheets/pattern_search.hpp"
#include "flowising/sample_set.hpp"
#include "flowising/solvers/branch_and_bound.hpp"
#include "flowising/solvers/brute_force.hpp"
#include "il_oracle.hpp"

using namespace flowising;
using Catch::Approx;

namespace {

std::size_t projected_count(const BinaryProgram& p) {
  return brute_force(p).metadata.at("projected_feasible").get<std::size_t>();
}

std::vector<Bits> il_configs(const IlDesignSpace& sp) {
  const auto p = build_il_discrete(sp);
  BbOptions opts;
  opts.mode = BbMode::enumerate_all;
  std::vector<Bits> out;
  for (const auto& r : branch_and_bound(p, opts).records) out.push_back(project(r.assignment, p.projection));
  std::sort(out.begin(), out.end());
  return out;
}

// One reactor, one separator, one ion pair with complete separation.
IlDesignSpace single_path_space(double demand, double sep_lower, double reactor_lower, double alpha) {
  IlDesignSpace sp;
  sp.reactors = {{"R", 40.0, 5.0, alpha, 3.0, reactor_lower, 200.0}};
  sp.separators = {{"S", 20.0, 4.0, 0.05, 1.0, sep_lower, 200.0, {{1.0}}}};
  sp.cations = {"C"};
  sp.anions = {"A"};
  sp.demand = demand;
  sp.big_m = 1000.0;
  return sp;
}

std::size_t count_on(const std::vector<std::uint8_t>& v) {
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
}

}  // namespace

TEST_CASE("bundled models have 84 and 36 configurations") {
  const auto il = build_il_discrete(il_synthetic_space());
  const auto ds = build_ds_discrete(ds_synthetic_space());
  CHECK(il.num_vars() == 24);
  CHECK(ds.num_vars() == 19);
  CHECK(projected_count(il) == 84);
  CHECK(projected_count(ds) == 36);
}

TEST_CASE("configuration counts do not depend on cost values") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 3; ++trial) {
    auto il = il_synthetic_space();
    for (auto& r : il.reactors) {
      r.c_fixed *= scale(rng);
      r.c_oper *= scale(rng);
    }
    for (auto& s : il.separators) {
      s.c_fixed *= scale(rng);
      s.c_oper *= scale(rng);
    }
    CHECK(projected_count(build_il_discrete(il)) == 84);

    auto ds = ds_synthetic_space();
    for (auto& [f, c] : ds.cost) c *= scale(rng);
    CHECK(projected_count(build_ds_discrete(ds)) == 36);
  }
}

TEST_CASE("ionic-liquid infeasibility examples") {
  const auto p = build_il_discrete(il_synthetic_space());
  const auto best = branch_and_bound(p).records.front().assignment;

  auto no_sep = best;
  for (const char* v : {"y_S1", "y_S2", "y_S3", "f_S1_sink", "f_S2_sink", "f_S3_sink"}) no_sep[p.index_of(v)] = 0;
  for (const auto& name : p.var_names) {
    if (name.rfind("f_R", 0) == 0) no_sep[p.index_of(name)] = 0;
  }
  const auto rep = is_feasible(p, no_sep);
  CHECK_FALSE(rep.feasible);
  CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                    [](const std::string& v) { return v.find("sink_activation") != std::string::npos; }));

  auto bad_pair = best;
  const std::string z_on = bad_pair[p.index_of("z_C1")] ? "C2" : "C1";
  bad_pair[p.index_of("w_" + z_on + "_A1")] = 1;
  const auto rep2 = is_feasible(p, bad_pair);
  CHECK_FALSE(rep2.feasible);
  CHECK(std::any_of(rep2.violations.begin(), rep2.violations.end(),
                    [](const std::string& v) { return v.find("pair_indicator") != std::string::npos; }));
}

TEST_CASE("drug-substance: all-zero interior flows break the node balance") {
  const auto p = build_ds_discrete(ds_synthetic_space());
  Bits x(p.num_vars(), 0);
  x[p.index_of("f00")] = 1;
  x[p.index_of("f18")] = 1;
  const auto rep = is_feasible(p, x);
  CHECK_FALSE(rep.feasible);
  CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                    [](const std::string& v) { return v.find("balance[feed_split]") != std::string::npos; }));
}

TEST_CASE("ionic-liquid configurations read from projected assignments") {
  const auto sp = il_synthetic_space();
  const auto configs = il_configs(sp);
  REQUIRE(configs.size() == 84);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> shape;
  for (const auto& c : configs) {
    const auto cfg = il_configuration(sp, c);
    ++shape[{count_on(cfg.reactor_on), count_on(cfg.separator_on), cfg.cation * 2 + cfg.anion}];
  }
  // 3 reactor patterns x 7 separator subsets x 4 ion pairs.
  std::size_t total = 0;
  for (const auto& [k, v] : shape) total += v;
  CHECK(total == 84);
  CHECK_THROWS_AS(il_configuration(sp, Bits{1, 0, 1, 0, 0, 1, 1, 1, 0}), ModelError);
  CHECK_THROWS_AS(il_configuration(sp, Bits{0, 0, 1, 0, 0, 1, 0, 1, 0}), ModelError);
  CHECK_THROWS_AS(il_continuous_solve(sp, Bits{1, 0, 0, 0, 0, 1, 0, 1, 0}, 1), ModelError);
  CHECK_THROWS_AS(il_configuration(sp, Bits{1, 0}), DimensionError);
}

TEST_CASE("single reactor and separator with complete separation match the closed form") {
  struct Case {
    double demand, sep_lower, reactor_lower, alpha;
  };
  // Demand active, separator bound active, reactor bound active.
  for (const auto& c : {Case{30.0, 1.0, 1.0, 0.8}, Case{5.0, 25.0, 1.0, 0.7}, Case{5.0, 1.0, 50.0, 0.9}}) {
    const auto sp = single_path_space(c.demand, c.sep_lower, c.reactor_lower, c.alpha);
    const Bits all_on{1, 1, 1, 1};
    const auto res = il_continuous_solve(sp, all_on, 3);
    REQUIRE(res.status == "ok");
    const double t_star = std::max({c.demand, c.sep_lower, c.alpha * c.reactor_lower});
    INFO("demand " << c.demand << ", separator lower " << c.sep_lower << ", reactor lower " << c.reactor_lower);
    CHECK(std::abs(res.flows.separator_out[0] - t_star) <= 1e-6);
    CHECK(std::abs(res.flows.link[0][0] - t_star) <= 1e-6);
    CHECK(std::abs(res.flows.reactor_in[0] - t_star / c.alpha) <= 1e-6 / c.alpha);
    const auto cfg = il_configuration(sp, all_on);
    CHECK(il_constraint_violation(sp, cfg, res.flows) <= 1e-6);
    const double u = t_star / c.alpha;
    CHECK(res.objective == Approx(60.0 + 3.0 * std::pow(u, 0.6) + 0.05 * t_star * t_star).margin(1e-5));
  }
}

TEST_CASE("zero demand with zero lower bounds leaves only the fixed costs") {
  const auto sp = single_path_space(0.0, 0.0, 0.0, 0.8);
  const auto res = il_continuous_solve(sp, Bits{1, 1, 1, 1}, 9);
  REQUIRE(res.status == "ok");
  CHECK(res.objective == Approx(60.0).margin(1e-9));
  CHECK(res.flows.reactor_in[0] == 0.0);
  CHECK(res.flows.separator_out[0] == 0.0);
}

TEST_CASE("best continuous value never worsens with a larger budget") {
  const auto sp = il_synthetic_space();
  const auto configs = il_configs(sp);
  for (std::size_t k = 0; k < configs.size(); k += 7) {
    double prev = INFINITY;
    for (std::size_t budget : {1, 2, 3, 5, 10, 25, 100, 400, 2000, 20000}) {
      const auto res = il_continuous_solve(sp, configs[k], 11, budget);
      CHECK(res.evaluations <= budget);
      CHECK(res.objective <= prev);
      prev = res.objective;
    }
  }
}

TEST_CASE("every returned operating point satisfies the continuous model") {
  const auto sp = il_synthetic_space();
  for (const auto& c : il_configs(sp)) {
    const auto res = il_continuous_solve(sp, c, 5);
    REQUIRE(res.status == "ok");
    const auto cfg = il_configuration(sp, c);
    CHECK(il_constraint_violation(sp, cfg, res.flows) <= 1e-6);
    CHECK(il_continuous_objective(sp, cfg, res.flows) == Approx(res.objective).margin(1e-9));
  }
}

TEST_CASE("single-path configurations reach their analytic optimum") {
  const auto sp = il_synthetic_space();
  std::size_t checked = 0;
  for (const auto& c : il_configs(sp)) {
    const auto cfg = il_configuration(sp, c);
    if (count_on(cfg.reactor_on) != 1 || count_on(cfg.separator_on) != 1) continue;
    const auto exact = il_oracle::single_path(sp, cfg);
    const auto res = il_continuous_solve(sp, c, 1);
    INFO(to_string(c));
    CHECK(res.objective == Approx(exact.objective).margin(1e-5));
    double delivered = 0.0;
    for (double v : res.flows.separator_out) delivered += v;
    CHECK(delivered >= sp.demand - 1e-9);
    ++checked;
  }
  CHECK(checked == 24);
}

TEST_CASE("ranking of all 84 configurations reproduces the grid-search best") {
  const auto sp = il_synthetic_space();
  const auto configs = il_configs(sp);
  double best_ps = INFINITY;
  double best_grid = INFINITY;
  Bits arg_ps;
  Bits arg_grid;
  double worst_gap = 0.0;
  for (const auto& c : configs) {
    const auto cfg = il_configuration(sp, c);
    const auto res = il_continuous_solve(sp, c, 1);
    const bool single = count_on(cfg.reactor_on) == 1 && count_on(cfg.separator_on) == 1;
    const double reference = single ? il_oracle::single_path(sp, cfg).objective : il_oracle::optimum(sp, cfg);
    // Returned points are feasible, so they cannot undercut the reference.
    CHECK(res.objective >= reference - 1e-6);
    worst_gap = std::max(worst_gap, (res.objective - reference) / reference);
    if (res.objective < best_ps) {
      best_ps = res.objective;
      arg_ps = c;
    }
    if (reference < best_grid) {
      best_grid = reference;
      arg_grid = c;
    }
  }
  CHECK(arg_ps == arg_grid);
  CHECK(best_ps == Approx(best_grid).margin(1e-5));
  // Coordinate polling can stall on the demand hyperplane when several
  // separators share the load; the stall stays small on this data.
  CHECK(worst_gap <= 0.02);
}

TEST_CASE("pattern search on a quadratic") {
  auto f = [](std::span<const double> x) { return Evaluation{(x[0] - 0.3) * (x[0] - 0.3), true, "ok"}; };
  const std::vector<double> lo{0.0};
  const std::vector<double> hi{1.0};
  const auto res = pattern_search(f, lo, hi, 200, 4);
  CHECK(res.status == "ok");
  CHECK(res.evaluations <= 200);
  CHECK(std::abs(res.best_params[0] - 0.3) <= 1e-4);

  const auto one = pattern_search(f, lo, hi, 1, 4);
  CHECK(one.evaluations == 1);
  CHECK(one.best_params == std::vector<double>{0.5});

  CHECK_THROWS_AS(pattern_search(f, lo, hi, 0, 4), ArgumentError);
  const std::vector<double> bad{2.0};
  CHECK_THROWS_AS(pattern_search(f, bad, hi, 10, 4), ArgumentError);
}

TEST_CASE("pattern search reports evaluator failures") {
  auto f = [](std::span<const double>) { return Evaluation{0.0, false, "simulator crashed"}; };
  const std::vector<double> lo{0.0, 0.0};
  const std::vector<double> hi{1.0, 2.0};
  const auto res = pattern_search(f, lo, hi, 50, 1);
  CHECK(res.status == "no-feasible-evaluation");
  CHECK(res.failure_status == "simulator crashed");
  CHECK(res.failing_params.size() == 2);
  CHECK(res.evaluations == 50);
}

TEST_CASE("black-box runs are deterministic and stay in bounds") {
  const auto sp = ds_synthetic_space();
  const auto bb = ds_synthetic_blackbox(sp, 300);
  const auto p = build_ds_discrete(sp);
  const auto cfg = project(branch_and_bound(p).records.front().assignment, p.projection);
  const auto a = run_blackbox(bb, cfg, 21);
  const auto b = run_blackbox(bb, cfg, 21);
  REQUIRE(a.status == "ok");
  CHECK(a.best_params == b.best_params);
  CHECK(a.best_score == b.best_score);
  CHECK(a.evaluations <= 300);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.best_params[k] >= bb.lower[k]);
    CHECK(a.best_params[k] <= bb.upper[k]);
  }
  CHECK(a.best_score < 0.0);

  BlackBoxObjective empty;
  CHECK_THROWS_AS(run_blackbox(empty, cfg, 1), ArgumentError);
}

TEST_CASE("bundled data files match the built-in design spaces") {
  const std::string dir = FLOWISING_DATA_DIR;
  const auto il = il_space_from_json(read_json_file(dir + "/il_synthetic.json"));
  CHECK(to_json(il) == to_json(il_synthetic_space()));
  CHECK(il.provenance == "synthetic");
  const auto ds = ds_space_from_json(read_json_file(dir + "/ds_synthetic.json"));
  CHECK(to_json(ds) == to_json(ds_synthetic_space()));
  CHECK(ds.provenance == "synthetic");
}

TEST_CASE("design-space schema errors") {
  CHECK_THROWS_AS(il_space_from_json(nlohmann::json::parse(R"({"reactors": []})")), SchemaError);
  auto j = to_json(il_synthetic_space());
  j["reactors"][0]["alpha"] = 1.5;
  CHECK_THROWS_AS(il_space_from_json(j), SchemaError);
  auto d = to_json(ds_synthetic_space());
  d["nodes"][0]["in"].push_back("f99");
  CHECK_THROWS_AS(ds_space_from_json(d), SchemaError);
}
