// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "flowising/cli.hpp"
#include "flowising/flowsheets/drug_substance.hpp"
#include "flowising/flowsheets/ionic_liquid.hpp"
#include "flowising/metrics.hpp"
#include "flowising/reformulate.hpp"
#include "flowising/solvers/annealing.hpp"
#include "flowising/solvers/branch_and_bound.hpp"
#include "flowising/solvers/brute_force.hpp"
#include "flowising/solvers/exact.hpp"
#include "support.hpp"

using namespace flowising;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << title << " (" << std::fixed
            << std::setprecision(2) << elapsed(t0) << " s)" << o.detail.str() << std::endl;
}

struct Model {
  std::string name;
  BinaryProgram program;
  std::size_t expected;
};

std::vector<Model> bundled() {
  return {{"il", build_il_discrete(il_synthetic_space()), 84}, {"ds", build_ds_discrete(ds_synthetic_space()), 36}};
}

double feasible_minimum(const SampleSet& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : s.records) {
    if (r.feasible && r.objective) best = std::min(best, *r.objective);
  }
  return best;
}

fs::path scratch_root() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / ("flowising_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int cli_run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  return cli::run(args, out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files[e.path().filename().string()] = slurp(e.path());
  }
  return files;
}

}  // namespace

int main() {
  criterion(1, "feasible-set cardinality 84 (IL) and 36 (DS)", [](Outcome& o) {
    for (const auto& m : bundled()) {
      auto t0 = Clock::now();
      const auto bf = detail::covered_configs(brute_force(m.program), m.program.projection).size();
      const double t_bf = elapsed(t0);
      t0 = Clock::now();
      const auto bb =
          detail::covered_configs(branch_and_bound(m.program, {BbMode::enumerate_all}), m.program.projection).size();
      const double t_bb = elapsed(t0);
      o.detail << " " << m.name << ": brute " << bf << ", bb " << bb << ";";
      o.require(bf == m.expected && bb == m.expected, m.name + " count");
      o.require(t_bf < 10.0 && t_bb < 10.0, m.name + " runtime");
    }
  });

  criterion(2, "branch-and-bound and QUBO ground state match the brute-force optimum", [](Outcome& o) {
    const auto t0 = Clock::now();
    for (const auto& m : bundled()) {
      const double reference = feasible_minimum(brute_force(m.program));
      const double bb = feasible_minimum(branch_and_bound(m.program));
      const auto r = reformulate(m.program);
      const auto ground = exact_minimum(r.qubo, r.var_map);
      const auto dec = decode(r, ground.assignment);
      o.detail << " " << m.name << ": optimum " << format_number(reference) << ", qubo "
               << format_number(ground.energy) << ";";
      o.require(std::abs(bb - reference) <= 1e-9, m.name + " bb optimum");
      o.require(dec.feasible, m.name + " ground state feasible");
      o.require(std::abs(dec.objective - reference) <= 1e-9, m.name + " ground state objective");
      o.require(std::abs(ground.energy - reference) <= 1e-9, m.name + " ground state energy");
    }
    o.require(elapsed(t0) < 60.0, "runtime");
  });

  criterion(3, "penalty reformulation recovers the optimum on 200 random programs", [](Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    int recovered = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = testing_support::random_program(rng, 8, 4);
      const auto want = testing_support::naive_ip_optimum(p);
      const auto r = reformulate(p);
      const auto ground = exact_minimum(r.qubo, r.var_map);
      const auto dec = decode(r, ground.assignment);
      if (want.feasible && dec.feasible && std::abs(dec.objective - want.objective) <= 1e-9 &&
          std::abs(ground.energy - want.objective) <= 1e-9) {
        ++recovered;
      }
    }
    o.detail << " " << recovered << "/200";
    o.require(recovered == 200, "recovered");
    o.require(elapsed(t0) < 120.0, "runtime");
  });

  criterion(4, "Rosenberg penalty truth table", [](Outcome& o) {
    const double rho = 7.0;
    for (int x = 0; x <= 1; ++x) {
      for (int y = 0; y <= 1; ++y) {
        for (int w = 0; w <= 1; ++w) {
          const double pen = rho * rosenberg_penalty(x, y, w);
          const bool consistent = w == x * y;
          o.require(consistent ? pen == 0.0 : pen >= rho,
                    "(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(w) + ")");
        }
      }
    }
  });

  criterion(5, "annealing covers every configuration within five seeded runs", [](Outcome& o) {
    const auto t0 = Clock::now();
    for (const auto& m : bundled()) {
      const double optimum = feasible_minimum(brute_force(m.program));
      const auto r = reformulate(m.program);
      std::set<Bits> covered;
      int runs = 0;
      bool optimum_every_run = true;
      for (std::uint64_t seed = 1; seed <= 5 && covered.size() < m.expected; ++seed) {
        SaParams sp;
        sp.seed = seed;
        const auto decoded = decode_samples(r, simulated_annealing(r.qubo, sp));
        const auto found = detail::covered_configs(decoded, m.program.projection);
        covered.insert(found.begin(), found.end());
        optimum_every_run = optimum_every_run && std::abs(feasible_minimum(decoded) - optimum) <= 1e-9;
        ++runs;
      }
      o.detail << " " << m.name << ": " << covered.size() << "/" << m.expected << " in " << runs << " run(s);";
      o.require(covered.size() == m.expected, m.name + " coverage");
      o.require(optimum_every_run, m.name + " optimum in every run");
    }
    o.require(elapsed(t0) < 300.0, "runtime");
  });

  criterion(6, "time-to-target arithmetic and imported-sample report", [](Outcome& o) {
    o.require(ttt(0.003, 1.0, 0.99) == 0.003, "p = 1 gives tau");
    o.require(std::abs(ttt(1.0, 0.5, 0.99) - 6.6439) <= 1e-3, "ttt(1, 0.5, 0.99)");
    o.require(std::isinf(ttt(1.0, 0.0, 0.99)), "p = 0 gives infinity");

    const auto dir = scratch_root() / "c6";
    o.require(cli_run({"solve", "--case", "ds", "--solver", "sa", "--reads", "300", "--seed", "6", "--out",
                       (dir / "sa").string()}) == 0,
              "sa run");
    auto device = nlohmann::json::parse(slurp(dir / "sa" / "qubo_samples.json"));
    device["solver"] = "device";
    device["tau_seconds"] = 0.02;
    std::ofstream(dir / "device.json") << device.dump();
    o.require(cli_run({"solve", "--case", "ds", "--solver", "import", "--samples", (dir / "device.json").string(),
                       "--seed", "6", "--out", (dir / "imported").string()}) == 0,
              "import");
    o.require(cli_run({"solve", "--case", "ds", "--solver", "oracle", "--seed", "6", "--out",
                       (dir / "oracle").string()}) == 0,
              "oracle");
    o.require(cli_run({"report", (dir / "imported" / "samples.json").string(), "--reference",
                       (dir / "oracle" / "samples.json").string(), "--seed", "6", "--out", (dir / "report").string()}) ==
                  0,
              "report");
    std::istringstream csv(slurp(dir / "report" / "report.csv"));
    std::string header;
    std::string row;
    std::getline(csv, header);
    std::getline(csv, row);
    o.detail << " row: " << row;
    o.require(header == "solver,tau,ttopt99,ttfeas99,coverage", "table columns");
    o.require(row.rfind("device,0.02,", 0) == 0, "imported row");
  });

  criterion(7, "continuous evaluator on the single-path instance", [](Outcome& o) {
    IlDesignSpace sp;
    sp.reactors = {{"R", 40.0, 5.0, 0.8, 3.0, 0.0, 200.0}};
    sp.separators = {{"S", 20.0, 4.0, 0.05, 1.0, 0.0, 200.0, {{1.0}}}};
    sp.cations = {"C"};
    sp.anions = {"A"};
    sp.demand = 30.0;
    sp.big_m = 1000.0;
    const Bits all_on{1, 1, 1, 1};
    const auto res = il_continuous_solve(sp, all_on, 7);
    // With beta = 1 the separator passes the demand straight through.
    const double t = 30.0;
    const double u = t / 0.8;
    const double closed = 60.0 + 3.0 * std::pow(u, 0.6) + 0.05 * t * t;
    o.detail << " objective " << format_number(res.objective) << " vs " << format_number(closed) << ";";
    o.require(res.status == "ok", "status");
    o.require(std::abs(res.flows.reactor_in[0] - u) <= 1e-6, "reactor inlet");
    o.require(std::abs(res.flows.separator_out[0] - t) <= 1e-6, "separator outlet");
    o.require(std::abs(res.objective - closed) <= 1e-6 * std::max(1.0, closed), "objective");

    const auto il = il_synthetic_space();
    const auto program = build_il_discrete(il);
    const auto configs = rank_configurations(brute_force(program), program.projection).configs;
    double worst_violation = 0.0;
    bool monotone = true;
    for (const auto& cfg : configs) {
      const auto full = il_continuous_solve(il, cfg, 7);
      if (full.status == "ok") {
        worst_violation = std::max(worst_violation, il_constraint_violation(il, il_configuration(il, cfg), full.flows));
      }
    }
    for (std::size_t k = 0; k < configs.size(); k += 9) {
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t budget : {1, 10, 50, 200, 1000, 5000, 20000}) {
        const double v = il_continuous_solve(il, configs[k], 7, budget).objective;
        monotone = monotone && v <= prev;
        prev = v;
      }
    }
    o.detail << " worst violation " << worst_violation;
    o.require(monotone, "best value non-increasing in budget");
    o.require(worst_violation <= 1e-6, "constraint violation");
  });

  criterion(8, "Pareto front of the IL sweep", [](Outcome& o) {
    cli::RunConfig cfg;
    cfg.command = "sweep";
    cfg.case_name = "il";
    cfg.seed = 8;
    cfg.threads = 1;
    std::vector<ParetoPoint> points;
    for (const auto& r : cli::sweep_rows(cfg)) {
      if (r.status == "ok") points.push_back({to_string(r.config), r.discrete_objective, r.continuous_objective});
    }
    const auto front = pareto_front(points);
    o.detail << " " << points.size() << " points, front " << front.size();
    o.require(points.size() == 84, "84 swept points");
    o.require(!front.empty(), "non-empty front");
    for (const auto& f : front) {
      for (const auto& p : points) o.require(!dominates(p, f), f.config_id + " dominated by " + p.config_id);
    }
    o.require(pareto_front(front) == front, "idempotent");
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
      auto shuffled = points;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      o.require(pareto_front(shuffled) == front, "permutation-stable");
    }
  });

  criterion(9, "repeated commands with the same seed write identical files", [](Outcome& o) {
    const auto root = scratch_root() / "c9";
    fs::create_directories(root);
    o.require(cli_run({"solve", "--case", "ds", "--solver", "oracle", "--seed", "9", "--out",
                       (root / "oracle").string()}) == 0,
              "oracle");
    auto device = nlohmann::json::parse(slurp(root / "oracle" / "samples.json"));
    device["solver"] = "device";
    device["deterministic"] = false;
    device["tau_seconds"] = 0.01;
    device["records"] = nlohmann::json::array({device["records"][0], device["records"][5]});
    std::ofstream(root / "device.json") << device.dump();
    const std::vector<std::vector<std::string>> commands{
        {"build", "--case", "il", "--seed", "9"},
        {"build", "--case", "ds", "--rho", "40", "--seed", "9"},
        {"solve", "--case", "ds", "--solver", "sa", "--reads", "200", "--seed", "9"},
        {"solve", "--case", "il", "--solver", "sa", "--reads", "100", "--sweeps", "500", "--seed", "9"},
        {"solve", "--case", "il", "--solver", "bb", "--seed", "9"},
        {"solve", "--case", "il", "--solver", "bb-enumerate", "--seed", "9"},
        {"solve", "--case", "ds", "--solver", "bb-pool", "--pool-size", "5", "--seed", "9"},
        {"solve", "--case", "ds", "--solver", "oracle", "--seed", "9"},
        {"solve", "--case", "ds", "--solver", "import", "--samples", (root / "device.json").string(), "--seed", "9"},
        {"report", (root / "device.json").string(), "--target", "opt", "--seed", "9"},
        {"sweep", "--case", "il", "--seed", "9"},
        {"sweep", "--case", "ds", "--seed", "9"},
    };
    for (std::size_t k = 0; k < commands.size(); ++k) {
      std::map<std::string, std::string> first;
      for (int rep = 0; rep < 2; ++rep) {
        const auto dir = root / (std::to_string(k) + "_" + std::to_string(rep));
        auto args = commands[k];
        args.insert(args.end(), {"--out", dir.string()});
        const int code = cli_run(args);
        o.require(code == 0, commands[k][0] + " #" + std::to_string(k) + " exit " + std::to_string(code));
        if (rep == 0) first = snapshot(dir);
        else o.require(!first.empty() && snapshot(dir) == first, "command #" + std::to_string(k) + " differs");
      }
    }
    o.detail << " " << commands.size() << " commands";
  });

  fs::remove_all(scratch_root());
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
