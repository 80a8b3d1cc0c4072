#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/flowsheets/drug_substance.hpp"
#include "flowising/flowsheets/ionic_liquid.hpp"
#include "flowising/flowsheets/pattern_search.hpp"
#include "flowising/ip.hpp"
#include "flowising/metrics.hpp"
#include "flowising/qubo.hpp"
#include "flowising/reformulate.hpp"
#include "flowising/sample_set.hpp"
#include "flowising/solvers/annealing.hpp"
#include "flowising/solvers/branch_and_bound.hpp"
#include "flowising/solvers/brute_force.hpp"

namespace flowising::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSolver = 3;
inline constexpr const char* kOutEnv = "FLOWISING_OUT";

struct RunConfig {
  std::string command;
  std::string case_name = "ds";  // il | ds | custom
  std::string model_path;        // custom case: binary program JSON
  std::string params_path;       // il/ds: design-space JSON (defaults to the bundled synthetic set)
  std::string solver = "oracle";
  std::optional<double> rho;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t reads = 1000;
  std::size_t sweeps = 1000;
  std::optional<double> beta_hot;
  std::optional<double> beta_cold;
  std::size_t pool_size = 10;
  std::size_t threads = 0;
  std::string import_path;
  bool timing = false;
  std::size_t budget = 0;  // sweep: evaluations per configuration (0: engine default)

  // Everything needed to repeat the run. The output directory is left out so
  // the echo is identical wherever the run is written.
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["case"] = case_name;
    if (!model_path.empty()) j["model"] = model_path;
    if (!params_path.empty()) j["params"] = params_path;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    if (rho) j["rho"] = *rho;
    if (command == "solve") {
      j["solver"] = solver;
      if (solver == "sa") {
        j["reads"] = reads;
        j["sweeps"] = sweeps;
        if (beta_hot) j["beta_hot"] = *beta_hot;
        if (beta_cold) j["beta_cold"] = *beta_cold;
      }
      if (solver == "bb-pool") j["pool_size"] = pool_size;
      if (solver == "import") j["samples"] = import_path;
    }
    if (command == "sweep") j["budget"] = budget;
    return j;
  }
};

namespace detail {

struct LoadedCase {
  BinaryProgram program;
  std::optional<IlDesignSpace> il;
  std::optional<DsDesignSpace> ds;
};

inline LoadedCase load_case(const RunConfig& cfg) {
  LoadedCase lc;
  if (cfg.case_name == "il") {
    lc.il = cfg.params_path.empty() ? il_synthetic_space() : il_space_from_json(read_json_file(cfg.params_path));
    lc.program = build_il_discrete(*lc.il);
  } else if (cfg.case_name == "ds") {
    lc.ds = cfg.params_path.empty() ? ds_synthetic_space() : ds_space_from_json(read_json_file(cfg.params_path));
    lc.program = build_ds_discrete(*lc.ds);
  } else if (cfg.case_name == "custom") {
    if (cfg.model_path.empty()) throw ArgumentError("--case custom needs --model <program.json>");
    lc.program = program_from_json(read_json_file(cfg.model_path));
  } else {
    throw ArgumentError("unknown case '" + cfg.case_name + "'");
  }
  return lc;
}

inline std::filesystem::path output_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "flowising_out";
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArgumentError("cannot write '" + path.string() + "'");
  os << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline nlohmann::json with_seed(nlohmann::json j, std::uint64_t seed) {
  j["seed"] = seed;
  return j;
}

inline std::string configurations_summary(const SampleSet& s, const std::vector<std::size_t>& projection) {
  std::set<Bits> configs;
  for (const auto& r : s.records) {
    if (r.feasible) configs.insert(project(r.assignment, projection));
  }
  return std::to_string(configs.size());
}

// Program-level records from an imported file: QUBO-width files are checked
// against the QUBO and decoded, program-width files are re-evaluated.
inline SampleSet import_into_program(const std::string& path, const Reformulation& r, std::ostream& out) {
  const auto j = read_json_file(path);
  auto raw = sample_set_from_json(j);
  if (raw.records.empty()) throw SchemaError("imported sample set has no records");
  const std::size_t width = raw.records.front().assignment.size();
  if (width == r.qubo.num_vars()) {
    ImportOptions opts;
    opts.recompute_against = &r.qubo;
    auto res = import_samples(j, opts);
    if (!res.mismatches.empty()) {
      out << "energy mismatches: " << res.mismatches.size() << " records (stated vs recomputed)\n";
      for (std::size_t k = 0; k < res.mismatches.size() && k < 10; ++k) {
        const auto& m = res.mismatches[k];
        out << "  " << to_string(m.assignment) << " " << format_number(m.stated) << " vs "
            << format_number(m.recomputed) << "\n";
      }
    }
    auto decoded = decode_samples(r, res.samples);
    decoded.metadata["energy_mismatches"] = res.mismatches.size();
    decoded.metadata["imported_level"] = "qubo";
    return decoded;
  }
  if (width == r.source.num_vars()) {
    for (auto& rec : raw.records) {
      rec.objective = objective_value(r.source, rec.assignment);
      rec.feasible = is_feasible(r.source, rec.assignment).feasible;
    }
    raw.metadata["imported_level"] = "program";
    return raw;
  }
  throw SchemaError("imported assignments have width " + std::to_string(width) + "; expected " +
                    std::to_string(r.qubo.num_vars()) + " (QUBO) or " + std::to_string(r.source.num_vars()) +
                    " (program)");
}

inline nlohmann::json projection_json(const BinaryProgram& p) {
  nlohmann::json j = nlohmann::json::array();
  for (auto i : p.projection) j.push_back(i);
  return j;
}

}  // namespace detail

inline int cmd_build(const RunConfig& cfg, std::ostream& out) {
  const auto lc = detail::load_case(cfg);
  ReformulateOptions ro;
  ro.rho = cfg.rho;
  const auto r = reformulate(lc.program, ro);
  const auto dir = detail::output_dir(cfg);
  const std::uint64_t seed = *cfg.seed;
  detail::write_json(dir / "program.json", detail::with_seed(to_json(lc.program), seed));
  detail::write_json(dir / "qubo.json", detail::with_seed(to_json(r.qubo), seed));
  detail::write_json(dir / "reformulation.json", detail::with_seed(sidecar_json(r), seed));
  detail::write_json(dir / "run_config.json", cfg.to_json());

  std::size_t slack = 0;
  for (const auto& g : r.slack_groups) slack += g.bits.size();
  std::size_t fresh_aux = 0;
  for (const auto& a : r.aux_products) fresh_aux += a.reuses_program_var ? 0 : 1;
  out << "variables: " << lc.program.num_vars() << "\n"
      << "constraints: " << lc.program.constraints.size() << "\n"
      << "qubo variables: " << r.qubo.num_vars() << " (program " << lc.program.num_vars() << ", aux " << fresh_aux
      << ", slack " << slack << ")\n"
      << "product gadgets: " << r.aux_products.size() << "\n"
      << "rho: " << format_number(r.penalty_weight) << (r.default_penalty_weight ? " (default)" : "") << "\n"
      << "written to: " << dir.string() << "\n";
  return kExitOk;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const auto lc = detail::load_case(cfg);
  const auto& program = lc.program;
  const std::uint64_t seed = *cfg.seed;
  const auto dir = detail::output_dir(cfg);

  SampleSet samples;
  bool keep_tau_in_file = false;
  if (cfg.solver == "oracle") {
    samples = brute_force(program);
  } else if (cfg.solver == "bb") {
    samples = branch_and_bound(program, {BbMode::optimal});
  } else if (cfg.solver == "bb-enumerate") {
    samples = branch_and_bound(program, {BbMode::enumerate_all});
  } else if (cfg.solver == "bb-pool") {
    samples = branch_and_bound(program, {BbMode::pool, cfg.pool_size});
  } else if (cfg.solver == "sa" || cfg.solver == "import") {
    ReformulateOptions ro;
    ro.rho = cfg.rho;
    const auto r = reformulate(program, ro);
    if (cfg.solver == "sa") {
      SaParams sp;
      sp.num_reads = cfg.reads;
      sp.num_sweeps = cfg.sweeps;
      sp.beta_hot = cfg.beta_hot;
      sp.beta_cold = cfg.beta_cold;
      sp.seed = seed;
      sp.num_threads = cfg.threads;
      const auto raw = simulated_annealing(r.qubo, sp);
      detail::write_json(dir / "qubo_samples.json", to_json(raw, {.include_timing = false}));
      samples = decode_samples(r, raw);
    } else {
      if (cfg.import_path.empty()) throw ArgumentError("--solver import needs --samples <file>");
      samples = detail::import_into_program(cfg.import_path, r, out);
      keep_tau_in_file = true;
    }
    samples.metadata["rho"] = r.penalty_weight;
  } else {
    throw ArgumentError("unknown solver '" + cfg.solver + "'");
  }

  samples.seed = seed;
  samples.metadata["case"] = cfg.case_name;
  samples.metadata["level"] = "program";
  samples.metadata["projection"] = detail::projection_json(program);
  detail::write_json(dir / "samples.json", to_json(samples, {.include_timing = keep_tau_in_file}));
  detail::write_json(dir / "run_config.json", cfg.to_json());
  if (cfg.timing && samples.tau_seconds) {
    detail::write_json(dir / "timing.json",
                       {{"solver", samples.solver}, {"seed", seed}, {"tau_seconds", *samples.tau_seconds}});
  }

  const auto* best = samples.best_feasible();
  double best_obj = std::numeric_limits<double>::infinity();
  for (const auto& rec : samples.records) {
    if (rec.feasible) best_obj = std::min(best_obj, rec.objective.value_or(rec.energy));
  }
  out << "solver: " << samples.solver << "\n"
      << "records: " << samples.records.size() << " (reads " << samples.total_reads() << ")\n"
      << "feasible records: " << samples.feasible_count() << "\n"
      << "feasible configurations: " << detail::configurations_summary(samples, program.projection) << "\n"
      << "best objective: " << (best ? format_number(best_obj) : std::string("none")) << "\n"
      << "tau_seconds: " << (samples.tau_seconds ? format_number(*samples.tau_seconds) : std::string("n/a"))
      << "\n"
      << "written to: " << dir.string() << "\n";
  if (!best) throw SolverError("no feasible solution found");
  return kExitOk;
}

struct ReportOptions {
  std::vector<std::string> sample_files;
  std::string reference;
  std::string target = "both";  // opt | feas | both
  double s = 0.99;
  std::uint64_t seed = 0;
};

namespace detail {

inline double tau_for(const SampleSet& s, const std::filesystem::path& file) {
  if (s.tau_seconds) return *s.tau_seconds;
  const auto sibling = file.parent_path() / "timing.json";
  if (std::filesystem::exists(sibling)) {
    const auto j = read_json_file(sibling.string());
    if (j.contains("tau_seconds")) return j.at("tau_seconds").get<double>();
  }
  throw ArgumentError("no tau for '" + file.string() + "': the file has no tau_seconds and no timing.json sits next to it (rerun solve with --timing)");
}

inline std::vector<std::size_t> projection_of(const SampleSet& s) {
  std::vector<std::size_t> proj;
  if (s.metadata.contains("projection")) {
    proj = s.metadata.at("projection").get<std::vector<std::size_t>>();
  } else if (!s.records.empty()) {
    for (std::size_t i = 0; i < s.records.front().assignment.size(); ++i) proj.push_back(i);
  }
  return proj;
}

inline std::string percent_label(double s) {
  std::ostringstream os;
  os << std::setprecision(6) << s * 100.0;
  return os.str();
}

}  // namespace detail

inline int cmd_report(const RunConfig& cfg, const ReportOptions& ro, std::ostream& out) {
  if (ro.sample_files.empty()) throw ArgumentError("report needs at least one sample file");
  if (ro.target != "opt" && ro.target != "feas" && ro.target != "both") {
    throw ArgumentError("--target must be opt, feas or both");
  }
  const bool want_opt = ro.target != "feas";
  const bool want_feas = ro.target != "opt";
  if (want_feas && ro.reference.empty()) {
    throw ArgumentError("the feas target needs an oracle reference (--reference <samples.json>)");
  }

  std::vector<SampleSet> sets;
  for (const auto& f : ro.sample_files) sets.push_back(sample_set_from_json(read_json_file(f)));
  std::optional<SampleSet> reference;
  if (!ro.reference.empty()) reference = sample_set_from_json(read_json_file(ro.reference));

  double e_star = std::numeric_limits<double>::infinity();
  if (reference) {
    for (const auto& r : reference->records) {
      if (r.feasible) e_star = std::min(e_star, r.energy);
    }
  } else {
    for (const auto& s : sets) {
      for (const auto& r : s.records) {
        if (r.feasible) e_star = std::min(e_star, r.energy);
      }
    }
  }

  std::vector<TttRow> rows;
  nlohmann::json details = nlohmann::json::array();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& s = sets[k];
    const auto projection = detail::projection_of(s);
    TttRow row;
    row.solver = s.solver;
    row.tau = detail::tau_for(s, ro.sample_files[k]);
    nlohmann::json d{{"file", ro.sample_files[k]}, {"solver", s.solver}, {"tau", row.tau}};
    if (want_opt && !s.records.empty() && std::isfinite(e_star)) {
      const auto est = estimate_success(s, OptimalTarget{e_star});
      row.ttt_opt = ttt(row.tau, est.p, ro.s);
      d["p_opt"] = est.p;
      d["p_opt_method"] = est.method;
    }
    if (reference) {
      const auto div = diversity(s, *reference, projection);
      row.coverage = std::to_string(div.found) + "/" + std::to_string(div.total);
      d["diversity"] = to_json(div);
      if (want_feas && !s.records.empty()) {
        AllFeasibleTarget t;
        for (const auto& r : reference->records) {
          if (r.feasible) t.reference.insert(project(r.assignment, projection));
        }
        t.projection = projection;
        t.seed = ro.seed;
        const auto est = estimate_success(s, t);
        if (est.p > 0.0) row.ttt_feas = ttt(row.tau, est.p, ro.s);
        d["p_feas_all"] = est.p;
        d["p_feas_method"] = est.method;
        if (est.ci_low) d["p_feas_ci95"] = {*est.ci_low, *est.ci_high};
      }
    } else {
      row.coverage = detail::configurations_summary(s, projection);
    }
    rows.push_back(row);
    details.push_back(std::move(d));
  }

  std::ostringstream csv;
  write_ttt_csv(csv, rows);
  std::string text = csv.str();
  if (ro.s != 0.99) {
    const auto label = detail::percent_label(ro.s);
    text.replace(text.find("ttopt99"), 7, "ttopt" + label);
    text.replace(text.find("ttfeas99"), 8, "ttfeas" + label);
  }
  const auto dir = detail::output_dir(cfg);
  detail::write_text(dir / "report.csv", text);
  detail::write_json(dir / "report.json",
                     {{"s", ro.s}, {"target_energy", std::isfinite(e_star) ? nlohmann::json(e_star) : nlohmann::json(nullptr)},
                      {"seed", ro.seed}, {"rows", details}});
  nlohmann::json rc = cfg.to_json();
  rc["samples"] = ro.sample_files;
  rc["reference"] = ro.reference;
  rc["target"] = ro.target;
  rc["s"] = ro.s;
  detail::write_json(dir / "run_config.json", rc);
  out << text;
  return kExitOk;
}

struct SweepRow {
  Bits config;
  double discrete_objective = 0.0;
  double continuous_objective = std::numeric_limits<double>::infinity();
  std::string status;
};

inline std::vector<SweepRow> sweep_rows(const RunConfig& cfg) {
  const auto lc = detail::load_case(cfg);
  if (!lc.il && !lc.ds) throw ArgumentError("sweep needs a case with a continuous evaluator (il or ds)");
  const auto oracle = brute_force(lc.program);
  const auto ranking = rank_configurations(oracle, lc.program.projection);

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < ranking.configs.size(); ++k) {
    rows.push_back({ranking.configs[k], ranking.objectives[k], std::numeric_limits<double>::infinity(), ""});
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return lex_less(a.config, b.config); });

  const std::uint64_t seed = *cfg.seed;
  std::optional<BlackBoxObjective> bb;
  if (lc.ds) {
    bb = ds_synthetic_blackbox(*lc.ds);
    if (cfg.budget) bb->budget = cfg.budget;
  }
  auto solve_one = [&](SweepRow& row) {
    if (lc.il) {
      const auto res = cfg.budget ? il_continuous_solve(*lc.il, row.config, seed, cfg.budget)
                                  : il_continuous_solve(*lc.il, row.config, seed);
      row.status = res.status;
      row.continuous_objective = res.objective;
    } else {
      const auto res = run_blackbox(*bb, row.config, seed);
      row.status = res.status;
      row.continuous_objective = res.best_score;
    }
  };

  std::size_t threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, rows.size());
  if (threads <= 1) {
    for (auto& row : rows) solve_one(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) solve_one(rows[k]);
      });
    }
  }
  return rows;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto rows = sweep_rows(cfg);
  std::vector<ParetoPoint> points;
  for (const auto& r : rows) {
    if (r.status == "ok") points.push_back({to_string(r.config), r.discrete_objective, r.continuous_objective});
  }
  const auto front = pareto_front(points);
  std::set<std::string> on_front;
  for (const auto& p : front) on_front.insert(p.config_id);

  std::ostringstream csv;
  csv << "config_id,discrete_objective,continuous_objective,status,front\n";
  std::size_t failed = 0;
  for (const auto& r : rows) {
    const auto id = to_string(r.config);
    if (r.status != "ok") ++failed;
    csv << id << ',' << format_number(r.discrete_objective) << ',' << format_number(r.continuous_objective) << ','
        << r.status << ',' << (on_front.count(id) ? "true" : "false") << '\n';
  }
  const auto dir = detail::output_dir(cfg);
  detail::write_text(dir / "sweep.csv", csv.str());
  detail::write_json(dir / "pareto.json", {{"seed", *cfg.seed}, {"front", to_json(front)}});
  detail::write_json(dir / "run_config.json", cfg.to_json());
  out << "configurations: " << rows.size() << "\n"
      << "continuous failures: " << failed << "\n"
      << "front size: " << front.size() << "\n"
      << "written to: " << dir.string() << "\n";
  return kExitOk;
}

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete flowsheet synthesis as binary programs and QUBOs"};
  app.require_subcommand(1);
  RunConfig cfg;
  ReportOptions ro;
  std::uint64_t seed_value = 0;

  auto add_case = [&](CLI::App* sub) {
    sub->add_option("--case", cfg.case_name, "il, ds or custom")->check(CLI::IsMember({"il", "ds", "custom"}));
    sub->add_option("--model", cfg.model_path, "binary program JSON for --case custom");
    sub->add_option("--params", cfg.params_path, "design-space JSON for il/ds");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_value, "random seed (drawn and printed when absent)");
    sub->add_option("--out", cfg.out_dir, std::string("output directory (else $") + kOutEnv + ", else ./flowising_out)");
  };

  auto* build = app.add_subcommand("build", "write program, QUBO and reformulation sidecar");
  add_case(build);
  add_common(build);
  build->add_option("--rho", cfg.rho, "penalty weight override");

  auto* solve = app.add_subcommand("solve", "run one solver and write a sample set");
  add_case(solve);
  add_common(solve);
  solve->add_option("--solver", cfg.solver, "oracle, sa, bb, bb-pool, bb-enumerate or import")
      ->check(CLI::IsMember({"oracle", "sa", "bb", "bb-pool", "bb-enumerate", "import"}));
  solve->add_option("--rho", cfg.rho, "penalty weight override (sa, import)");
  solve->add_option("--reads", cfg.reads, "SA reads");
  solve->add_option("--sweeps", cfg.sweeps, "SA sweeps per read");
  solve->add_option("--beta-hot", cfg.beta_hot, "SA initial inverse temperature");
  solve->add_option("--beta-cold", cfg.beta_cold, "SA final inverse temperature");
  solve->add_option("--pool-size", cfg.pool_size, "solutions kept by bb-pool");
  solve->add_option("--threads", cfg.threads, "SA worker threads (0: all cores)");
  solve->add_option("--samples", cfg.import_path, "sample file for --solver import");
  solve->add_flag("--timing", cfg.timing, "also write wall-clock tau to timing.json");

  auto* report = app.add_subcommand("report", "time-to-target and coverage table");
  add_common(report);
  report->add_option("samples", ro.sample_files, "sample set files")->required();
  report->add_option("--reference", ro.reference, "oracle sample set (required for the feas target)");
  report->add_option("--target", ro.target, "opt, feas or both")->check(CLI::IsMember({"opt", "feas", "both"}));
  report->add_option("--s", ro.s, "target confidence");

  auto* sweep = app.add_subcommand("sweep", "solve every feasible configuration's continuous subproblem");
  add_case(sweep);
  add_common(sweep);
  sweep->add_option("--budget", cfg.budget, "evaluations per configuration");
  sweep->add_option("--threads", cfg.threads, "parallel configurations (0: all cores)");

  std::vector<std::string> argv_store{"flowising"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  CLI::App* active = app.get_subcommands().front();
  cfg.command = active->get_name();
  if (active->count("--seed")) {
    cfg.seed = seed_value;
  } else {
    cfg.seed = std::random_device{}() | (static_cast<std::uint64_t>(std::random_device{}()) << 32);
    out << "seed: " << *cfg.seed << " (drawn)\n";
  }

  try {
    if (cfg.command == "build") return cmd_build(cfg, out);
    if (cfg.command == "solve") return cmd_solve(cfg, out);
    if (cfg.command == "report") {
      ro.seed = *cfg.seed;
      return cmd_report(cfg, ro, out);
    }
    return cmd_sweep(cfg, out);
  } catch (const SchemaError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ArgumentError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ModelError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ReformulationError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace flowising::cli
