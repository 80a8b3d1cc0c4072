#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/sample_set.hpp"

namespace flowising {

inline constexpr double kTargetEnergyTol = 1e-9;

// Expected time to hit a target with confidence s, given per-run success
// probability p and per-run time tau.
inline double ttt(double tau, double p_target, double s = 0.99) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("confidence s must lie in (0, 1)");
  if (!(p_target >= 0.0 && p_target <= 1.0)) throw ArgumentError("success probability must lie in [0, 1]");
  if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
  if (p_target == 1.0) return tau;
  if (p_target == 0.0) return std::numeric_limits<double>::infinity();
  return tau * std::log1p(-s) / std::log1p(-p_target);
}

struct TttReport {
  double s = 0.99;
  double tau = 0.0;
  double p_opt = 0.0;
  double p_feas_all = 0.0;
  double ttt_opt = std::numeric_limits<double>::infinity();
  double ttt_feas = std::numeric_limits<double>::infinity();
};

inline TttReport make_ttt_report(double tau, double p_opt, double p_feas_all, double s = 0.99) {
  return {s, tau, p_opt, p_feas_all, ttt(tau, p_opt, s), ttt(tau, p_feas_all, s)};
}

struct OptimalTarget {
  double energy = 0.0;
};

// Reference configurations (projected assignments) a run must cover.
// Records are read as program-level assignments and projected onto
// `projection`.
struct AllFeasibleTarget {
  std::set<Bits> reference;
  std::vector<std::size_t> projection;
  std::uint64_t seed = 0;
  std::size_t resamples = 1000;
};

using SuccessTarget = std::variant<OptimalTarget, AllFeasibleTarget>;

struct SuccessEstimate {
  double p = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::string method;  // "counting", "deterministic", "observed", "bootstrap"
};

namespace detail {

// 95% Wilson score interval for k successes out of n trials.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (ph + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
  const double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = k == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

inline std::set<Bits> covered_configs(const SampleSet& samples, const std::vector<std::size_t>& projection) {
  std::set<Bits> found;
  for (const auto& r : samples.records) {
    if (r.feasible) found.insert(project(r.assignment, projection));
  }
  return found;
}

}  // namespace detail

inline SuccessEstimate estimate_success(const SampleSet& samples, const SuccessTarget& target) {
  if (samples.records.empty()) throw ArgumentError("cannot estimate success from an empty sample set");

  if (const auto* opt = std::get_if<OptimalTarget>(&target)) {
    std::uint64_t hits = 0;
    for (const auto& r : samples.records) {
      if (r.energy <= opt->energy + kTargetEnergyTol) hits += r.occurrences;
    }
    if (samples.deterministic) return {hits > 0 ? 1.0 : 0.0, std::nullopt, std::nullopt, "deterministic"};
    const std::uint64_t reads = samples.total_reads();
    return {static_cast<double>(hits) / static_cast<double>(reads), std::nullopt, std::nullopt, "counting"};
  }

  const auto& all = std::get<AllFeasibleTarget>(target);
  const auto found = detail::covered_configs(samples, all.projection);
  const bool covered = std::includes(found.begin(), found.end(), all.reference.begin(), all.reference.end());
  if (covered) return {1.0, std::nullopt, std::nullopt, samples.deterministic ? "deterministic" : "observed"};
  if (samples.deterministic) return {0.0, std::nullopt, std::nullopt, "deterministic"};

  // Resample reads with replacement and count resamples covering the
  // reference set.
  std::vector<std::ptrdiff_t> read_config;  // index into ref_list, or -1
  const std::vector<Bits> ref_list(all.reference.begin(), all.reference.end());
  for (const auto& r : samples.records) {
    std::ptrdiff_t idx = -1;
    if (r.feasible) {
      auto it = all.reference.find(project(r.assignment, all.projection));
      if (it != all.reference.end()) idx = std::distance(all.reference.begin(), it);
    }
    read_config.insert(read_config.end(), r.occurrences, idx);
  }
  std::mt19937_64 rng(all.seed);
  std::uniform_int_distribution<std::size_t> pick(0, read_config.size() - 1);
  std::vector<std::uint8_t> seen(ref_list.size());
  std::size_t successes = 0;
  for (std::size_t b = 0; b < all.resamples; ++b) {
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t distinct = 0;
    for (std::size_t k = 0; k < read_config.size(); ++k) {
      const auto idx = read_config[pick(rng)];
      if (idx >= 0 && !seen[static_cast<std::size_t>(idx)]) {
        seen[static_cast<std::size_t>(idx)] = 1;
        ++distinct;
      }
    }
    if (distinct == ref_list.size()) ++successes;
  }
  const auto [lo, hi] = detail::wilson_interval(successes, all.resamples);
  return {static_cast<double>(successes) / static_cast<double>(all.resamples), lo, hi, "bootstrap"};
}

// Oracle ranking of projected configurations: ordered by best objective, then
// configuration. Rank 1 is the optimum.
struct ConfigRanking {
  std::vector<Bits> configs;
  std::vector<double> objectives;
  std::map<Bits, std::size_t> rank_of;  // 1-based
};

inline ConfigRanking rank_configurations(const SampleSet& oracle, const std::vector<std::size_t>& projection) {
  std::map<Bits, double> best;
  for (const auto& r : oracle.records) {
    if (!r.feasible) continue;
    const double obj = r.objective.value_or(r.energy);
    auto key = project(r.assignment, projection);
    auto it = best.find(key);
    if (it == best.end()) best.emplace(std::move(key), obj);
    else it->second = std::min(it->second, obj);
  }
  std::vector<std::pair<double, Bits>> order;
  for (auto& [cfg, obj] : best) order.emplace_back(obj, cfg);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return lex_less(a.second, b.second);
  });
  ConfigRanking out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.objectives.push_back(order[k].first);
    out.configs.push_back(order[k].second);
    out.rank_of.emplace(order[k].second, k + 1);
  }
  return out;
}

struct DiversityReport {
  std::size_t found = 0;
  std::size_t total = 0;
  std::vector<std::uint8_t> rank_hit;  // rank_hit[k] = 1 when rank k+1 was found
  std::vector<std::size_t> histogram;  // hits per rank bin
  std::size_t bin_width = 1;
  std::optional<double> mean_rank;
  std::vector<Bits> unexpected;  // found configurations absent from the reference
};

inline DiversityReport diversity(const SampleSet& samples, const SampleSet& reference,
                                 const std::vector<std::size_t>& projection, std::size_t bins = 10) {
  const auto width = [](const SampleSet& s) -> std::optional<std::size_t> {
    if (s.records.empty()) return std::nullopt;
    return s.records.front().assignment.size();
  };
  if (width(samples) && width(reference) && *width(samples) != *width(reference)) {
    throw ModelError("sample set and reference come from different models (assignment widths differ)");
  }
  const auto ranking = rank_configurations(reference, projection);
  DiversityReport rep;
  rep.total = ranking.configs.size();
  rep.rank_hit.assign(rep.total, 0);
  double rank_sum = 0.0;
  for (const auto& cfg : detail::covered_configs(samples, projection)) {
    auto it = ranking.rank_of.find(cfg);
    if (it == ranking.rank_of.end()) {
      rep.unexpected.push_back(cfg);
      continue;
    }
    rep.rank_hit[it->second - 1] = 1;
    rank_sum += static_cast<double>(it->second);
    ++rep.found;
  }
  if (rep.found) rep.mean_rank = rank_sum / static_cast<double>(rep.found);
  bins = std::max<std::size_t>(1, std::min(bins, std::max<std::size_t>(rep.total, 1)));
  rep.bin_width = std::max<std::size_t>(1, (rep.total + bins - 1) / bins);
  rep.histogram.assign(rep.total ? (rep.total + rep.bin_width - 1) / rep.bin_width : 0, 0);
  for (std::size_t k = 0; k < rep.total; ++k) {
    if (rep.rank_hit[k]) ++rep.histogram[k / rep.bin_width];
  }
  return rep;
}

inline nlohmann::json to_json(const DiversityReport& d) {
  nlohmann::json j;
  j["found"] = d.found;
  j["total"] = d.total;
  j["coverage"] = d.total ? static_cast<double>(d.found) / static_cast<double>(d.total) : 0.0;
  j["mean_rank"] = d.mean_rank ? nlohmann::json(*d.mean_rank) : nlohmann::json(nullptr);
  j["bin_width"] = d.bin_width;
  j["histogram"] = d.histogram;
  j["rank_hit"] = d.rank_hit;
  nlohmann::json unexpected = nlohmann::json::array();
  for (const auto& b : d.unexpected) unexpected.push_back(to_string(b));
  j["unexpected"] = unexpected;
  return j;
}

struct ParetoPoint {
  std::string config_id;
  double discrete_objective = 0.0;
  double continuous_objective = 0.0;

  friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

// a dominates b: no worse on both axes, strictly better on at least one.
inline bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.discrete_objective <= b.discrete_objective && a.continuous_objective <= b.continuous_objective &&
         (a.discrete_objective < b.discrete_objective || a.continuous_objective < b.continuous_objective);
}

// Non-dominated subset, both axes minimized. Points with a non-finite
// coordinate never enter the front. Coincident points collapse to the
// smallest config_id.
inline std::vector<ParetoPoint> pareto_front(std::vector<ParetoPoint> points) {
  std::erase_if(points, [](const ParetoPoint& p) {
    return !std::isfinite(p.discrete_objective) || !std::isfinite(p.continuous_objective);
  });
  std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    if (a.discrete_objective != b.discrete_objective) return a.discrete_objective < b.discrete_objective;
    if (a.continuous_objective != b.continuous_objective) return a.continuous_objective < b.continuous_objective;
    return a.config_id < b.config_id;
  });
  std::vector<ParetoPoint> front;
  double best_cont = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (!front.empty() && front.back().discrete_objective == p.discrete_objective &&
        front.back().continuous_objective == p.continuous_objective) {
      continue;
    }
    if (p.continuous_objective < best_cont) {
      front.push_back(p);
      best_cont = p.continuous_objective;
    }
  }
  return front;
}

// Number formatting shared by the CSV writers: ten significant digits,
// "inf" for infinity.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline constexpr const char* kUnobserved = "-";

struct TttRow {
  std::string solver;
  double tau = 0.0;
  double ttt_opt = std::numeric_limits<double>::infinity();
  std::optional<double> ttt_feas;  // nullopt prints the unobserved marker
  std::string coverage;
};

inline void write_ttt_csv(std::ostream& os, const std::vector<TttRow>& rows) {
  os << "solver,tau,ttopt99,ttfeas99,coverage\n";
  for (const auto& r : rows) {
    os << r.solver << ',' << format_number(r.tau) << ',' << format_number(r.ttt_opt) << ','
       << (r.ttt_feas ? format_number(*r.ttt_feas) : std::string(kUnobserved)) << ',' << r.coverage << '\n';
  }
}

inline nlohmann::json to_json(const std::vector<ParetoPoint>& pts) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : pts) {
    j.push_back({{"config_id", p.config_id},
                 {"discrete_objective", p.discrete_objective},
                 {"continuous_objective", p.continuous_objective}});
  }
  return j;
}

}  // namespace flowising
