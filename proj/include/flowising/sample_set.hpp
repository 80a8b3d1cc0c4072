#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"
#include "flowising/qubo.hpp"

namespace flowising {

struct SampleRecord {
  Bits assignment;
  double energy = 0.0;
  std::optional<double> objective;
  bool feasible = false;
  std::uint64_t occurrences = 1;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct SampleSet {
  std::vector<SampleRecord> records;
  std::optional<double> tau_seconds;
  std::string solver;
  std::optional<std::uint64_t> seed;
  // Deterministic solvers reach whatever they return with probability one.
  bool deterministic = false;
  nlohmann::json metadata = nlohmann::json::object();

  std::uint64_t total_reads() const {
    std::uint64_t n = 0;
    for (const auto& r : records) n += r.occurrences;
    return n;
  }

  // Merges duplicate assignments (keeping the lowest stated energy) and sorts
  // by (energy, assignment).
  void canonicalize() {
    std::sort(records.begin(), records.end(),
              [](const SampleRecord& a, const SampleRecord& b) {
                if (a.assignment != b.assignment) return lex_less(a.assignment, b.assignment);
                return a.energy < b.energy;
              });
    std::vector<SampleRecord> merged;
    for (auto& r : records) {
      if (!merged.empty() && merged.back().assignment == r.assignment) {
        merged.back().occurrences += r.occurrences;
      } else {
        merged.push_back(std::move(r));
      }
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const SampleRecord& a, const SampleRecord& b) { return a.energy < b.energy; });
    records = std::move(merged);
  }

  const SampleRecord* best_feasible() const {
    for (const auto& r : records) {
      if (r.feasible) return &r;
    }
    return nullptr;
  }

  std::size_t feasible_count() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const SampleRecord& r) { return r.feasible; }));
  }
};

struct SerializeOptions {
  bool include_timing = true;
};

inline nlohmann::json to_json(const SampleSet& s, SerializeOptions opts = {}) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : s.records) {
    nlohmann::json j;
    j["assignment"] = to_string(r.assignment);
    j["energy"] = r.energy;
    j["objective"] = r.objective ? nlohmann::json(*r.objective) : nlohmann::json(nullptr);
    j["feasible"] = r.feasible;
    j["occurrences"] = r.occurrences;
    recs.push_back(std::move(j));
  }
  nlohmann::json j;
  j["solver"] = s.solver;
  j["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
  if (opts.include_timing && s.tau_seconds) j["tau_seconds"] = *s.tau_seconds;
  j["deterministic"] = s.deterministic;
  j["metadata"] = s.metadata;
  j["records"] = std::move(recs);
  return j;
}

inline SampleSet sample_set_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw SchemaError("sample set must be a JSON object");
    SampleSet s;
    s.solver = j.value("solver", std::string("unknown"));
    if (j.contains("seed") && !j.at("seed").is_null()) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tau_seconds") && !j.at("tau_seconds").is_null()) {
      s.tau_seconds = j.at("tau_seconds").get<double>();
      if (!(*s.tau_seconds > 0.0)) throw SchemaError("tau_seconds must be positive");
    }
    s.deterministic = j.value("deterministic", false);
    if (j.contains("metadata")) s.metadata = j.at("metadata");
    if (j.contains("time_breakdown")) s.metadata["time_breakdown"] = j.at("time_breakdown");
    const auto& recs = j.at("records");
    if (!recs.is_array()) throw SchemaError("records must be an array");
    std::size_t width = 0;
    for (const auto& r : recs) {
      SampleRecord rec;
      rec.assignment = bits_from_string(r.at("assignment").get<std::string>());
      if (s.records.empty()) {
        width = rec.assignment.size();
      } else if (rec.assignment.size() != width) {
        throw SchemaError("records have assignments of different lengths");
      }
      rec.energy = r.at("energy").get<double>();
      if (r.contains("objective") && !r.at("objective").is_null()) rec.objective = r.at("objective").get<double>();
      rec.feasible = r.value("feasible", false);
      rec.occurrences = r.value("occurrences", std::uint64_t{1});
      if (rec.occurrences == 0) throw SchemaError("occurrences must be at least 1");
      s.records.push_back(std::move(rec));
    }
    s.canonicalize();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed sample set: ") + e.what());
  }
}

struct EnergyMismatch {
  Bits assignment;
  double stated = 0.0;
  double recomputed = 0.0;
};

struct ImportResult {
  SampleSet samples;
  std::vector<EnergyMismatch> mismatches;
};

struct ImportOptions {
  const QuboModel* recompute_against = nullptr;
  double tolerance = 1e-6;
  bool strict = false;  // throw on any mismatch instead of listing it
};

inline ImportResult import_samples(const nlohmann::json& j, const ImportOptions& opts = {}) {
  ImportResult out{sample_set_from_json(j), {}};
  if (opts.recompute_against) {
    for (const auto& r : out.samples.records) {
      const double e = energy(*opts.recompute_against, r.assignment);
      if (std::abs(e - r.energy) > opts.tolerance) out.mismatches.push_back({r.assignment, r.energy, e});
    }
    if (opts.strict && !out.mismatches.empty()) {
      throw SchemaError(std::to_string(out.mismatches.size()) +
                        " records state energies inconsistent with the QUBO");
    }
  }
  return out;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline ImportResult import_samples(const std::string& path, const ImportOptions& opts = {}) {
  return import_samples(read_json_file(path), opts);
}

}  // namespace flowising
