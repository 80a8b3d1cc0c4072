#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowising/bits.hpp"
#include "flowising/errors.hpp"

namespace flowising {

struct QuboTerm {
  std::size_t i = 0;
  std::size_t j = 0;  // i <= j; i == j is a linear (diagonal) term
  double q = 0.0;

  friend bool operator==(const QuboTerm&, const QuboTerm&) = default;
};

// Quadratic form over binary variables, E(x) = sum_{i<=j} q_ij x_i x_j + offset.
// Terms are kept upper-triangular, merged and sorted by (i, j); zero
// coefficients are dropped. Immutable once built.
class QuboModel {
public:
  QuboModel() = default;

  // Symmetric input is folded: (i, j) and (j, i) accumulate into one term.
  QuboModel(std::size_t num_vars, std::span<const QuboTerm> terms, double offset = 0.0,
            std::vector<std::string> var_names = {})
      : num_vars_(num_vars), offset_(offset), var_names_(std::move(var_names)) {
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const auto& t : terms) {
      if (t.i >= num_vars || t.j >= num_vars) {
        throw ModelError("QUBO term index out of range (" + std::to_string(t.i) + ", " +
                         std::to_string(t.j) + ") for " + std::to_string(num_vars) + " variables");
      }
      if (!std::isfinite(t.q)) throw ModelError("QUBO coefficient is not finite");
      acc[{std::min(t.i, t.j), std::max(t.i, t.j)}] += t.q;
    }
    for (const auto& [key, q] : acc) {
      if (q != 0.0) terms_.push_back({key.first, key.second, q});
    }
    if (!std::isfinite(offset_)) throw ModelError("QUBO offset is not finite");
    if (!var_names_.empty() && var_names_.size() != num_vars_) {
      throw ModelError("var_names length does not match num_vars");
    }
  }

  // Full square matrix, not necessarily symmetric; xᵀQx semantics.
  static QuboModel from_dense(const std::vector<std::vector<double>>& matrix, double offset = 0.0) {
    const std::size_t n = matrix.size();
    std::vector<QuboTerm> terms;
    for (std::size_t r = 0; r < n; ++r) {
      require_length(matrix[r].size(), n, "QUBO dense row");
      for (std::size_t c = 0; c < n; ++c) {
        if (matrix[r][c] != 0.0) terms.push_back({r, c, matrix[r][c]});
      }
    }
    return QuboModel(n, terms, offset);
  }

  std::size_t num_vars() const { return num_vars_; }
  std::span<const QuboTerm> terms() const { return terms_; }
  double offset() const { return offset_; }
  const std::vector<std::string>& var_names() const { return var_names_; }

  QuboModel with_offset(double offset) const {
    QuboModel copy = *this;
    copy.offset_ = offset;
    return copy;
  }

  friend bool operator==(const QuboModel&, const QuboModel&) = default;

private:
  std::size_t num_vars_ = 0;
  std::vector<QuboTerm> terms_;
  double offset_ = 0.0;
  std::vector<std::string> var_names_;
};

inline double energy(const QuboModel& model, std::span<const std::uint8_t> x) {
  require_length(x.size(), model.num_vars(), "QUBO assignment");
  double e = model.offset();
  for (const auto& t : model.terms()) {
    if (x[t.i] && x[t.j]) e += t.q;
  }
  return e;
}

// Ising form H(s) = sum h_i s_i + sum_{i<j} J_ij s_i s_j + offset, s in {-1,+1}.
class IsingModel {
public:
  struct Coupling {
    std::size_t i = 0;
    std::size_t j = 0;  // i < j
    double J = 0.0;
    friend bool operator==(const Coupling&, const Coupling&) = default;
  };

  IsingModel() = default;

  IsingModel(std::size_t num_spins, const std::map<std::size_t, double>& h,
             std::span<const Coupling> couplings, double offset = 0.0)
      : num_spins_(num_spins), h_(num_spins, 0.0), offset_(offset) {
    for (const auto& [i, v] : h) {
      if (i >= num_spins) throw ModelError("Ising field index out of range");
      h_[i] += v;
    }
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const auto& c : couplings) {
      if (c.i >= num_spins || c.j >= num_spins || c.i == c.j) {
        throw ModelError("Ising coupling must join two distinct in-range spins");
      }
      acc[{std::min(c.i, c.j), std::max(c.i, c.j)}] += c.J;
    }
    for (const auto& [key, J] : acc) {
      if (J != 0.0) couplings_.push_back({key.first, key.second, J});
    }
  }

  std::size_t num_spins() const { return num_spins_; }
  std::span<const double> h() const { return h_; }
  std::span<const Coupling> couplings() const { return couplings_; }
  double offset() const { return offset_; }

private:
  std::size_t num_spins_ = 0;
  std::vector<double> h_;
  std::vector<Coupling> couplings_;
  double offset_ = 0.0;
};

inline double energy(const IsingModel& model, std::span<const std::int8_t> spins) {
  require_length(spins.size(), model.num_spins(), "Ising assignment");
  double e = model.offset();
  for (std::size_t i = 0; i < spins.size(); ++i) e += model.h()[i] * spins[i];
  for (const auto& c : model.couplings()) e += c.J * spins[c.i] * spins[c.j];
  return e;
}

inline std::vector<std::int8_t> spins_from_bits(std::span<const std::uint8_t> x) {
  std::vector<std::int8_t> s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? 1 : -1;
  return s;
}

// x = (s + 1) / 2.
inline IsingModel to_ising(const QuboModel& model) {
  std::map<std::size_t, double> h;
  std::vector<IsingModel::Coupling> couplings;
  double offset = model.offset();
  for (const auto& t : model.terms()) {
    if (t.i == t.j) {
      h[t.i] += t.q / 2.0;
      offset += t.q / 2.0;
    } else {
      couplings.push_back({t.i, t.j, t.q / 4.0});
      h[t.i] += t.q / 4.0;
      h[t.j] += t.q / 4.0;
      offset += t.q / 4.0;
    }
  }
  return IsingModel(model.num_vars(), h, couplings, offset);
}

// s = 2x - 1.
inline QuboModel from_ising(const IsingModel& model) {
  std::vector<QuboTerm> terms;
  double offset = model.offset();
  for (std::size_t i = 0; i < model.num_spins(); ++i) {
    const double h = model.h()[i];
    if (h != 0.0) terms.push_back({i, i, 2.0 * h});
    offset -= h;
  }
  for (const auto& c : model.couplings()) {
    terms.push_back({c.i, c.j, 4.0 * c.J});
    terms.push_back({c.i, c.i, -2.0 * c.J});
    terms.push_back({c.j, c.j, -2.0 * c.J});
    offset += c.J;
  }
  return QuboModel(model.num_spins(), terms, offset);
}

// Row-compressed view used by the samplers and the exhaustive routines:
// linear[i] is the diagonal, neighbors of i carry the off-diagonal weights.
struct QuboAdjacency {
  std::vector<double> linear;
  std::vector<std::size_t> row_start;  // size n + 1
  std::vector<std::size_t> col;
  std::vector<double> weight;

  explicit QuboAdjacency(const QuboModel& model) : linear(model.num_vars(), 0.0) {
    const std::size_t n = model.num_vars();
    std::vector<std::size_t> degree(n, 0);
    for (const auto& t : model.terms()) {
      if (t.i == t.j) {
        linear[t.i] += t.q;
      } else {
        ++degree[t.i];
        ++degree[t.j];
      }
    }
    row_start.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) row_start[i + 1] = row_start[i] + degree[i];
    col.resize(row_start[n]);
    weight.resize(row_start[n]);
    std::vector<std::size_t> fill(row_start.begin(), row_start.end() - 1);
    for (const auto& t : model.terms()) {
      if (t.i == t.j) continue;
      col[fill[t.i]] = t.j;
      weight[fill[t.i]++] = t.q;
      col[fill[t.j]] = t.i;
      weight[fill[t.j]++] = t.q;
    }
  }

  std::size_t size() const { return linear.size(); }
};

inline nlohmann::json to_json(const QuboModel& model) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : model.terms()) terms.push_back({t.i, t.j, t.q});
  nlohmann::json j;
  j["num_vars"] = model.num_vars();
  j["terms"] = std::move(terms);
  j["offset"] = model.offset();
  j["var_names"] = model.var_names();
  return j;
}

inline QuboModel qubo_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("num_vars").get<std::size_t>();
    std::vector<QuboTerm> terms;
    for (const auto& t : j.at("terms")) {
      if (!t.is_array() || t.size() != 3) throw SchemaError("QUBO term must be [i, j, q]");
      terms.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<double>()});
    }
    std::vector<std::string> names;
    if (j.contains("var_names")) names = j.at("var_names").get<std::vector<std::string>>();
    return QuboModel(n, terms, j.value("offset", 0.0), std::move(names));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed QUBO JSON: ") + e.what());
  }
}

}  // namespace flowising
