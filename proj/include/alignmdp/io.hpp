// Copyright 2026 The alignmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "alignmdp/error.hpp"
#include "alignmdp/extended_value.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/solver.hpp"

namespace alignmdp {

using Json = nlohmann::json;

namespace detail {

inline const Json& require_field(const Json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw SchemaError(std::string("missing field \"") + name + "\"");
  return *it;
}

inline std::size_t as_count(const Json& v, const char* name) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw SchemaError(std::string("field \"") + name + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline double as_real(const Json& v, const std::string& what) {
  if (!v.is_number()) throw SchemaError(what + " must be a number");
  return v.get<double>();
}

inline Tensor3 as_tensor(const Json& v, const char* name, std::size_t ns, std::size_t na) {
  const std::string field = std::string("field \"") + name + "\"";
  if (!v.is_array() || v.size() != ns) {
    throw SchemaError(field + " must be an array of n_states entries");
  }
  Tensor3 out(ns, na);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& by_action = v[s];
    if (!by_action.is_array() || by_action.size() != na) {
      throw SchemaError(field + "[" + std::to_string(s) + "] must hold n_actions rows");
    }
    for (std::size_t a = 0; a < na; ++a) {
      const auto& row = by_action[a];
      if (!row.is_array() || row.size() != ns) {
        throw SchemaError(field + "[" + std::to_string(s) + "][" + std::to_string(a) +
                          "] must hold n_states numbers");
      }
      for (std::size_t t = 0; t < ns; ++t) out(s, a, t) = as_real(row[t], field + " entry");
    }
  }
  return out;
}

inline Json tensor_json(const Tensor3& t) {
  Json out = Json::array();
  for (std::size_t s = 0; s < t.n_states(); ++s) {
    Json by_action = Json::array();
    for (std::size_t a = 0; a < t.n_actions(); ++a) {
      auto row = t.row(s, a);
      by_action.push_back(std::vector<double>(row.begin(), row.end()));
    }
    out.push_back(std::move(by_action));
  }
  return out;
}

}  // namespace detail

inline Json to_json(const Mdp& mdp) {
  Json doc;
  doc["n_states"] = mdp.n_states();
  doc["terminal"] = mdp.terminal();
  doc["n_actions"] = mdp.n_actions();
  doc["gamma"] = mdp.gamma();
  doc["terminal_value"] = mdp.terminal_value();
  doc["transition"] = detail::tensor_json(mdp.transition());
  doc["reward"] = detail::tensor_json(mdp.reward());
  if (!mdp.labels().empty()) doc["labels"] = mdp.labels();
  return doc;
}

/// Parses an MDP document. Throws SchemaError for malformed documents and
/// ValidationError when the model breaks an invariant.
inline Mdp mdp_from_json(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("MDP document must be a JSON object");
  const auto ns = detail::as_count(detail::require_field(doc, "n_states"), "n_states");
  const auto na = detail::as_count(detail::require_field(doc, "n_actions"), "n_actions");
  const double gamma = detail::as_real(detail::require_field(doc, "gamma"), "field \"gamma\"");
  const double c =
      detail::as_real(detail::require_field(doc, "terminal_value"), "field \"terminal_value\"");
  const auto& term = detail::require_field(doc, "terminal");
  if (!term.is_array()) throw SchemaError("field \"terminal\" must be an integer array");
  std::vector<StateIndex> terminal;
  for (const auto& t : term) terminal.push_back(detail::as_count(t, "terminal"));
  for (StateIndex t : terminal) {
    if (t >= ns) throw SchemaError("terminal index out of range: " + std::to_string(t));
  }
  Tensor3 p = detail::as_tensor(detail::require_field(doc, "transition"), "transition", ns, na);
  Tensor3 r = detail::as_tensor(detail::require_field(doc, "reward"), "reward", ns, na);
  std::vector<std::string> labels;
  if (auto it = doc.find("labels"); it != doc.end()) {
    if (!it->is_array() || it->size() != ns) {
      throw SchemaError("field \"labels\" must be an array of n_states strings");
    }
    for (const auto& l : *it) {
      if (!l.is_string()) throw SchemaError("labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  if (ns == 0 || na == 0) throw SchemaError("n_states and n_actions must be positive");
  Mdp mdp(ns, na, std::move(terminal), std::move(p), std::move(r), gamma, c, std::move(labels));
  require_valid(mdp);
  return mdp;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("parse error in " + path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

inline void save(const Mdp& mdp, const std::filesystem::path& path) {
  write_text_file(path, dump(to_json(mdp)));
}

inline Mdp load(const std::filesystem::path& path) { return mdp_from_json(read_json_file(path)); }

// Policy as an array over states with null at terminal states.
inline Json to_json(const DeterministicPolicy& pi, const Mdp& mdp) {
  Json out = Json::array();
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) {
      out.push_back(nullptr);
    } else {
      out.push_back(pi(s));
    }
  }
  return out;
}

inline Json to_json(const ExtendedValue& v) {
  if (v.is_finite()) return v.value();
  return v.to_string();
}

inline Json matrix_json(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline MatrixXd matrix_from_json(const Json& doc, std::size_t rows, std::size_t cols,
                                 const std::string& what) {
  if (!doc.is_array() || doc.size() != rows) {
    throw SchemaError(what + " must be an array of " + std::to_string(rows) + " rows");
  }
  MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!doc[i].is_array() || doc[i].size() != cols) {
      throw SchemaError(what + " rows must hold " + std::to_string(cols) + " numbers");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          detail::as_real(doc[i][j], what + " entry");
    }
  }
  return m;
}

// Accepts a bare matrix or {"q": matrix, "gamma": g}.
inline QTable qtable_from_json(const Json& doc, const Mdp& mdp) {
  const Json& body = doc.is_object() ? detail::require_field(doc, "q") : doc;
  QTable q{matrix_from_json(body, mdp.n_states(), mdp.n_actions(), "Q table"), mdp.gamma()};
  if (doc.is_object() && doc.contains("gamma")) q.gamma = detail::as_real(doc["gamma"], "gamma");
  return q;
}

inline Json to_json(const PolicySetReport& report, const Mdp& mdp) {
  Json out;
  out["objective"] = to_string(report.objective);
  auto policies = [&](const std::vector<std::size_t>& idx) {
    Json arr = Json::array();
    for (std::size_t i : idx) arr.push_back(to_json(report.policies[i], mdp));
    return arr;
  };
  out["argmax"] = policies(report.argmax);
  out["argmin"] = policies(report.argmin);
  out["no_uniform_max"] = report.no_uniform_max;
  out["no_uniform_min"] = report.no_uniform_min;
  out["undefined_policies"] = policies(report.undefined_policies);
  if (report.no_uniform_max || report.no_uniform_min) {
    Json per_state;
    for (StateIndex s : mdp.nonterminal()) {
      per_state[std::to_string(s)] = {{"argmax", policies(report.state_argmax[s])},
                                      {"argmin", policies(report.state_argmin[s])}};
    }
    out["per_state"] = std::move(per_state);
  }
  Json values = Json::array();
  for (std::size_t i = 0; i < report.policies.size(); ++i) {
    Json row = Json::array();
    for (StateIndex s : mdp.nonterminal()) row.push_back(to_json(report.values[i][s]));
    values.push_back({{"policy", to_json(report.policies[i], mdp)}, {"values", row}});
  }
  out["values"] = std::move(values);
  return out;
}

}  // namespace alignmdp
