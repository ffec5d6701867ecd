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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "alignmdp/error.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/policy_enum.hpp"

namespace alignmdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Absorption entries at or below this are treated as zero.
inline constexpr double kPositivityThreshold = 1e-15;

/// P^π over all of S: row s is P[s][π(s)][·] for s ∈ S°, identity rows on ∂S.
inline MatrixXd policy_matrix(const Mdp& mdp, const DeterministicPolicy& pi) {
  check_policy(mdp, pi);
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  MatrixXd m = MatrixXd::Zero(n, n);
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    if (mdp.is_terminal(s)) {
      m(i, i) = 1.0;
      continue;
    }
    auto row = mdp.transition().row(s, pi(s));
    for (StateIndex t = 0; t < mdp.n_states(); ++t) {
      m(i, static_cast<Eigen::Index>(t)) = row[t];
    }
  }
  return m;
}

inline MatrixXd matrix_power(MatrixXd base, std::uint64_t k) {
  MatrixXd result = MatrixXd::Identity(base.rows(), base.cols());
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

// Entry (s,s') is P(s -> s', k, π).
inline MatrixXd k_step(const Mdp& mdp, const DeterministicPolicy& pi, std::uint64_t k) {
  return matrix_power(policy_matrix(mdp, pi), k);
}

// k-step matrix restricted to terminal columns, in the order of mdp.terminal().
inline MatrixXd absorption_prob(const Mdp& mdp, const DeterministicPolicy& pi,
                                std::uint64_t k) {
  const MatrixXd full = k_step(mdp, pi, k);
  MatrixXd out(full.rows(), static_cast<Eigen::Index>(mdp.terminal().size()));
  for (std::size_t j = 0; j < mdp.terminal().size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) =
        full.col(static_cast<Eigen::Index>(mdp.terminal()[j]));
  }
  return out;
}

namespace detail {

// Adjacency on S: t ∈ adj[s] iff some action moves s to t with positive
// probability.
inline std::vector<std::vector<StateIndex>> union_graph(const Mdp& mdp) {
  std::vector<std::vector<StateIndex>> adj(mdp.n_states());
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    for (StateIndex t = 0; t < mdp.n_states(); ++t) {
      for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
        if (mdp.P(s, a, t) > 0.0) {
          adj[s].push_back(t);
          break;
        }
      }
    }
  }
  return adj;
}

}  // namespace detail

struct EpisodicityReport {
  bool episodic = false;
  std::optional<std::size_t> horizon;
  // Loop s, ..., s inside S° (first and last entries equal).
  std::optional<std::vector<StateIndex>> witness_cycle;
};

/// Decides Assumption-3 episodicity exactly.
///
/// Every deterministic policy is absorbed within H steps iff the union graph
/// restricted to S° is acyclic; a cycle there can be followed forever by
/// fixing the cycle's actions. For an acyclic graph H is one more than the
/// longest path (in edges).
inline EpisodicityReport is_episodic(const Mdp& mdp) {
  const auto adj = detail::union_graph(mdp);
  const std::size_t n = mdp.n_states();
  enum class Mark { kNew, kActive, kDone };
  std::vector<Mark> mark(n, Mark::kNew);
  std::vector<std::size_t> longest(n, 0);
  std::vector<StateIndex> stack;
  std::optional<std::vector<StateIndex>> cycle;

  std::function<void(StateIndex)> visit = [&](StateIndex s) {
    mark[s] = Mark::kActive;
    stack.push_back(s);
    for (StateIndex t : adj[s]) {
      if (cycle) return;
      if (mdp.is_terminal(t)) continue;
      if (mark[t] == Mark::kActive) {
        auto it = std::find(stack.begin(), stack.end(), t);
        std::vector<StateIndex> loop(it, stack.end());
        loop.push_back(t);
        cycle = std::move(loop);
        return;
      }
      if (mark[t] == Mark::kNew) visit(t);
      if (cycle) return;
      longest[s] = std::max(longest[s], longest[t] + 1);
    }
    stack.pop_back();
    mark[s] = Mark::kDone;
  };

  for (StateIndex s : mdp.nonterminal()) {
    if (mark[s] == Mark::kNew) visit(s);
    if (cycle) break;
  }

  EpisodicityReport report;
  if (cycle) {
    report.witness_cycle = std::move(cycle);
    return report;
  }
  report.episodic = true;
  std::size_t h = 0;
  for (StateIndex s : mdp.nonterminal()) h = std::max(h, longest[s] + 1);
  report.horizon = h;
  return report;
}

struct AccessibilityReport {
  // Some non-terminal state can reach a terminal state under some policy.
  bool part1 = false;
  // Every non-terminal state has an action with zero one-step terminal mass.
  bool part2 = false;
  std::optional<DeterministicPolicy> witness_policy;
};

inline AccessibilityReport check_accessibility(const Mdp& mdp) {
  AccessibilityReport report;

  // Backward reachability from ∂S over the union graph.
  std::vector<std::vector<StateIndex>> reverse(mdp.n_states());
  const auto adj = detail::union_graph(mdp);
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    for (StateIndex t : adj[s]) reverse[t].push_back(s);
  }
  std::vector<bool> reaches(mdp.n_states(), false);
  std::vector<StateIndex> frontier = mdp.terminal();
  for (StateIndex t : frontier) reaches[t] = true;
  while (!frontier.empty()) {
    StateIndex t = frontier.back();
    frontier.pop_back();
    for (StateIndex s : reverse[t]) {
      if (!reaches[s]) {
        reaches[s] = true;
        frontier.push_back(s);
      }
    }
  }
  report.part1 = std::any_of(mdp.nonterminal().begin(), mdp.nonterminal().end(),
                             [&](StateIndex s) { return reaches[s]; });

  DeterministicPolicy witness{std::vector<ActionIndex>(mdp.n_states(), 0)};
  bool all_states = true;
  for (StateIndex s : mdp.nonterminal()) {
    std::optional<ActionIndex> safe;
    for (ActionIndex a = 0; a < mdp.n_actions() && !safe; ++a) {
      double mass = 0.0;
      for (StateIndex t : mdp.terminal()) mass += mdp.P(s, a, t);
      if (mass == 0.0) safe = a;
    }
    if (!safe) {
      all_states = false;
      break;
    }
    witness.actions[s] = *safe;
  }
  report.part2 = all_states;
  if (all_states) report.witness_policy = std::move(witness);
  return report;
}

struct DeltaWitness {
  DeterministicPolicy policy;
  StateIndex from;
  StateIndex to;
  double probability;
};

struct DeltaOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  double positivity = kPositivityThreshold;
  // Entries within this relative distance of the minimum count as ties.
  double tie_tolerance = 1e-12;
  std::size_t max_witnesses = 16;
};

struct DeltaResult {
  double delta = 0.0;
  // Lexicographic (policy, from, to) order, truncated to max_witnesses.
  std::vector<DeltaWitness> witnesses;
  std::uint64_t tie_count = 0;
};

/// δ: the smallest strictly positive (|S|-1)-step absorption probability over
/// all deterministic stationary policies, source states in S° and targets in
/// ∂S.
inline DeltaResult compute_delta(const Mdp& mdp, const DeltaOptions& options = {}) {
  if (!check_accessibility(mdp).part1) {
    throw PreconditionError(
        "no terminal state is accessible from any non-terminal state; the set "
        "of positive absorption probabilities is empty");
  }
  const std::size_t n = mdp.n_states();
  const std::size_t n_term = mdp.terminal().size();
  const std::size_t steps = n - 1;

  DeltaResult result;
  result.delta = std::numeric_limits<double>::infinity();
  std::vector<DeltaWitness> ties;

  // cur(s, j) = P(s -> terminal[j], k, π), advanced one step at a time.
  std::vector<double> cur(n * n_term), next(n * n_term);
  for_each_policy(
      mdp,
      [&](std::uint64_t, const DeterministicPolicy& pi) {
        std::fill(cur.begin(), cur.end(), 0.0);
        for (std::size_t j = 0; j < n_term; ++j) cur[mdp.terminal()[j] * n_term + j] = 1.0;
        for (std::size_t k = 0; k < steps; ++k) {
          for (StateIndex s = 0; s < n; ++s) {
            double* out = &next[s * n_term];
            if (mdp.is_terminal(s)) {
              std::copy_n(&cur[s * n_term], n_term, out);
              continue;
            }
            std::fill_n(out, n_term, 0.0);
            auto row = mdp.transition().row(s, pi(s));
            for (StateIndex t = 0; t < n; ++t) {
              if (row[t] == 0.0) continue;
              for (std::size_t j = 0; j < n_term; ++j) out[j] += row[t] * cur[t * n_term + j];
            }
          }
          std::swap(cur, next);
        }
        for (StateIndex s : mdp.nonterminal()) {
          for (std::size_t j = 0; j < n_term; ++j) {
            const double p = cur[s * n_term + j];
            if (!(p > options.positivity)) continue;
            if (p < result.delta * (1.0 - options.tie_tolerance)) {
              result.delta = p;
              ties.clear();
              result.tie_count = 0;
            }
            if (p <= result.delta * (1.0 + options.tie_tolerance)) {
              result.delta = std::min(result.delta, p);
              ++result.tie_count;
              if (ties.size() < options.max_witnesses) {
                ties.push_back({pi, s, mdp.terminal()[j], p});
              }
            }
          }
        }
      },
      options.cap);

  if (!std::isfinite(result.delta)) {
    throw PreconditionError("no positive (|S|-1)-step absorption probability");
  }
  result.witnesses = std::move(ties);
  return result;
}

}  // namespace alignmdp
