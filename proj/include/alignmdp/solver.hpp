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
#include <string>
#include <vector>

#include "alignmdp/chain.hpp"
#include "alignmdp/error.hpp"
#include "alignmdp/extended_value.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/policy_enum.hpp"

namespace alignmdp {

// r^π(s) = Σ_{s'} P[s][π(s)][s'] R[s][π(s)][s'] over all of S.
inline VectorXd expected_reward(const Mdp& mdp, const DeterministicPolicy& pi) {
  VectorXd r(static_cast<Eigen::Index>(mdp.n_states()));
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    const ActionIndex a = mdp.is_terminal(s) ? 0 : pi(s);
    double acc = 0.0;
    for (StateIndex t = 0; t < mdp.n_states(); ++t) acc += mdp.P(s, a, t) * mdp.R(s, a, t);
    r(static_cast<Eigen::Index>(s)) = acc;
  }
  return r;
}

/// V_γ^π over all states via the direct solve (I - γP^π)V = r^π.
/// Terminal entries come out as C.
inline VectorXd eval_discounted(const Mdp& mdp, const DeterministicPolicy& pi) {
  const MatrixXd p = policy_matrix(mdp, pi);
  const auto n = p.rows();
  const MatrixXd a = MatrixXd::Identity(n, n) - mdp.gamma() * p;
  VectorXd v = a.partialPivLu().solve(expected_reward(mdp, pi));
  if (!v.allFinite()) throw InternalError("singular discounted evaluation system");
  return v;
}

namespace detail {

// Tarjan SCCs; components come out in reverse topological order (sinks first).
inline std::vector<std::vector<StateIndex>> strongly_connected(
    const std::vector<std::vector<StateIndex>>& adj) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<StateIndex> stack;
  std::vector<std::vector<StateIndex>> out;
  int counter = 0;
  std::function<void(StateIndex)> connect = [&](StateIndex v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (StateIndex w : adj[v]) {
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<StateIndex> comp;
      StateIndex w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (StateIndex v = 0; v < n; ++v) {
    if (index[v] < 0) connect(v);
  }
  return out;
}

// Stationary distribution of an irreducible block of P^π.
inline VectorXd stationary(const MatrixXd& p, const std::vector<StateIndex>& states) {
  const auto m = static_cast<Eigen::Index>(states.size());
  MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      a(j, i) = (i == j ? 1.0 : 0.0) -
                p(static_cast<Eigen::Index>(states[i]), static_cast<Eigen::Index>(states[j]));
    }
  }
  a.row(m - 1).setOnes();
  VectorXd b = VectorXd::Zero(m);
  b(m - 1) = 1.0;
  return a.fullPivLu().solve(b);
}

}  // namespace detail

/// Undiscounted value V^π per state; terminal entries are Finite(0).
///
/// Rewards count only until absorption into ∂S. States that reach a closed
/// class inside S° diverge: +∞ (-∞) when every such class has positive
/// (negative) stationary mean reward, Undefined when signs mix or a class has
/// zero mean with nonzero rewards. Classes whose rewards are all exactly zero
/// contribute 0.
inline std::vector<ExtendedValue> eval_total(const Mdp& mdp, const DeterministicPolicy& pi) {
  const MatrixXd p = policy_matrix(mdp, pi);
  const VectorXd r = expected_reward(mdp, pi);
  const std::size_t n = mdp.n_states();

  std::vector<std::vector<StateIndex>> adj(n);
  for (StateIndex s = 0; s < n; ++s) {
    for (StateIndex t = 0; t < n; ++t) {
      if (p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) > 0.0) {
        adj[s].push_back(t);
      }
    }
  }
  const auto comps = detail::strongly_connected(adj);

  enum Flag : unsigned { kPos = 1U, kNeg = 2U, kUndef = 4U };
  std::vector<std::size_t> comp_of(n);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (StateIndex s : comps[c]) comp_of[s] = c;
  }
  std::vector<unsigned> flags(comps.size(), 0U);
  std::vector<bool> closed(comps.size(), false);

  // Sinks first, so successors' flags are final before they are merged.
  for (std::size_t c = 0; c < comps.size(); ++c) {
    bool is_closed = true;
    for (StateIndex s : comps[c]) {
      for (StateIndex t : adj[s]) {
        if (comp_of[t] != c) {
          is_closed = false;
          flags[c] |= flags[comp_of[t]];
        }
      }
    }
    closed[c] = is_closed;
    if (!is_closed || mdp.is_terminal(comps[c].front())) continue;

    bool all_zero = true;
    double scale = 0.0;
    for (StateIndex s : comps[c]) {
      for (StateIndex t : adj[s]) {
        const double rew = mdp.R(s, pi(s), t);
        if (rew != 0.0) all_zero = false;
        scale = std::max(scale, std::abs(rew));
      }
    }
    if (all_zero) continue;
    const VectorXd mu = detail::stationary(p, comps[c]);
    double gain = 0.0;
    for (std::size_t i = 0; i < comps[c].size(); ++i) {
      gain += mu(static_cast<Eigen::Index>(i)) * r(static_cast<Eigen::Index>(comps[c][i]));
    }
    if (std::abs(gain) <= 1e-12 * scale) {
      flags[c] |= kUndef;
    } else {
      flags[c] |= gain > 0.0 ? kPos : kNeg;
    }
  }

  std::vector<ExtendedValue> out(n, ExtendedValue::finite(0.0));
  std::vector<StateIndex> transient_finite;
  for (StateIndex s = 0; s < n; ++s) {
    const unsigned f = flags[comp_of[s]];
    if ((f & kUndef) || ((f & kPos) && (f & kNeg))) {
      out[s] = ExtendedValue::undefined();
    } else if (f & kPos) {
      out[s] = ExtendedValue::plus_inf();
    } else if (f & kNeg) {
      out[s] = ExtendedValue::minus_inf();
    } else if (!closed[comp_of[s]]) {
      transient_finite.push_back(s);
    }
  }

  // Fundamental-matrix solve over transient states with finite value; every
  // state they reach is either in this set or in a zero-valued closed class.
  if (!transient_finite.empty()) {
    const auto m = static_cast<Eigen::Index>(transient_finite.size());
    MatrixXd a = MatrixXd::Identity(m, m);
    VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto si = static_cast<Eigen::Index>(transient_finite[i]);
      b(i) = r(si);
      for (Eigen::Index j = 0; j < m; ++j) {
        a(i, j) -= p(si, static_cast<Eigen::Index>(transient_finite[j]));
      }
    }
    const VectorXd v = a.partialPivLu().solve(b);
    for (Eigen::Index i = 0; i < m; ++i) {
      out[transient_finite[i]] = ExtendedValue::finite(v(i));
    }
  }
  return out;
}

/// Q over S×A together with the discount that produced it.
struct QTable {
  MatrixXd q;
  double gamma = 0.0;

  std::size_t n_states() const { return static_cast<std::size_t>(q.rows()); }
  std::size_t n_actions() const { return static_cast<std::size_t>(q.cols()); }
  double operator()(StateIndex s, ActionIndex a) const {
    return q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }
};

inline double row_max(const MatrixXd& q, StateIndex s) {
  return q.row(static_cast<Eigen::Index>(s)).maxCoeff();
}

/// Q*_γ by value iteration from Q ≡ 0 with terminal rows pinned to C.
///
/// Stops once ||Q_{t+1} - Q_t||_∞ <= tol(1-γ)/(2γ), which bounds the sup
/// error of the returned table by tol.
inline QTable value_iteration(const Mdp& mdp, double tol = 1e-10,
                              std::size_t max_iter = 1'000'000) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const auto ns = static_cast<Eigen::Index>(mdp.n_states());
  const auto na = static_cast<Eigen::Index>(mdp.n_actions());
  const double gamma = mdp.gamma();
  const double c = mdp.terminal_value();
  const double stop = tol * (1.0 - gamma) / (2.0 * gamma);

  MatrixXd q = MatrixXd::Zero(ns, na);
  for (StateIndex s : mdp.terminal()) q.row(static_cast<Eigen::Index>(s)).setConstant(c);
  VectorXd v(ns);
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (Eigen::Index s = 0; s < ns; ++s) v(s) = q.row(s).maxCoeff();
    double change = 0.0;
    for (StateIndex s : mdp.nonterminal()) {
      const auto i = static_cast<Eigen::Index>(s);
      for (Eigen::Index a = 0; a < na; ++a) {
        auto prow = mdp.transition().row(s, static_cast<ActionIndex>(a));
        auto rrow = mdp.reward().row(s, static_cast<ActionIndex>(a));
        double acc = 0.0;
        for (StateIndex t = 0; t < mdp.n_states(); ++t) {
          if (prow[t] != 0.0) acc += prow[t] * (rrow[t] + gamma * v(static_cast<Eigen::Index>(t)));
        }
        change = std::max(change, std::abs(acc - q(i, a)));
        q(i, a) = acc;
      }
    }
    if (change <= stop) return {std::move(q), gamma};
  }
  throw ConvergenceError("value iteration did not converge within " +
                         std::to_string(max_iter) + " iterations");
}

/// Row-wise argmax; ties go to the smallest action index.
inline DeterministicPolicy greedy_policy(const QTable& q) {
  DeterministicPolicy pi{std::vector<ActionIndex>(q.n_states(), 0)};
  for (StateIndex s = 0; s < q.n_states(); ++s) {
    ActionIndex best = 0;
    for (ActionIndex a = 1; a < q.n_actions(); ++a) {
      if (q(s, a) > q(s, best)) best = a;
    }
    pi.actions[s] = best;
  }
  return pi;
}

// Same, with terminal entries normalised to 0.
inline DeterministicPolicy greedy_policy(const QTable& q, const Mdp& mdp) {
  auto pi = greedy_policy(q);
  for (StateIndex s : mdp.terminal()) pi.actions[s] = 0;
  return pi;
}

enum class Objective { kDiscounted, kTotal };

inline std::string to_string(Objective o) {
  return o == Objective::kDiscounted ? "discounted" : "total";
}

// Relative tolerance used when deciding that two finite values tie.
inline constexpr double kValueTieTolerance = 1e-9;

/// Brute-force evaluation of every deterministic policy under one objective.
///
/// A policy is in `argmax` iff it attains the per-state maximum at every
/// non-terminal state (and likewise for `argmin`). When no policy does,
/// the uniform set is empty and the matching `no_uniform_*` flag is set;
/// the per-state sets remain available.
struct PolicySetReport {
  Objective objective = Objective::kDiscounted;
  std::vector<DeterministicPolicy> policies;
  // values[i][s] for policy i, all states (terminal entries per evaluator).
  std::vector<std::vector<ExtendedValue>> values;
  std::vector<std::size_t> argmax;
  std::vector<std::size_t> argmin;
  bool no_uniform_max = false;
  bool no_uniform_min = false;
  // Indexed by state; empty for terminal states.
  std::vector<std::vector<std::size_t>> state_argmax;
  std::vector<std::vector<std::size_t>> state_argmin;
  // Policies with an Undefined value at some non-terminal state.
  std::vector<std::size_t> undefined_policies;

  bool argmax_contains(const DeterministicPolicy& pi) const { return contains(argmax, pi); }
  bool argmin_contains(const DeterministicPolicy& pi) const { return contains(argmin, pi); }

  std::vector<DeterministicPolicy> argmax_policies() const { return pick(argmax); }
  std::vector<DeterministicPolicy> argmin_policies() const { return pick(argmin); }

 private:
  bool contains(const std::vector<std::size_t>& set, const DeterministicPolicy& pi) const {
    return std::any_of(set.begin(), set.end(),
                       [&](std::size_t i) { return policies[i] == pi; });
  }
  std::vector<DeterministicPolicy> pick(const std::vector<std::size_t>& set) const {
    std::vector<DeterministicPolicy> out;
    for (std::size_t i : set) out.push_back(policies[i]);
    return out;
  }
};

namespace detail {

inline void fill_extrema(const Mdp& mdp, PolicySetReport& report) {
  const std::size_t n_pol = report.policies.size();
  report.state_argmax.assign(mdp.n_states(), {});
  report.state_argmin.assign(mdp.n_states(), {});
  std::vector<unsigned> max_hits(n_pol, 0), min_hits(n_pol, 0);

  for (StateIndex s : mdp.nonterminal()) {
    const ExtendedValue* best = nullptr;
    const ExtendedValue* worst = nullptr;
    for (std::size_t i = 0; i < n_pol; ++i) {
      const auto& v = report.values[i][s];
      if (!v.is_defined()) continue;
      if (!best || compare(v, *best) > 0) best = &v;
      if (!worst || compare(v, *worst) < 0) worst = &v;
    }
    if (!best) continue;
    for (std::size_t i = 0; i < n_pol; ++i) {
      const auto& v = report.values[i][s];
      if (tied(v, *best, kValueTieTolerance)) {
        report.state_argmax[s].push_back(i);
        ++max_hits[i];
      }
      if (tied(v, *worst, kValueTieTolerance)) {
        report.state_argmin[s].push_back(i);
        ++min_hits[i];
      }
    }
  }

  const auto n_states = static_cast<unsigned>(mdp.nonterminal().size());
  for (std::size_t i = 0; i < n_pol; ++i) {
    if (max_hits[i] == n_states) report.argmax.push_back(i);
    if (min_hits[i] == n_states) report.argmin.push_back(i);
    for (StateIndex s : mdp.nonterminal()) {
      if (!report.values[i][s].is_defined()) {
        report.undefined_policies.push_back(i);
        break;
      }
    }
  }
  report.no_uniform_max = report.argmax.empty();
  report.no_uniform_min = report.argmin.empty();
}

}  // namespace detail

inline PolicySetReport enumerate_policy_report(const Mdp& mdp, Objective objective,
                                               std::uint64_t cap = kDefaultEnumerationCap) {
  PolicySetReport report;
  report.objective = objective;
  const auto count = policy_count(mdp, cap);
  report.policies.reserve(count);
  report.values.reserve(count);
  for_each_policy(
      mdp,
      [&](std::uint64_t, const DeterministicPolicy& pi) {
        report.policies.push_back(pi);
        if (objective == Objective::kTotal) {
          report.values.push_back(eval_total(mdp, pi));
        } else {
          const VectorXd v = eval_discounted(mdp, pi);
          std::vector<ExtendedValue> row;
          row.reserve(mdp.n_states());
          for (Eigen::Index s = 0; s < v.size(); ++s) row.push_back(ExtendedValue::finite(v(s)));
          report.values.push_back(std::move(row));
        }
      },
      cap);
  detail::fill_extrema(mdp, report);
  return report;
}

}  // namespace alignmdp
