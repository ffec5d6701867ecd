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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "alignmdp/error.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/policy_enum.hpp"
#include "alignmdp/prng.hpp"
#include "alignmdp/solver.hpp"

namespace alignmdp {

inline constexpr std::size_t kDefaultTrajectoryCap = 500;

struct Trajectory {
  std::vector<StateIndex> states;  // s_0 … s_length
  std::vector<ActionIndex> actions;
  std::vector<double> rewards;
  double total_reward = 0.0;  // undiscounted, up to absorption
  std::size_t length = 0;
  bool capped = false;
};

namespace detail {

inline StateIndex sample_next(const Mdp& mdp, StateIndex s, ActionIndex a, Prng& rng) {
  const double u = rng.uniform01();
  auto row = mdp.transition().row(s, a);
  double cum = 0.0;
  StateIndex last_positive = 0;
  for (StateIndex t = 0; t < row.size(); ++t) {
    if (row[t] <= 0.0) continue;
    cum += row[t];
    last_positive = t;
    if (u < cum) return t;
  }
  return last_positive;
}

}  // namespace detail

/// Samples one episode under `pi` from `s0` until ∂S is entered or `cap`
/// steps elapse. Uses one uniform draw per step.
inline Trajectory rollout(const Mdp& mdp, const DeterministicPolicy& pi, StateIndex s0,
                          std::size_t cap, Prng& rng) {
  check_policy(mdp, pi);
  if (s0 >= mdp.n_states() || mdp.is_terminal(s0)) {
    throw InvalidArgument("rollout must start in a non-terminal state");
  }
  Trajectory tr;
  tr.states.push_back(s0);
  StateIndex s = s0;
  while (tr.length < cap && !mdp.is_terminal(s)) {
    const ActionIndex a = pi(s);
    const StateIndex next = detail::sample_next(mdp, s, a, rng);
    tr.actions.push_back(a);
    tr.rewards.push_back(mdp.R(s, a, next));
    tr.total_reward += mdp.R(s, a, next);
    tr.states.push_back(next);
    ++tr.length;
    s = next;
  }
  tr.capped = !mdp.is_terminal(s);
  return tr;
}

inline Trajectory rollout(const Mdp& mdp, const DeterministicPolicy& pi, StateIndex s0,
                          std::size_t cap, std::uint64_t seed) {
  Prng rng(seed);
  return rollout(mdp, pi, s0, cap, rng);
}

// Per-episode series with summary statistics.
struct EpisodeStats {
  std::vector<double> total_reward;
  std::vector<double> length;
  std::vector<double> epsilon;  // exploration rate at episode start; empty for evaluation

  std::size_t episodes() const { return length.size(); }

  static double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  }
  static double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  // Trailing moving average; the first window-1 entries average what exists.
  static std::vector<double> smoothed(const std::vector<double>& xs, std::size_t window = 10) {
    std::vector<double> out(xs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      acc += xs[i];
      if (i >= window) acc -= xs[i - window];
      out[i] = acc / static_cast<double>(std::min(i + 1, window));
    }
    return out;
  }

  double mean_reward() const { return mean(total_reward); }
  double mean_length() const { return mean(length); }
  double std_reward() const { return stddev(total_reward); }
  double std_length() const { return stddev(length); }
};

struct AgentConfig {
  double alpha = 0.1;
  double eps0 = 0.5;
  std::size_t eps_halve_every = 300;  // environment steps
  std::size_t episodes = 300;
  std::size_t cap = kDefaultTrajectoryCap;
  double terminal_value = 0.0;
  std::uint64_t seed = 0;
  StateIndex start_state = 0;
  // Draw each episode's start uniformly from S° instead of start_state.
  bool random_start = false;
};

inline void check(const AgentConfig& cfg, const Mdp& mdp) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0,1]");
  if (!(cfg.eps0 >= 0.0 && cfg.eps0 <= 1.0)) throw InvalidArgument("eps0 must lie in [0,1]");
  if (cfg.eps_halve_every == 0) throw InvalidArgument("eps_halve_every must be positive");
  if (cfg.cap == 0) throw InvalidArgument("trajectory cap must be positive");
  if (!std::isfinite(cfg.terminal_value)) throw InvalidArgument("terminal value must be finite");
  if (!cfg.random_start &&
      (cfg.start_state >= mdp.n_states() || mdp.is_terminal(cfg.start_state))) {
    throw InvalidArgument("start state must be non-terminal");
  }
}

struct LearningResult {
  QTable q;
  EpisodeStats stats;
};

/// Tabular Q-learning whose bootstrap target at a terminal successor is the
/// terminal value C:
///
///   Q(s,a) ← Q(s,a) + α (r + γ B(s') - Q(s,a)),  B(s') = C on ∂S,
///                                                  max_a' Q(s',a') otherwise.
///
/// Behaviour is ε-greedy with ε = eps0 · 2^-⌊steps / eps_halve_every⌋ over
/// environment steps. Per step the generator is consumed as: one draw for
/// the exploration test, one index draw when exploring, one draw for the
/// transition. Episodes with random_start consume one index draw first.
inline LearningResult q_learning(const Mdp& mdp, const AgentConfig& cfg) {
  check(cfg, mdp);
  Prng rng(cfg.seed);
  const double gamma = mdp.gamma();
  MatrixXd q = MatrixXd::Zero(static_cast<Eigen::Index>(mdp.n_states()),
                              static_cast<Eigen::Index>(mdp.n_actions()));
  for (StateIndex t : mdp.terminal()) {
    q.row(static_cast<Eigen::Index>(t)).setConstant(cfg.terminal_value);
  }

  auto greedy = [&](StateIndex s) {
    const auto row = q.row(static_cast<Eigen::Index>(s));
    ActionIndex best = 0;
    for (Eigen::Index a = 1; a < row.size(); ++a) {
      if (row(a) > row(static_cast<Eigen::Index>(best))) best = static_cast<ActionIndex>(a);
    }
    return best;
  };

  LearningResult out;
  std::size_t steps = 0;
  auto epsilon = [&] {
    const auto halvings = static_cast<double>(steps / cfg.eps_halve_every);
    return cfg.eps0 * std::exp2(-halvings);
  };

  for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
    out.stats.epsilon.push_back(epsilon());
    StateIndex s = cfg.random_start ? mdp.nonterminal()[rng.index(mdp.nonterminal().size())]
                                    : cfg.start_state;
    double total = 0.0;
    std::size_t len = 0;
    while (len < cfg.cap && !mdp.is_terminal(s)) {
      const bool explore = rng.uniform01() < epsilon();
      const ActionIndex a = explore ? rng.index(mdp.n_actions()) : greedy(s);
      const StateIndex next = detail::sample_next(mdp, s, a, rng);
      const double r = mdp.R(s, a, next);
      const double bootstrap =
          mdp.is_terminal(next) ? cfg.terminal_value : row_max(q, next);
      auto& entry = q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
      entry += cfg.alpha * (r + gamma * bootstrap - entry);
      total += r;
      ++len;
      ++steps;
      s = next;
    }
    out.stats.total_reward.push_back(total);
    out.stats.length.push_back(static_cast<double>(len));
  }
  out.q = QTable{std::move(q), gamma};
  return out;
}

/// Repeated rollouts of a fixed policy from `start` (state 0 by default),
/// all drawing from one generator seeded with `seed`.
inline EpisodeStats evaluate_policy(const Mdp& mdp, const DeterministicPolicy& pi,
                                    std::size_t episodes, std::size_t cap, std::uint64_t seed,
                                    StateIndex start = 0) {
  Prng rng(seed);
  EpisodeStats stats;
  for (std::size_t i = 0; i < episodes; ++i) {
    const auto tr = rollout(mdp, pi, start, cap, rng);
    stats.total_reward.push_back(tr.total_reward);
    stats.length.push_back(static_cast<double>(tr.length));
  }
  return stats;
}

}  // namespace alignmdp
