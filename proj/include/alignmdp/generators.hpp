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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "alignmdp/error.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/prng.hpp"

namespace alignmdp {

struct GenConfig {
  std::size_t n_states = 10;
  std::size_t n_terminal = 1;
  std::size_t n_actions = 3;
  double gamma = 0.99;
  std::uint64_t seed = 0;
  std::size_t max_traj = 500;
};

inline void check(const GenConfig& cfg) {
  if (cfg.n_terminal == 0 || cfg.n_terminal >= cfg.n_states) {
    throw InvalidArgument("need 0 < n_terminal < n_states");
  }
  if (cfg.n_actions == 0) throw InvalidArgument("need at least one action");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InvalidArgument("gamma must lie in (0,1)");
  if (cfg.max_traj == 0) throw InvalidArgument("max_traj must be positive");
}

namespace detail {

// Terminal states occupy the last n_terminal indices, so state 0 is always
// non-terminal.
struct Layout {
  std::size_t n;
  std::size_t first_terminal;
  std::vector<StateIndex> terminal;
};

inline Layout layout(const GenConfig& cfg) {
  Layout l{cfg.n_states, cfg.n_states - cfg.n_terminal, {}};
  for (StateIndex t = l.first_terminal; t < l.n; ++t) l.terminal.push_back(t);
  return l;
}

inline void normalize_rows(Tensor3& p, std::size_t n_nonterminal, std::size_t n_actions) {
  for (StateIndex s = 0; s < n_nonterminal; ++s) {
    for (ActionIndex a = 0; a < n_actions; ++a) {
      auto row = p.row(s, a);
      double sum = 0.0;
      for (double x : row) sum += x;
      for (double& x : row) x /= sum;
    }
  }
}

inline void set_terminal_rows(Tensor3& p, const Layout& l, std::size_t n_actions) {
  for (StateIndex t : l.terminal) {
    for (ActionIndex a = 0; a < n_actions; ++a) p(t, a, t) = 1.0;
  }
}

// Rewards for every S°×A×S entry, drawn in (s, a, s') row-major order.
inline Tensor3 sample_rewards(Prng& rng, const Layout& l, std::size_t n_actions,
                              double inner_lo, double inner_hi, double enter_lo,
                              double enter_hi) {
  Tensor3 r(l.n, n_actions);
  for (StateIndex s = 0; s < l.first_terminal; ++s) {
    for (ActionIndex a = 0; a < n_actions; ++a) {
      for (StateIndex t = 0; t < l.n; ++t) {
        r(s, a, t) = t < l.first_terminal ? rng.uniform(inner_lo, inner_hi)
                                          : rng.uniform(enter_lo, enter_hi);
      }
    }
  }
  return r;
}

}  // namespace detail

/// Positive-reward MDP in which exactly one action per non-terminal state
/// avoids the terminal set. Draw order: rewards, then unnormalised
/// transition weights in U[1,2], then one blocked action per state.
/// Rewards are U[0.1,0.2] between non-terminal states and U[19.9,20] for
/// transitions entering ∂S.
inline Mdp gen_lure_mdp(const GenConfig& cfg) {
  check(cfg);
  Prng rng(cfg.seed);
  const auto l = detail::layout(cfg);
  Tensor3 r = detail::sample_rewards(rng, l, cfg.n_actions, 0.1, 0.2, 19.9, 20.0);
  Tensor3 p(l.n, cfg.n_actions);
  for (StateIndex s = 0; s < l.first_terminal; ++s) {
    for (ActionIndex a = 0; a < cfg.n_actions; ++a) {
      for (StateIndex t = 0; t < l.n; ++t) p(s, a, t) = rng.uniform(1.0, 2.0);
    }
  }
  for (StateIndex s = 0; s < l.first_terminal; ++s) {
    const ActionIndex safe = rng.index(cfg.n_actions);
    for (StateIndex t : l.terminal) p(s, safe, t) = 0.0;
  }
  detail::normalize_rows(p, l.first_terminal, cfg.n_actions);
  detail::set_terminal_rows(p, l, cfg.n_actions);
  return Mdp(l.n, cfg.n_actions, l.terminal, std::move(p), std::move(r), cfg.gamma, 0.0);
}

/// Negative-reward MDP in which a single (state, action) pair can enter ∂S.
/// Draw order: rewards, transition weights U[1,2] among non-terminal states,
/// the chosen pair as one index over S°×A, then that pair's terminal weights
/// in U[0,1]. Rewards are U[-0.2,-0.1] between non-terminal states and
/// U[-20,-19.9] for transitions entering ∂S.
inline Mdp gen_deterrent_mdp(const GenConfig& cfg) {
  check(cfg);
  Prng rng(cfg.seed);
  const auto l = detail::layout(cfg);
  Tensor3 r = detail::sample_rewards(rng, l, cfg.n_actions, -0.2, -0.1, -20.0, -19.9);
  Tensor3 p(l.n, cfg.n_actions);
  for (StateIndex s = 0; s < l.first_terminal; ++s) {
    for (ActionIndex a = 0; a < cfg.n_actions; ++a) {
      for (StateIndex t = 0; t < l.first_terminal; ++t) p(s, a, t) = rng.uniform(1.0, 2.0);
    }
  }
  const std::size_t pair = rng.index(l.first_terminal * cfg.n_actions);
  const StateIndex s_exit = pair / cfg.n_actions;
  const ActionIndex a_exit = pair % cfg.n_actions;
  for (StateIndex t : l.terminal) {
    double w = 0.0;
    // A zero draw (probability 2^-53) would leave no exit; redraw.
    while (w == 0.0) w = rng.uniform01();
    p(s_exit, a_exit, t) = w;
  }
  detail::normalize_rows(p, l.first_terminal, cfg.n_actions);
  detail::set_terminal_rows(p, l, cfg.n_actions);
  return Mdp(l.n, cfg.n_actions, l.terminal, std::move(p), std::move(r), cfg.gamma, 0.0);
}

/// Deterministic chain 0 → 1 → … → n-1 (terminal) with constant reward r_C
/// on every non-terminal transition. Action 0 advances; action 1 stays put
/// (branch = true) or steps back one state, staying at 0 (branch = false).
inline Mdp gen_constant_chain(std::size_t n, double r_c, double gamma, bool branch) {
  if (n < 3) throw InvalidArgument("constant chain needs n >= 3");
  if (!std::isfinite(r_c) || r_c == 0.0) {
    throw InvalidArgument("constant reward must be finite and nonzero");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0,1)");
  Tensor3 p(n, 2), r(n, 2);
  const StateIndex terminal = n - 1;
  for (StateIndex s = 0; s < terminal; ++s) {
    const StateIndex other = branch ? s : (s == 0 ? 0 : s - 1);
    p(s, 0, s + 1) = 1.0;
    r(s, 0, s + 1) = r_c;
    p(s, 1, other) = 1.0;
    r(s, 1, other) = r_c;
  }
  p(terminal, 0, terminal) = 1.0;
  p(terminal, 1, terminal) = 1.0;
  return Mdp(n, 2, {terminal}, std::move(p), std::move(r), gamma, 0.0);
}

}  // namespace alignmdp
