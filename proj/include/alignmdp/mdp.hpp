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
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alignmdp/error.hpp"

namespace alignmdp {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

// Dense [s][a][s'] tensor stored row-major.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t n_states, std::size_t n_actions, double fill = 0.0)
      : n_states_(n_states),
        n_actions_(n_actions),
        data_(n_states * n_actions * n_states, fill) {}

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double operator()(StateIndex s, ActionIndex a, StateIndex next) const {
    return data_[offset(s, a) + next];
  }
  double& operator()(StateIndex s, ActionIndex a, StateIndex next) {
    return data_[offset(s, a) + next];
  }

  std::span<const double> row(StateIndex s, ActionIndex a) const {
    return {data_.data() + offset(s, a), n_states_};
  }
  std::span<double> row(StateIndex s, ActionIndex a) {
    return {data_.data() + offset(s, a), n_states_};
  }

  std::span<const double> flat() const { return data_; }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t offset(StateIndex s, ActionIndex a) const {
    return (s * n_actions_ + a) * n_states_;
  }

  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> data_;
};

// One action per state. Entries at terminal states carry no meaning and are
// kept at 0 so that policies compare and order lexicographically over S°.
struct DeterministicPolicy {
  std::vector<ActionIndex> actions;

  ActionIndex operator()(StateIndex s) const { return actions[s]; }
  auto operator<=>(const DeterministicPolicy&) const = default;
};

/// Finite MDP M(S, ∂S, A, P, r, γ) together with the terminal value C.
///
/// Values are immutable once built; the mutators below return new instances.
/// The constructor only checks shapes. Semantic invariants (stochastic rows,
/// terminal self-loops, the (1-γ)C terminal reward) are reported by
/// `validate` so that broken inputs can be diagnosed rather than rejected
/// wholesale.
class Mdp {
 public:
  Mdp() = default;

  Mdp(std::size_t n_states, std::size_t n_actions,
      std::vector<StateIndex> terminal, Tensor3 transition, Tensor3 reward,
      double gamma, double terminal_value,
      std::vector<std::string> labels = {})
      : n_states_(n_states),
        n_actions_(n_actions),
        terminal_(std::move(terminal)),
        transition_(std::move(transition)),
        reward_(std::move(reward)),
        gamma_(gamma),
        terminal_value_(terminal_value),
        labels_(std::move(labels)) {
    if (n_states_ == 0 || n_actions_ == 0) {
      throw InvalidArgument("MDP needs at least one state and one action");
    }
    for (const Tensor3* t : {&transition_, &reward_}) {
      if (t->n_states() != n_states_ || t->n_actions() != n_actions_) {
        throw InvalidArgument("tensor shape does not match n_states/n_actions");
      }
    }
    if (!labels_.empty() && labels_.size() != n_states_) {
      throw InvalidArgument("labels must name every state");
    }
    terminal_mask_.assign(n_states_, false);
    for (StateIndex s : terminal_) {
      if (s >= n_states_) {
        throw InvalidArgument("terminal state index out of range: " +
                              std::to_string(s));
      }
      terminal_mask_[s] = true;
    }
    for (StateIndex s = 0; s < n_states_; ++s) {
      if (!terminal_mask_[s]) nonterminal_.push_back(s);
    }
  }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  const std::vector<StateIndex>& terminal() const { return terminal_; }
  const std::vector<StateIndex>& nonterminal() const { return nonterminal_; }
  bool is_terminal(StateIndex s) const { return terminal_mask_[s]; }

  const Tensor3& transition() const { return transition_; }
  const Tensor3& reward() const { return reward_; }
  double P(StateIndex s, ActionIndex a, StateIndex next) const {
    return transition_(s, a, next);
  }
  double R(StateIndex s, ActionIndex a, StateIndex next) const {
    return reward_(s, a, next);
  }

  double gamma() const { return gamma_; }
  double terminal_value() const { return terminal_value_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Reward on every terminal self-loop under the terminal-value convention.
  double terminal_reward() const { return (1.0 - gamma_) * terminal_value_; }

  Mdp with_terminal_value(double c) const {
    Mdp out = *this;
    out.terminal_value_ = c;
    const double r = out.terminal_reward();
    for (StateIndex s : out.terminal_) {
      for (ActionIndex a = 0; a < out.n_actions_; ++a) out.reward_(s, a, s) = r;
    }
    return out;
  }

  bool operator==(const Mdp& other) const {
    return n_states_ == other.n_states_ && n_actions_ == other.n_actions_ &&
           terminal_ == other.terminal_ && transition_ == other.transition_ &&
           reward_ == other.reward_ && gamma_ == other.gamma_ &&
           terminal_value_ == other.terminal_value_ && labels_ == other.labels_;
  }

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<StateIndex> terminal_;
  std::vector<StateIndex> nonterminal_;
  std::vector<bool> terminal_mask_;
  Tensor3 transition_;
  Tensor3 reward_;
  double gamma_ = 0.0;
  double terminal_value_ = 0.0;
  std::vector<std::string> labels_;
};

struct Violation {
  std::string rule;
  std::string location;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  std::string summary() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.rule + " at " + v.location + ": " + v.message;
    }
    return out;
  }
};

inline constexpr double kRowSumTolerance = 1e-12;

namespace detail {

inline std::string sa_location(StateIndex s, ActionIndex a) {
  return "(s=" + std::to_string(s) + ",a=" + std::to_string(a) + ")";
}

}  // namespace detail

inline ValidationReport validate(const Mdp& mdp) {
  ValidationReport report;
  auto fail = [&](std::string rule, std::string loc, std::string msg) {
    report.violations.push_back({std::move(rule), std::move(loc), std::move(msg)});
  };

  if (!(mdp.gamma() > 0.0 && mdp.gamma() < 1.0)) {
    fail("gamma-range", "gamma", "gamma must lie in (0,1)");
  }
  if (!std::isfinite(mdp.terminal_value())) {
    fail("terminal-value-finite", "terminal_value", "terminal value must be finite");
  }

  std::vector<StateIndex> sorted = mdp.terminal();
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail("terminal-set", "terminal", "duplicate terminal state index");
  }
  if (mdp.nonterminal().empty() || mdp.nonterminal().size() == mdp.n_states()) {
    fail("terminal-set", "terminal",
         "need 0 < |terminal| < |S|, got " +
             std::to_string(mdp.n_states() - mdp.nonterminal().size()) + " of " +
             std::to_string(mdp.n_states()));
  }

  const double terminal_r = mdp.terminal_reward();
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      const auto loc = detail::sa_location(s, a);
      double sum = 0.0;
      bool in_range = true;
      for (StateIndex t = 0; t < mdp.n_states(); ++t) {
        const double p = mdp.P(s, a, t);
        if (!(p >= 0.0 && p <= 1.0)) in_range = false;
        sum += p;
        if (!std::isfinite(mdp.R(s, a, t))) {
          fail("reward-finite", loc + " -> " + std::to_string(t),
               "reward is not finite");
        }
      }
      if (!in_range) fail("probability-range", loc, "entry outside [0,1]");
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
        fail("row-stochastic", loc, "row sums to " + std::to_string(sum));
      }
      if (mdp.is_terminal(s)) {
        if (mdp.P(s, a, s) != 1.0) {
          fail("terminal-self-loop", loc, "terminal state must self-loop w.p. 1");
        }
        if (mdp.R(s, a, s) != terminal_r) {
          fail("terminal-reward", loc,
               "terminal reward must equal (1-gamma)*C = " +
                   std::to_string(terminal_r));
        }
      }
    }
  }
  report.ok = report.violations.empty();
  return report;
}

inline void require_valid(const Mdp& mdp) {
  auto report = validate(mdp);
  if (!report.ok) throw ValidationError(report.summary());
}

// Three-state example: s1=0 loops on a1 (-1), moves to s2 on a2 (-1); s2
// returns to s1 on a1 (+gamma) or ends in s3=2 on a2 (-1).
inline Mdp build_example1(double gamma, double terminal_value = 0.0) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidArgument("gamma must lie in (0,1)");
  }
  constexpr StateIndex s1 = 0, s2 = 1, s3 = 2;
  constexpr ActionIndex a1 = 0, a2 = 1;
  Tensor3 p(3, 2), r(3, 2);
  p(s1, a1, s1) = 1.0;
  r(s1, a1, s1) = -1.0;
  p(s1, a2, s2) = 1.0;
  r(s1, a2, s2) = -1.0;
  p(s2, a1, s1) = 1.0;
  r(s2, a1, s1) = gamma;
  p(s2, a2, s3) = 1.0;
  r(s2, a2, s3) = -1.0;
  p(s3, a1, s3) = 1.0;
  p(s3, a2, s3) = 1.0;
  Mdp base(3, 2, {s3}, std::move(p), std::move(r), gamma, 0.0, {"s1", "s2", "s3"});
  return base.with_terminal_value(terminal_value);
}

inline Mdp set_terminal_value(const Mdp& mdp, double c) {
  if (!std::isfinite(c)) throw InvalidArgument("terminal value must be finite");
  return mdp.with_terminal_value(c);
}

// Extreme rewards over S°×A×S restricted to transitions with P > 0.
struct RewardRange {
  double r_min;
  double r_max;
};

inline RewardRange reachable_reward_range(const Mdp& mdp) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  RewardRange out{inf, -inf};
  for (StateIndex s : mdp.nonterminal()) {
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      for (StateIndex t = 0; t < mdp.n_states(); ++t) {
        if (mdp.P(s, a, t) > 0.0) {
          out.r_min = std::min(out.r_min, mdp.R(s, a, t));
          out.r_max = std::max(out.r_max, mdp.R(s, a, t));
        }
      }
    }
  }
  return out;
}

}  // namespace alignmdp
