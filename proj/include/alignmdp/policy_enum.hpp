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

#include <cstdint>
#include <string>

#include "alignmdp/error.hpp"
#include "alignmdp/mdp.hpp"

namespace alignmdp {

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

// |A|^{|S°|}, or EnumerationInfeasible once the product passes `cap`.
inline std::uint64_t policy_count(const Mdp& mdp,
                                  std::uint64_t cap = kDefaultEnumerationCap) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < mdp.nonterminal().size(); ++i) {
    if (count > cap / mdp.n_actions()) {
      throw EnumerationInfeasible(
          "enumeration infeasible: " + std::to_string(mdp.n_actions()) + "^" +
          std::to_string(mdp.nonterminal().size()) +
          " deterministic policies exceed cap " + std::to_string(cap));
    }
    count *= mdp.n_actions();
  }
  if (count > cap) {
    throw EnumerationInfeasible("enumeration infeasible: policy count exceeds cap " +
                                std::to_string(cap));
  }
  return count;
}

// Mixed-radix decode with the first non-terminal state as the most
// significant digit, so index order coincides with lexicographic order.
inline DeterministicPolicy policy_from_index(const Mdp& mdp, std::uint64_t index) {
  DeterministicPolicy pi{std::vector<ActionIndex>(mdp.n_states(), 0)};
  const auto& states = mdp.nonterminal();
  for (std::size_t i = states.size(); i-- > 0;) {
    pi.actions[states[i]] = static_cast<ActionIndex>(index % mdp.n_actions());
    index /= mdp.n_actions();
  }
  return pi;
}

inline bool advance_policy(const Mdp& mdp, DeterministicPolicy& pi) {
  const auto& states = mdp.nonterminal();
  for (std::size_t i = states.size(); i-- > 0;) {
    auto& a = pi.actions[states[i]];
    if (++a < mdp.n_actions()) return true;
    a = 0;
  }
  return false;
}

// Visits every deterministic stationary policy in lexicographic order.
template <typename Fn>
void for_each_policy(const Mdp& mdp, Fn&& fn,
                     std::uint64_t cap = kDefaultEnumerationCap) {
  policy_count(mdp, cap);
  DeterministicPolicy pi{std::vector<ActionIndex>(mdp.n_states(), 0)};
  std::uint64_t index = 0;
  do {
    fn(index++, static_cast<const DeterministicPolicy&>(pi));
  } while (advance_policy(mdp, pi));
}

inline void check_policy(const Mdp& mdp, const DeterministicPolicy& pi) {
  if (pi.actions.size() != mdp.n_states()) {
    throw InvalidArgument("policy must list one action per state");
  }
  for (StateIndex s : mdp.nonterminal()) {
    if (pi.actions[s] >= mdp.n_actions()) {
      throw InvalidArgument("policy action out of range at state " +
                            std::to_string(s));
    }
  }
}

}  // namespace alignmdp
