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
#include <optional>
#include <string>
#include <vector>

#include "alignmdp/chain.hpp"
#include "alignmdp/error.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/solver.hpp"

namespace alignmdp {

// Default multiplier applied to a threshold to land strictly on its safe side.
inline constexpr double kSafetyFactor = 10.0 / 9.0;

enum class BoundKind { kThm2Upper, kThm3Lower, kThm4Threshold };

inline std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::kThm2Upper:
      return "thm2_upper";
    case BoundKind::kThm3Lower:
      return "thm3_lower";
    case BoundKind::kThm4Threshold:
      return "thm4_threshold";
  }
  return "unknown";
}

struct AlignmentBound {
  BoundKind kind = BoundKind::kThm2Upper;
  double threshold = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double gamma = 0.0;
  std::size_t n_states = 0;
  double delta = 1.0;

  // Terminal value strictly on the guaranteed side of the threshold.
  double safe_value(double factor = kSafetyFactor) const { return factor * threshold; }
};

namespace detail {

inline double gap_scale(const Mdp& mdp, double delta) {
  return delta * std::pow(mdp.gamma(), static_cast<double>(mdp.n_states() - 1)) *
         (1.0 - mdp.gamma());
}

inline void require_accessible(const Mdp& mdp) {
  const auto acc = check_accessibility(mdp);
  if (!acc.part1) {
    throw PreconditionError("terminal accessibility (1) fails: no terminal state is reachable");
  }
  if (!acc.part2) {
    throw PreconditionError(
        "terminal accessibility (2) fails: some non-terminal state has no action "
        "avoiding one-step terminal entry");
  }
}

}  // namespace detail

/// Terminal value C below which the discounted optimum is total-reward
/// optimal, for MDPs whose reachable non-terminal rewards are all positive:
/// C < (r_min - r_max) / (δ γ^{|S|-1} (1-γ)).
inline AlignmentBound thm2_bound(const Mdp& mdp, const DeltaOptions& options = {}) {
  require_valid(mdp);
  const auto range = reachable_reward_range(mdp);
  if (!(range.r_min > 0.0)) {
    throw PreconditionError("positive-reward bound needs r_min > 0, got r_min = " +
                            std::to_string(range.r_min));
  }
  detail::require_accessible(mdp);
  const double delta = compute_delta(mdp, options).delta;
  AlignmentBound b{BoundKind::kThm2Upper, 0.0, range.r_min, range.r_max, mdp.gamma(),
                   mdp.n_states(), delta};
  b.threshold = (range.r_min - range.r_max) / detail::gap_scale(mdp, delta);
  return b;
}

/// Terminal value C above which the discounted optimum is not the
/// total-reward worst policy, for all-negative rewards:
/// C > (r_max - r_min) / (δ γ^{|S|-1} (1-γ)).
inline AlignmentBound thm3_bound(const Mdp& mdp, const DeltaOptions& options = {}) {
  require_valid(mdp);
  const auto range = reachable_reward_range(mdp);
  if (!(range.r_max < 0.0)) {
    throw PreconditionError("negative-reward bound needs r_max < 0, got r_max = " +
                            std::to_string(range.r_max));
  }
  detail::require_accessible(mdp);
  const double delta = compute_delta(mdp, options).delta;
  AlignmentBound b{BoundKind::kThm3Lower, 0.0, range.r_min, range.r_max, mdp.gamma(),
                   mdp.n_states(), delta};
  b.threshold = (range.r_max - range.r_min) / detail::gap_scale(mdp, delta);
  return b;
}

// r_C / (1-γ) for constant-reward deterministic MDPs.
inline double thm4_threshold(double r_c, double gamma) {
  if (!std::isfinite(r_c) || r_c == 0.0) {
    throw InvalidArgument("constant reward must be finite and nonzero");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0,1)");
  return r_c / (1.0 - gamma);
}

enum class Thm4Prediction { kArgmax, kArgmin, kBoundary };

inline std::string to_string(Thm4Prediction p) {
  switch (p) {
    case Thm4Prediction::kArgmax:
      return "argmax";
    case Thm4Prediction::kArgmin:
      return "argmin";
    case Thm4Prediction::kBoundary:
      return "boundary";
  }
  return "unknown";
}

// Where the discounted optimum lands for a constant reward r_C and terminal
// value C: argmax when C is on the reward's side of r_C/(1-γ), argmin on the
// other side. The threshold itself carries no verdict.
inline Thm4Prediction thm4_predict(double r_c, double gamma, double c) {
  const double threshold = thm4_threshold(r_c, gamma);
  if (c == threshold) return Thm4Prediction::kBoundary;
  const bool below = c < threshold;
  return (r_c > 0.0) == below ? Thm4Prediction::kArgmax : Thm4Prediction::kArgmin;
}

struct AlignmentVerdict {
  double terminal_value = 0.0;
  // Every discounted-optimal policy lies in the total-reward argmax.
  bool aligned = false;
  // Every discounted-optimal policy lies in the total-reward argmin.
  bool opposed = false;
  std::vector<DeterministicPolicy> discounted_optimal;
  PolicySetReport discounted;
  PolicySetReport total;
};

inline AlignmentVerdict check_alignment(const Mdp& mdp, double c,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
  const Mdp shifted = set_terminal_value(mdp, c);
  AlignmentVerdict verdict;
  verdict.terminal_value = c;
  verdict.discounted = enumerate_policy_report(shifted, Objective::kDiscounted, cap);
  verdict.total = enumerate_policy_report(shifted, Objective::kTotal, cap);
  verdict.discounted_optimal = verdict.discounted.argmax_policies();
  const auto& opt = verdict.discounted_optimal;
  verdict.aligned = !opt.empty() && std::all_of(opt.begin(), opt.end(), [&](const auto& pi) {
    return verdict.total.argmax_contains(pi);
  });
  verdict.opposed = !opt.empty() && std::all_of(opt.begin(), opt.end(), [&](const auto& pi) {
    return verdict.total.argmin_contains(pi);
  });
  return verdict;
}

}  // namespace alignmdp
