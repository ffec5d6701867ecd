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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "alignmdp/mdp.hpp"
#include "test_util.hpp"

namespace alignmdp {
namespace {

constexpr StateIndex s1 = 0, s2 = 1, s3 = 2;
constexpr ActionIndex a1 = 0, a2 = 1;

bool has_rule(const ValidationReport& report, const std::string& rule) {
  return std::any_of(report.violations.begin(), report.violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

TEST(ValidateTest, Example1IsValid) {
  const auto report = validate(build_example1(0.9, 0.0));
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.violations.empty());
}

TEST(ValidateTest, RowSummingBelowOneIsReported) {
  Tensor3 p(2, 1), r(2, 1);
  p(0, 0, 0) = 0.5;
  p(0, 0, 1) = 0.4;
  p(1, 0, 1) = 1.0;
  const Mdp mdp(2, 1, {1}, p, r, 0.9, 0.0);
  const auto report = validate(mdp);
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(has_rule(report, "row-stochastic"));
}

TEST(ValidateTest, TerminalRewardMustMatchTerminalValue) {
  // Reward tensor left at 0 while C = 5.
  Tensor3 p(2, 1), r(2, 1);
  p(0, 0, 1) = 1.0;
  p(1, 0, 1) = 1.0;
  const Mdp mdp(2, 1, {1}, p, r, 0.9, 5.0);
  const auto report = validate(mdp);
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(has_rule(report, "terminal-reward"));
}

TEST(ValidateTest, ReportsEveryBrokenInvariant) {
  Tensor3 p(2, 1), r(2, 1);
  p(0, 0, 0) = 1.5;
  p(0, 0, 1) = -0.5;
  p(1, 0, 0) = 1.0;
  r(0, 0, 0) = std::numeric_limits<double>::quiet_NaN();
  const Mdp mdp(2, 1, {1}, p, r, 1.0, 0.0);
  const auto report = validate(mdp);
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(has_rule(report, "gamma-range"));
  EXPECT_TRUE(has_rule(report, "probability-range"));
  EXPECT_TRUE(has_rule(report, "reward-finite"));
  EXPECT_TRUE(has_rule(report, "terminal-self-loop"));
  EXPECT_FALSE(report.summary().empty());
}

TEST(ValidateTest, TerminalSetMustBeProperAndNonEmpty) {
  Tensor3 p(2, 1), r(2, 1);
  p(0, 0, 0) = 1.0;
  p(1, 0, 1) = 1.0;
  EXPECT_TRUE(has_rule(validate(Mdp(2, 1, {}, p, r, 0.9, 0.0)), "terminal-set"));
  EXPECT_TRUE(has_rule(validate(Mdp(2, 1, {0, 1}, p, r, 0.9, 0.0)), "terminal-set"));
  EXPECT_TRUE(has_rule(validate(Mdp(2, 1, {1, 1}, p, r, 0.9, 0.0)), "terminal-set"));
}

TEST(ValidateTest, RowSumToleranceIsAbsolute) {
  Tensor3 p(2, 1), r(2, 1);
  p(0, 0, 0) = 0.5;
  p(0, 0, 1) = 0.5 + 5e-13;
  p(1, 0, 1) = 1.0;
  EXPECT_TRUE(validate(Mdp(2, 1, {1}, p, r, 0.9, 0.0)).ok);
  p(0, 0, 1) = 0.5 + 5e-12;
  EXPECT_FALSE(validate(Mdp(2, 1, {1}, p, r, 0.9, 0.0)).ok);
}

TEST(MdpTest, ConstructorRejectsShapeMismatch) {
  Tensor3 p(2, 1), r(3, 1);
  EXPECT_THROW(Mdp(2, 1, {1}, p, r, 0.9, 0.0), InvalidArgument);
  EXPECT_THROW(Mdp(2, 1, {2}, p, Tensor3(2, 1), 0.9, 0.0), InvalidArgument);
}

TEST(Example1Test, RewardOnReturnToS1IsGamma) {
  const auto mdp = build_example1(0.9, 0.0);
  EXPECT_EQ(mdp.R(s2, a1, s1), 0.9);
}

TEST(Example1Test, SecondActionFromS2EndsTheEpisode) {
  const auto mdp = build_example1(0.5, 0.0);
  EXPECT_EQ(mdp.P(s2, a2, s3), 1.0);
  EXPECT_TRUE(mdp.is_terminal(s3));
  EXPECT_EQ(mdp.terminal(), std::vector<StateIndex>{s3});
}

TEST(Example1Test, StructureMatchesDiagram) {
  const auto mdp = build_example1(0.7, 0.0);
  EXPECT_EQ(mdp.n_states(), 3u);
  EXPECT_EQ(mdp.n_actions(), 2u);
  EXPECT_EQ(mdp.P(s1, a1, s1), 1.0);
  EXPECT_EQ(mdp.P(s1, a2, s2), 1.0);
  EXPECT_EQ(mdp.P(s2, a1, s1), 1.0);
  EXPECT_EQ(mdp.R(s1, a1, s1), -1.0);
  EXPECT_EQ(mdp.R(s1, a2, s2), -1.0);
  EXPECT_EQ(mdp.R(s2, a2, s3), -1.0);
  EXPECT_EQ(mdp.labels(), (std::vector<std::string>{"s1", "s2", "s3"}));
}

TEST(Example1Test, TerminalRewardCarriesTerminalValue) {
  const double c = 2.0 / 0.9;
  const auto mdp = build_example1(0.9, c);
  const double expected = (1.0 - 0.9) * c;
  EXPECT_NEAR(expected, 0.2222222222222222, 1e-15);
  EXPECT_EQ(mdp.R(s3, a1, s3), expected);
  EXPECT_EQ(mdp.R(s3, a2, s3), expected);
  EXPECT_EQ(mdp.terminal_value(), c);
}

TEST(Example1Test, RejectsGammaOutsideOpenInterval) {
  EXPECT_THROW(build_example1(0.0), InvalidArgument);
  EXPECT_THROW(build_example1(1.0), InvalidArgument);
  EXPECT_THROW(build_example1(-0.3), InvalidArgument);
  EXPECT_THROW(build_example1(std::nan("")), InvalidArgument);
}

TEST(Example1Test, ValidAcrossGammaGrid) {
  for (double g : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99}) {
    for (double c : {0.0, 2.0 / g, -7.5}) {
      EXPECT_TRUE(validate(build_example1(g, c)).ok) << "gamma=" << g << " C=" << c;
    }
  }
}

TEST(SetTerminalValueTest, ZeroGivesZeroTerminalReward) {
  const auto mdp = set_terminal_value(build_example1(0.9, 3.0), 0.0);
  EXPECT_EQ(mdp.R(s3, a1, s3), 0.0);
  EXPECT_EQ(mdp.R(s3, a2, s3), 0.0);
}

TEST(SetTerminalValueTest, ReadsBackAndLeavesInputUntouched) {
  const auto base = build_example1(0.9, 0.0);
  const auto moved = set_terminal_value(base, 4.25);
  EXPECT_EQ(moved.terminal_value(), 4.25);
  EXPECT_EQ(base.terminal_value(), 0.0);
  EXPECT_EQ(base.R(s3, a1, s3), 0.0);
  EXPECT_TRUE(validate(moved).ok);
}

TEST(SetTerminalValueTest, RejectsNonFinite) {
  const auto base = build_example1(0.9, 0.0);
  EXPECT_THROW(set_terminal_value(base, std::numeric_limits<double>::infinity()),
               InvalidArgument);
  EXPECT_THROW(set_terminal_value(base, std::nan("")), InvalidArgument);
}

TEST(SetTerminalValueTest, IdempotentAndOnlyTouchesTerminalRows) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    testing::RandomMdpShape shape;
    shape.n_terminal = 1 + seed % 2;
    const auto mdp = testing::random_mdp(seed, shape);
    ASSERT_TRUE(validate(mdp).ok);
    const double c = -3.0 + 0.37 * static_cast<double>(seed);
    const auto once = set_terminal_value(mdp, c);
    EXPECT_EQ(set_terminal_value(once, c), once);
    EXPECT_TRUE(validate(once).ok);
    EXPECT_EQ(once.transition(), mdp.transition());
    for (StateIndex s : mdp.nonterminal()) {
      for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
        for (StateIndex t = 0; t < mdp.n_states(); ++t) {
          EXPECT_EQ(once.R(s, a, t), mdp.R(s, a, t));
        }
      }
    }
  }
}

TEST(RewardRangeTest, IgnoresZeroProbabilityEntriesAndTerminalRows) {
  const auto mdp = build_example1(0.9, 50.0);
  const auto range = reachable_reward_range(mdp);
  EXPECT_EQ(range.r_min, -1.0);
  EXPECT_EQ(range.r_max, 0.9);
}

TEST(PolicyTest, OrdersLexicographically) {
  DeterministicPolicy a{{0, 1, 0}}, b{{1, 0, 0}};
  EXPECT_LT(a, b);
  EXPECT_EQ(a, (DeterministicPolicy{{0, 1, 0}}));
}

}  // namespace
}  // namespace alignmdp
