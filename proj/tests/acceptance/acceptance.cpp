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

// Acceptance suite: one PASS/FAIL line per criterion with its runtime limit.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "alignmdp/alignmdp.hpp"
#include "../test_util.hpp"

namespace {

using namespace alignmdp;

// Tolerances and limits.
constexpr double kTableTol = 1e-9;
constexpr double kTaylorTol = 1e-10;
constexpr double kDerivativeRelTol = 1e-6;
constexpr double kOracleTol = 1e-6;
constexpr double kFirstStep = 1e-6;
constexpr double kSecondStep = 1e-4;
constexpr std::size_t kSuiteSeeds = 20;
constexpr std::size_t kContrastFloor = 15;
constexpr std::size_t kOracleSeeds = 50;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (out_.pass) out_.detail = what;
    out_.pass = false;
    ++failures_;
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const {
    Outcome o = out_;
    if (failures_ > 1) o.detail += " (+" + std::to_string(failures_ - 1) + " more)";
    return o;
  }

 private:
  Outcome out_;
  int failures_ = 0;
};

std::string num(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

DeterministicPolicy ex1(ActionIndex s1, ActionIndex s2) { return DeterministicPolicy{{s1, s2, 0}}; }

enum class Total { kFinite, kMinusInf };
struct TotalEntry {
  Total kind;
  double value;
};
constexpr TotalEntry kNegInf{Total::kMinusInf, 0.0};

// 1. Value tables of the three-state example.
Outcome tables() {
  Check c;
  const TotalEntry total[4][2] = {{kNegInf, kNegInf},
                                  {kNegInf, {Total::kFinite, -1.0}},
                                  {kNegInf, kNegInf},
                                  {{Total::kFinite, -2.0}, {Total::kFinite, -1.0}}};
  for (double g : {0.5, 0.9, 0.99}) {
    const double loop = -1.0 / (1.0 - g);
    const double base[4][2] = {{loop, -g * g / (1.0 - g)}, {loop, -1.0}, {-1.0, 0.0}, {-1.0 - g, -1.0}};
    const double shifted[4][2] = {{loop, -g * g / (1.0 - g)}, {loop, 1.0}, {-1.0, 0.0}, {-1.0 + g, 1.0}};
    for (bool with_c : {false, true}) {
      const Mdp mdp = build_example1(g, with_c ? 2.0 / g : 0.0);
      const auto& expected = with_c ? shifted : base;
      for (ActionIndex i = 0; i < 4; ++i) {
        const auto pi = ex1(i / 2, i % 2);
        const auto vg = eval_discounted(mdp, pi);
        const auto v = eval_total(mdp, pi);
        for (int s = 0; s < 2; ++s) {
          const std::string at = "g=" + num(g) + " C=" + (with_c ? "2/g" : "0") + " pi=" +
                                 std::to_string(i) + " s" + std::to_string(s + 1);
          c.expect(std::abs(vg(s) - expected[i][s]) <= kTableTol,
                   at + " V_gamma " + num(vg(s)) + " vs " + num(expected[i][s]));
          const auto& e = total[i][s];
          if (e.kind == Total::kMinusInf) {
            c.expect(v[s].kind() == ExtendedValue::Kind::kMinusInf, at + " V not -inf: " + v[s].to_string());
          } else {
            c.expect(v[s].is_finite() && std::abs(v[s].value() - e.value) <= kTableTol,
                     at + " V " + v[s].to_string());
          }
        }
      }
    }
  }
  c.note("48 discounted and 48 total entries");
  return c.result();
}

// 2. Verdict flips with the terminal value.
Outcome flip() {
  Check c;
  const double g = 0.9;
  const auto base = check_alignment(build_example1(g), 0.0);
  c.expect(base.opposed, "C=0 not opposed");
  c.expect(base.discounted_optimal == std::vector<DeterministicPolicy>{ex1(1, 0)}, "C=0 argmax != {(a2,a1)}");
  const auto shifted = check_alignment(build_example1(g), 2.0 / g);
  c.expect(shifted.aligned, "C=2/g not aligned");
  c.expect(shifted.discounted_optimal == std::vector<DeterministicPolicy>{ex1(1, 1)},
           "C=2/g argmax != {(a2,a2)}");
  c.note("opposed at C=0, aligned at C=2/g");
  return c.result();
}

bool absorbs_within(const Mdp& mdp, const DeterministicPolicy& pi, std::uint64_t k_max) {
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    if (absorption_prob(mdp, pi, k).topRows(static_cast<Eigen::Index>(mdp.nonterminal().size())).maxCoeff() > 0.0) {
      return true;
    }
  }
  return false;
}

bool absorbed_surely(const Mdp& mdp, const DeterministicPolicy& pi) {
  for (const auto& v : eval_total(mdp, pi)) {
    if (!v.is_finite()) return false;
  }
  return true;
}

std::vector<DeterministicPolicy> discounted_optima(const Mdp& mdp, double c) {
  return enumerate_policy_report(set_terminal_value(mdp, c), Objective::kDiscounted,
                                 kDefaultEnumerationCap)
      .argmax_policies();
}

// 3. Lure MDPs: the safe terminal value keeps the optimum away from ∂S.
Outcome lure_suite() {
  Check c;
  std::size_t contrast = 0;
  for (std::uint64_t seed = 0; seed < kSuiteSeeds; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    const Mdp mdp = gen_lure_mdp(cfg);
    const auto bound = thm2_bound(mdp);
    const double safe = bound.safe_value();
    const std::uint64_t k_max = 2 * mdp.n_states();
    const auto verdict = check_alignment(mdp, safe);
    c.expect(verdict.aligned, "seed " + std::to_string(seed) + " not aligned");
    for (const auto& pi : verdict.discounted_optimal) {
      c.expect(!absorbs_within(mdp, pi, k_max), "seed " + std::to_string(seed) + " optimum absorbs");
    }
    const auto base = discounted_optima(mdp, 0.0);
    const bool misaligned = std::any_of(base.begin(), base.end(),
                                        [&](const auto& pi) { return absorbs_within(mdp, pi, k_max); });
    contrast += misaligned ? 1 : 0;
  }
  c.expect(contrast >= kContrastFloor, "C=0 absorbed in only " + std::to_string(contrast) + "/20");
  c.note("aligned 20/20, C=0 absorbed in " + std::to_string(contrast) + "/20");
  return c.result();
}

// 4. Deterrent MDPs: the safe terminal value makes the optimum exit.
Outcome deterrent_suite() {
  Check c;
  std::size_t contrast = 0;
  for (std::uint64_t seed = 0; seed < kSuiteSeeds; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    const Mdp mdp = gen_deterrent_mdp(cfg);
    const auto bound = thm3_bound(mdp);
    const auto verdict = check_alignment(mdp, bound.safe_value());
    c.expect(!verdict.opposed, "seed " + std::to_string(seed) + " opposed");
    c.expect(!verdict.discounted_optimal.empty(), "seed " + std::to_string(seed) + " no optimum");
    for (const auto& pi : verdict.discounted_optimal) {
      c.expect(absorbed_surely(mdp, pi), "seed " + std::to_string(seed) + " optimum not absorbed surely");
    }
    const auto base = discounted_optima(mdp, 0.0);
    const bool avoids = !base.empty() && std::all_of(base.begin(), base.end(), [&](const auto& pi) {
      return !absorbs_within(mdp, pi, 2 * mdp.n_states());
    });
    contrast += avoids ? 1 : 0;
  }
  c.expect(contrast >= kContrastFloor, "C=0 avoids absorption in only " + std::to_string(contrast) + "/20");
  c.note("absorbed 20/20, C=0 avoids absorption in " + std::to_string(contrast) + "/20");
  return c.result();
}

// 5. Constant-reward chains: membership on each side of r_C/(1-γ).
Outcome chain_suite() {
  Check c;
  int cases = 0;
  for (std::size_t n : {3u, 5u, 8u}) {
    for (double g : {0.9, 0.99}) {
      for (double r_c : {1.0, -1.0}) {
        for (bool branch : {true, false}) {
          const double threshold = thm4_threshold(r_c, g);
          const double offset = std::max(1.0, 0.1 * std::abs(threshold));
          for (double c_val : {threshold - offset, threshold + offset}) {
            const Mdp mdp = gen_constant_chain(n, r_c, g, branch);
            const auto v = check_alignment(mdp, c_val);
            const auto predicted = thm4_predict(r_c, g, c_val);
            const std::string at = "n=" + std::to_string(n) + " g=" + num(g) + " rc=" + num(r_c) +
                                   " C=" + num(c_val) + (branch ? " loop" : " back");
            if (predicted == Thm4Prediction::kArgmax) {
              c.expect(v.aligned, at + " expected argmax");
            } else {
              c.expect(v.opposed, at + " expected argmin");
            }
            ++cases;
          }
        }
      }
    }
  }
  c.note(std::to_string(cases) + " chain instances");
  return c.result();
}

// 6. Loss is quadratic in the discount.
Outcome taylor_suite() {
  Check c;
  double worst_residual = 0.0, worst_d1 = 0.0, worst_d2 = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Prng rng(seed + 1000);
    testing::RandomMdpShape shape;
    shape.n_nonterminal = 2 + rng.index(4);
    shape.n_terminal = 1 + rng.index(2);
    shape.n_actions = 1 + rng.index(3);
    shape.gamma = rng.uniform(0.5, 0.999);
    shape.terminal_value = rng.uniform(-2.0, 2.0);
    const Mdp mdp = testing::random_mdp(seed, shape);
    MatrixXd q(static_cast<Eigen::Index>(mdp.n_states()), static_cast<Eigen::Index>(mdp.n_actions()));
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) = rng.uniform(-3.0, 3.0);
    }
    MatrixXd w = MatrixXd::Zero(q.rows(), q.cols());
    for (StateIndex s : mdp.nonterminal()) {
      for (Eigen::Index a = 0; a < w.cols(); ++a) w(static_cast<Eigen::Index>(s), a) = rng.uniform(0.1, 1.0);
    }
    w /= w.sum();
    const StateActionDistribution dist(mdp, w);
    const QTable qt{q, shape.gamma};
    const double g = shape.gamma;
    const auto form = seed % 2 == 0 ? ResidualForm::kPerTransition : ResidualForm::kMeanInside;
    const double l1 = bellman_loss(mdp, qt, dist, 1.0, form);
    const double l_g = bellman_loss(mdp, qt, dist, g, form);
    const double res = taylor_residual(mdp, qt, dist, g, form);
    worst_residual = std::max(worst_residual, res / (1.0 + std::abs(l1)));
    c.expect(res <= kTaylorTol * (1.0 + std::abs(l1)), "seed " + std::to_string(seed) + " residual " + num(res));

    const auto d = loss_gamma_derivatives(mdp, qt, dist, g, form);
    const double fd1 = (bellman_loss(mdp, qt, dist, g + kFirstStep, form) -
                        bellman_loss(mdp, qt, dist, g - kFirstStep, form)) /
                       (2.0 * kFirstStep);
    const double fd2 = (bellman_loss(mdp, qt, dist, g + kSecondStep, form) - 2.0 * l_g +
                        bellman_loss(mdp, qt, dist, g - kSecondStep, form)) /
                       (kSecondStep * kSecondStep);
    const double e1 = std::abs(fd1 - d.d1) / std::abs(d.d1);
    const double e2 = std::abs(fd2 - d.d2) / std::abs(d.d2);
    worst_d1 = std::max(worst_d1, e1);
    worst_d2 = std::max(worst_d2, e2);
    c.expect(e1 < kDerivativeRelTol, "seed " + std::to_string(seed) + " d1 rel err " + num(e1));
    c.expect(e2 < kDerivativeRelTol, "seed " + std::to_string(seed) + " d2 rel err " + num(e2));
  }
  c.note("max scaled residual " + num(worst_residual) + ", max rel err d1 " + num(worst_d1) + " d2 " +
         num(worst_d2));
  return c.result();
}

// 7. Closed-form bound: hand value and monotonicity.
Outcome bound_suite() {
  Check c;
  BoundInputs b;
  b.m = 12;
  b.gamma = 1.0;
  b.horizon = 10;
  b.concentrability = 1.0;
  b.barron_norm = 1.0;
  b.z = 1.0;
  const double hand = suboptimality_bound(b);
  c.expect(hand == 20.0, "hand value " + num(hand));
  for (double z : {0.0, 1.0, 5.0}) {
    for (double g : {0.9, 0.99, 0.999, 1.0}) {
      b.z = z;
      b.gamma = g;
      double prev = std::numeric_limits<double>::infinity();
      for (std::uint64_t m = 12; m <= 12288; m *= 2) {
        b.m = m;
        const double v = suboptimality_bound(b);
        c.expect(v <= prev, "not monotone in m at m=" + std::to_string(m));
        prev = v;
      }
    }
    for (std::uint64_t m = 12; m <= 12288; m *= 2) {
      b.m = m;
      double prev = std::numeric_limits<double>::infinity();
      for (double g : {0.9, 0.99, 0.999, 1.0}) {
        b.gamma = g;
        const double v = suboptimality_bound(b);
        c.expect(v <= prev, "not monotone in gamma at g=" + num(g));
        prev = v;
      }
    }
  }
  c.note("hand value " + num(hand));
  return c.result();
}

// 8. Learning curves on generated MDPs.
Outcome repro_suite() {
  Check c;
  std::string detail;
  for (Figure f : {Figure::kLure, Figure::kDeterrent}) {
    ReproConfig cfg;
    cfg.figure = f;
    const auto report = repro(cfg);
    const auto v = verdict(report);
    const std::string name = to_string(f);
    c.expect(v.aligned_ok, name + " aligned " + v.aligned_rule + " failed: " + num(report.mean_eval_length(true)));
    c.expect(v.baseline_ok, name + " C=0 " + v.baseline_rule + " failed: " + num(report.mean_eval_length(false)));
    detail += name + " aligned " + num(report.mean_eval_length(true)) + " C=0 " +
              num(report.mean_eval_length(false)) + "; ";
  }
  c.note(detail);
  return c.result();
}

// 9. Value iteration agrees with brute force.
Outcome oracle_suite() {
  Check c;
  std::size_t mdps = 0;
  double worst = 0.0;
  for (std::size_t ns = 1; ns <= 4; ++ns) {
    for (std::size_t na = 1; na <= 3; ++na) {
      for (std::uint64_t seed = 0; seed < kOracleSeeds; ++seed) {
        testing::RandomMdpShape shape;
        shape.n_nonterminal = ns;
        shape.n_terminal = 1 + seed % 2;
        shape.n_actions = na;
        shape.gamma = 0.5 + 0.49 * static_cast<double>(seed) / kOracleSeeds;
        shape.terminal_value = static_cast<double>(seed % 5) - 2.0;
        const Mdp mdp = testing::random_mdp(seed * 100 + ns * 10 + na, shape);
        const auto pi = greedy_policy(value_iteration(mdp), mdp);
        const auto v = eval_discounted(mdp, pi);
        VectorXd best = VectorXd::Constant(v.size(), -std::numeric_limits<double>::infinity());
        for_each_policy(mdp, [&](std::uint64_t, const DeterministicPolicy& p) {
          best = best.cwiseMax(eval_discounted(mdp, p));
        });
        for (StateIndex s : mdp.nonterminal()) {
          const double gap = std::abs(v(s) - best(s));
          worst = std::max(worst, gap);
          c.expect(gap <= kOracleTol, "MDP " + std::to_string(mdps) + " state " + std::to_string(s) +
                                          " gap " + num(gap));
        }
        ++mdps;
      }
    }
  }
  c.note(std::to_string(mdps) + " MDPs, max gap " + num(worst));
  return c.result();
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "example value tables", 1.0, tables},
      {2, "example alignment flip", 1.0, flip},
      {3, "lure suite", 120.0, lure_suite},
      {4, "deterrent suite", 120.0, deterrent_suite},
      {5, "constant-chain four cases", 10.0, chain_suite},
      {6, "loss Taylor exactness", 10.0, taylor_suite},
      {7, "bound evaluator", 1.0, bound_suite},
      {8, "Q-learning reproduction", 300.0, repro_suite},
      {9, "value iteration oracle", 30.0, oracle_suite},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    const bool in_time = dt.count() < cr.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s  %d  %-28s %8.3fs / %6.0fs  %s%s\n", pass ? "PASS" : "FAIL", cr.id, cr.name, dt.count(),
                cr.limit_seconds, o.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
