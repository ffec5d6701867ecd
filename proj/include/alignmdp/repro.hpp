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
#include <sstream>
#include <string>
#include <vector>

#include "alignmdp/agents.hpp"
#include "alignmdp/alignment.hpp"
#include "alignmdp/error.hpp"
#include "alignmdp/generators.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/solver.hpp"

namespace alignmdp {

enum class Figure { kLure, kDeterrent };

inline std::string to_string(Figure f) { return f == Figure::kLure ? "fig3" : "fig4"; }

inline Figure parse_figure(const std::string& name) {
  if (name == "fig3") return Figure::kLure;
  if (name == "fig4") return Figure::kDeterrent;
  throw InvalidArgument("unknown figure \"" + name + "\" (expected fig3 or fig4)");
}

struct ReproConfig {
  Figure figure = Figure::kLure;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t episodes = 500;
  std::size_t eval_episodes = 100;
  std::size_t tail = 50;  // training episodes averaged for the tail statistic
  double alpha = 0.1;
  GenConfig gen;  // seed is overwritten per run
};

inline double default_eps0(Figure f) { return f == Figure::kLure ? 0.5 : 0.2; }

struct ReproRun {
  double terminal_value = 0.0;
  EpisodeStats training;
  DeterministicPolicy greedy;
  EpisodeStats evaluation;
  double tail_mean_length = 0.0;
  double tail_mean_reward = 0.0;
};

struct ReproSeed {
  std::uint64_t seed = 0;
  AlignmentBound bound;
  ReproRun baseline;  // C = 0
  ReproRun aligned;   // C = (10/9) x threshold
};

struct ReproReport {
  ReproConfig config;
  std::vector<ReproSeed> seeds;

  double mean_eval_length(bool aligned) const {
    if (seeds.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : seeds) {
      acc += (aligned ? s.aligned : s.baseline).evaluation.mean_length();
    }
    return acc / static_cast<double>(seeds.size());
  }
};

// Agent seed is the run seed; evaluation rollouts use a separate stream so
// that the two never share draws.
inline std::uint64_t evaluation_seed(std::uint64_t seed) { return seed ^ 0x5DEECE66DULL; }

inline Mdp repro_mdp(const ReproConfig& cfg, std::uint64_t seed) {
  GenConfig g = cfg.gen;
  g.seed = seed;
  return cfg.figure == Figure::kLure ? gen_lure_mdp(g) : gen_deterrent_mdp(g);
}

inline ReproRun repro_run(const Mdp& mdp, const ReproConfig& cfg, std::uint64_t seed, double c) {
  const Mdp model = set_terminal_value(mdp, c);
  AgentConfig agent;
  agent.alpha = cfg.alpha;
  agent.eps0 = default_eps0(cfg.figure);
  agent.episodes = cfg.episodes;
  agent.cap = cfg.gen.max_traj;
  agent.terminal_value = c;
  agent.seed = seed;
  auto learned = q_learning(model, agent);

  ReproRun run;
  run.terminal_value = c;
  run.greedy = greedy_policy(learned.q, model);
  run.evaluation =
      evaluate_policy(model, run.greedy, cfg.eval_episodes, agent.cap, evaluation_seed(seed));
  const auto& len = learned.stats.length;
  const auto& rew = learned.stats.total_reward;
  const std::size_t n = std::min(cfg.tail, len.size());
  run.tail_mean_length = EpisodeStats::mean({len.end() - static_cast<std::ptrdiff_t>(n), len.end()});
  run.tail_mean_reward = EpisodeStats::mean({rew.end() - static_cast<std::ptrdiff_t>(n), rew.end()});
  run.training = std::move(learned.stats);
  return run;
}

inline ReproSeed repro_seed(const ReproConfig& cfg, std::uint64_t seed) {
  const Mdp mdp = repro_mdp(cfg, seed);
  ReproSeed out;
  out.seed = seed;
  out.bound = cfg.figure == Figure::kLure ? thm2_bound(mdp) : thm3_bound(mdp);
  out.baseline = repro_run(mdp, cfg, seed, 0.0);
  out.aligned = repro_run(mdp, cfg, seed, out.bound.safe_value());
  return out;
}

inline ReproReport repro(const ReproConfig& cfg) {
  ReproReport report;
  report.config = cfg;
  for (std::uint64_t seed : cfg.seeds) report.seeds.push_back(repro_seed(cfg, seed));
  return report;
}

struct ReproVerdict {
  bool aligned_ok = false;
  bool baseline_ok = false;
  std::string aligned_rule;
  std::string baseline_rule;
  bool ok() const { return aligned_ok && baseline_ok; }
};

/// Lure: aligned runs hit the cap, baseline runs end within 25 steps.
/// Deterrent: aligned runs average under half the cap, baseline runs hit it.
inline ReproVerdict verdict(const ReproReport& report) {
  const double cap = static_cast<double>(report.config.gen.max_traj);
  const double aligned = report.mean_eval_length(true);
  const double baseline = report.mean_eval_length(false);
  ReproVerdict v;
  if (report.config.figure == Figure::kLure) {
    v.aligned_rule = "mean length == cap";
    v.baseline_rule = "mean length <= 25";
    v.aligned_ok = aligned == cap;
    v.baseline_ok = baseline <= 25.0;
  } else {
    v.aligned_rule = "mean length < cap/2";
    v.baseline_rule = "mean length == cap";
    v.aligned_ok = aligned < cap / 2.0;
    v.baseline_ok = baseline == cap;
  }
  return v;
}

inline std::string curves_csv(const EpisodeStats& stats) {
  std::ostringstream out;
  out.precision(17);
  out << "episode,total_reward,traj_len,epsilon\n";
  for (std::size_t i = 0; i < stats.episodes(); ++i) {
    out << i << ',' << stats.total_reward[i] << ',' << stats.length[i] << ','
        << (i < stats.epsilon.size() ? stats.epsilon[i] : 0.0) << '\n';
  }
  return out.str();
}

}  // namespace alignmdp
