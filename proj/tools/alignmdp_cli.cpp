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

// Command-line front end: gen, analyze, solve, align, bound, loss, train,
// example1 and repro. Output is JSON (default) or CSV on stdout; file
// artifacts go under --out-dir together with a run manifest.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alignmdp/alignmdp.hpp"

namespace fs = std::filesystem;
using namespace alignmdp;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kInfeasible = 3,
  kNoConvergence = 4,
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format = "json";
  bool manifest = true;
};

struct Run {
  std::string command;
  Json config = Json::object();
  std::vector<std::string> outputs;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Objects flatten to dotted keys; arrays of scalars stay inline as JSON.
void flatten(const Json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
    return;
  }
  rows.emplace_back(prefix, scalar_text(v));
}

std::string key_value_csv(const Json& doc) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(doc, "", rows);
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : rows) out << csv_escape(k) << ',' << csv_escape(v) << '\n';
  return out.str();
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

std::string value_text(const ExtendedValue& v) {
  return v.is_finite() ? fmt(v.value()) : v.to_string();
}

void emit(const Globals& g, const Json& doc, const std::string& csv = {}) {
  if (g.format == "csv") {
    std::cout << (csv.empty() ? key_value_csv(doc) : csv);
  } else {
    std::cout << dump(doc);
  }
}

fs::path out_path(const Globals& g, const std::string& name) { return fs::path(g.out_dir) / name; }

void write_manifest(const Globals& g, const Run& run, double seconds) {
  if (!g.manifest) return;
  Json m;
  m["command"] = run.command;
  m["config"] = run.config;
  m["seed"] = g.seed;
  m["format"] = g.format;
  m["version"] = kVersion;
  m["outputs"] = run.outputs;
  m["wall_clock_seconds"] = seconds;
  write_text_file(out_path(g, run.command + ".manifest.json"), dump(m));
}

Json policy_list(const std::vector<DeterministicPolicy>& ps, const Mdp& mdp) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(to_json(p, mdp));
  return out;
}

Json bound_json(const AlignmentBound& b) {
  return {{"kind", to_string(b.kind)}, {"threshold", b.threshold}, {"r_min", b.r_min},
          {"r_max", b.r_max},          {"gamma", b.gamma},         {"n_states", b.n_states},
          {"delta", b.delta}};
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string kind = "lure";
  GenConfig cfg;
  std::size_t chain_n = 5;
  double r_c = 1.0;
  bool branch = true;
  std::string out;
};

void run_gen(const Globals& g, const GenOptions& o, Run& run) {
  GenConfig cfg = o.cfg;
  cfg.seed = g.seed;
  Mdp mdp;
  if (o.kind == "lure") {
    mdp = gen_lure_mdp(cfg);
  } else if (o.kind == "deterrent") {
    mdp = gen_deterrent_mdp(cfg);
  } else {
    mdp = gen_constant_chain(o.chain_n, o.r_c, cfg.gamma, o.branch);
  }
  const fs::path path =
      o.out.empty() ? out_path(g, o.kind + "_seed" + std::to_string(g.seed) + ".json") : fs::path(o.out);
  save(mdp, path);
  run.outputs.push_back(path.string());
  run.config = {{"kind", o.kind},         {"n_states", cfg.n_states}, {"n_terminal", cfg.n_terminal},
                {"n_actions", cfg.n_actions}, {"gamma", cfg.gamma},   {"max_traj", cfg.max_traj},
                {"chain_n", o.chain_n},   {"r_c", o.r_c},             {"branch", o.branch},
                {"out", path.string()}};
  emit(g, {{"path", path.string()}, {"n_states", mdp.n_states()}, {"n_actions", mdp.n_actions()},
           {"terminal", mdp.terminal()}, {"gamma", mdp.gamma()}});
}

// ---------------------------------------------------------------- analyze

struct MdpOptions {
  std::string mdp;
  std::uint64_t cap = kDefaultEnumerationCap;
};

void run_analyze(const Globals& g, const MdpOptions& o, Run& run) {
  const Mdp mdp = load(o.mdp);
  run.config = {{"mdp", o.mdp}, {"cap", o.cap}};
  Json out;
  const auto ep = is_episodic(mdp);
  out["episodic"] = ep.episodic;
  out["H"] = ep.horizon ? Json(*ep.horizon) : Json(nullptr);
  out["witness_cycle"] = ep.witness_cycle ? Json(*ep.witness_cycle) : Json(nullptr);
  const auto acc = check_accessibility(mdp);
  out["accessibility"] = {
      {"part1", acc.part1},
      {"part2", acc.part2},
      {"witness_policy", acc.witness_policy ? to_json(*acc.witness_policy, mdp) : Json(nullptr)}};
  const auto range = reachable_reward_range(mdp);
  out["r_min"] = range.r_min;
  out["r_max"] = range.r_max;
  if (acc.part1) {
    DeltaOptions opts;
    opts.cap = o.cap;
    const auto d = compute_delta(mdp, opts);
    out["delta"] = d.delta;
    out["tie_count"] = d.tie_count;
    Json ws = Json::array();
    for (const auto& w : d.witnesses) {
      ws.push_back({{"policy", to_json(w.policy, mdp)},
                    {"from", w.from},
                    {"to", w.to},
                    {"probability", w.probability}});
    }
    out["witnesses"] = std::move(ws);
  } else {
    out["delta"] = nullptr;
    out["witnesses"] = Json::array();
  }
  emit(g, out);
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string mdp;
  std::string objective = "discounted";
  bool enumerate = false;
  double tol = 1e-10;
  std::size_t max_iter = 1'000'000;
  std::uint64_t cap = kDefaultEnumerationCap;
};

void run_solve(const Globals& g, const SolveOptions& o, Run& run) {
  const Mdp mdp = load(o.mdp);
  run.config = {{"mdp", o.mdp}, {"objective", o.objective}, {"enumerate", o.enumerate},
                {"tol", o.tol}, {"max_iter", o.max_iter},   {"cap", o.cap}};
  const auto q = value_iteration(mdp, o.tol, o.max_iter);
  const auto pi = greedy_policy(q, mdp);
  Json out;
  out["gamma"] = mdp.gamma();
  out["q_table"] = matrix_json(q.q);
  out["greedy_policy"] = to_json(pi, mdp);
  Json greedy_values = Json::array();
  if (o.objective == "total") {
    for (const auto& v : eval_total(mdp, pi)) greedy_values.push_back(to_json(v));
  } else {
    const auto v = eval_discounted(mdp, pi);
    for (Eigen::Index s = 0; s < v.size(); ++s) greedy_values.push_back(v(s));
  }
  out["greedy_values"] = std::move(greedy_values);
  if (o.enumerate) {
    const auto objective = o.objective == "total" ? Objective::kTotal : Objective::kDiscounted;
    const auto report = enumerate_policy_report(mdp, objective, o.cap);
    const auto r = to_json(report, mdp);
    for (const char* key : {"argmax", "argmin", "values", "no_uniform_max", "no_uniform_min",
                            "undefined_policies"}) {
      out[key] = r[key];
    }
    if (r.contains("per_state")) out["per_state"] = r["per_state"];
  }
  std::ostringstream csv;
  csv << "state";
  for (std::size_t a = 0; a < mdp.n_actions(); ++a) csv << ",q_a" << a;
  csv << ",greedy_action\n";
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    csv << s;
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) csv << ',' << fmt(q(s, a));
    csv << ',' << (mdp.is_terminal(s) ? std::string() : std::to_string(pi(s))) << '\n';
  }
  emit(g, out, csv.str());
}

// ---------------------------------------------------------------- align

struct AlignOptions {
  std::string mdp;
  std::optional<double> c;
  std::string automatic;
  double factor = kSafetyFactor;
  std::uint64_t cap = kDefaultEnumerationCap;
};

void run_align(const Globals& g, const AlignOptions& o, Run& run) {
  const Mdp mdp = load(o.mdp);
  run.config = {{"mdp", o.mdp}, {"factor", o.factor}, {"cap", o.cap}, {"auto", o.automatic}};
  Json out;
  double c = mdp.terminal_value();
  if (o.c) {
    c = *o.c;
  } else if (!o.automatic.empty()) {
    DeltaOptions opts;
    opts.cap = o.cap;
    const auto b = o.automatic == "thm2" ? thm2_bound(mdp, opts) : thm3_bound(mdp, opts);
    out["bound"] = bound_json(b);
    c = b.safe_value(o.factor);
  }
  run.config["C"] = c;
  const auto v = check_alignment(mdp, c, o.cap);
  out["terminal_value"] = c;
  out["aligned"] = v.aligned;
  out["opposed"] = v.opposed;
  out["discounted_optimal"] = policy_list(v.discounted_optimal, mdp);
  out["total_argmax"] = policy_list(v.total.argmax_policies(), mdp);
  out["total_argmin"] = policy_list(v.total.argmin_policies(), mdp);
  out["total_no_uniform_max"] = v.total.no_uniform_max;
  out["total_no_uniform_min"] = v.total.no_uniform_min;
  const Mdp shifted = set_terminal_value(mdp, c);
  out["detail"] = {{"discounted", to_json(v.discounted, shifted)},
                   {"total", to_json(v.total, shifted)}};
  emit(g, out);
}

// ---------------------------------------------------------------- bound

void run_bound(const Globals& g, const BoundInputs& b, Run& run) {
  run.config = {{"m", b.m},        {"gamma", b.gamma},          {"Z", b.z},
                {"H", b.horizon}, {"conc", b.concentrability}, {"barron", b.barron_norm}};
  Json out = run.config;
  out["bound"] = suboptimality_bound(b);
  emit(g, out);
}

// ---------------------------------------------------------------- loss

struct LossOptions {
  std::string mdp;
  std::string q;
  std::string dist;
  double gamma = 0.0;
  std::string form = "per-transition";
};

void run_loss(const Globals& g, const LossOptions& o, Run& run) {
  const Mdp mdp = load(o.mdp);
  const QTable q = qtable_from_json(read_json_file(o.q), mdp);
  const StateActionDistribution dist =
      o.dist.empty() ? StateActionDistribution::uniform(mdp)
                     : StateActionDistribution(
                           mdp, matrix_from_json(read_json_file(o.dist), mdp.n_states(),
                                                 mdp.n_actions(), "distribution"));
  const double gamma = o.gamma > 0.0 ? o.gamma : mdp.gamma();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("--gamma must lie in (0,1]");
  const auto form = o.form == "mean-inside" ? ResidualForm::kMeanInside : ResidualForm::kPerTransition;
  run.config = {{"mdp", o.mdp}, {"q", o.q}, {"dist", o.dist}, {"gamma", gamma}, {"residual_form", o.form}};
  const auto d = loss_gamma_derivatives(mdp, q, dist, gamma, form);
  Json out;
  out["gamma"] = gamma;
  out["residual_form"] = to_string(form);
  out["loss"] = bellman_loss(mdp, q, dist, gamma, form);
  out["loss_at_one"] = bellman_loss(mdp, q, dist, 1.0, form);
  out["d1"] = d.d1;
  out["d2"] = d.d2;
  out["taylor_residual"] = taylor_residual(mdp, q, dist, gamma, form);
  emit(g, out);
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string mdp;
  double c = 0.0;
  AgentConfig agent;
  std::size_t eval_episodes = 100;
  std::string out;
};

void run_train(const Globals& g, const TrainOptions& o, Run& run) {
  const Mdp mdp = set_terminal_value(load(o.mdp), o.c);
  AgentConfig cfg = o.agent;
  cfg.terminal_value = o.c;
  cfg.seed = g.seed;
  const auto learned = q_learning(mdp, cfg);
  const auto pi = greedy_policy(learned.q, mdp);
  const auto eval = evaluate_policy(mdp, pi, o.eval_episodes, cfg.cap, evaluation_seed(g.seed),
                                    mdp.nonterminal().front());
  const fs::path path = o.out.empty() ? out_path(g, "train_seed" + std::to_string(g.seed) + ".csv")
                                      : fs::path(o.out);
  write_text_file(path, curves_csv(learned.stats));
  run.outputs.push_back(path.string());
  run.config = {{"mdp", o.mdp},          {"C", o.c},
                {"alpha", cfg.alpha},    {"eps0", cfg.eps0},
                {"eps_halve_every", cfg.eps_halve_every},
                {"episodes", cfg.episodes}, {"cap", cfg.cap},
                {"eval_episodes", o.eval_episodes}, {"out", path.string()}};
  Json out;
  out["curves"] = path.string();
  out["q_table"] = matrix_json(learned.q.q);
  out["greedy_policy"] = to_json(pi, mdp);
  out["training"] = {{"mean_reward", learned.stats.mean_reward()},
                     {"mean_length", learned.stats.mean_length()}};
  out["evaluation"] = {{"episodes", eval.episodes()},
                       {"mean_reward", eval.mean_reward()},
                       {"std_reward", eval.std_reward()},
                       {"mean_length", eval.mean_length()},
                       {"std_length", eval.std_length()}};
  emit(g, out);
}

// ---------------------------------------------------------------- example1

// Closed forms of the example's value tables; index order (a1,a1), (a1,a2),
// (a2,a1), (a2,a2).
struct ClosedForm {
  std::string v_gamma_s1, v_gamma_s2;
  double v_gamma[2];
};

std::vector<ClosedForm> closed_forms(double g, bool shifted) {
  const double loop = -1.0 / (1.0 - g);
  return {
      {"-1/(1-g)", "-g^2/(1-g)", {loop, -g * g / (1.0 - g)}},
      {"-1/(1-g)", shifted ? "1" : "-1", {loop, shifted ? 1.0 : -1.0}},
      {"-1", "0", {-1.0, 0.0}},
      {shifted ? "-1+g" : "-1-g", shifted ? "1" : "-1", {shifted ? -1.0 + g : -1.0 - g, shifted ? 1.0 : -1.0}},
  };
}

void run_example1(const Globals& g, double gamma, Run& run) {
  run.config = {{"gamma", gamma}};
  const char* names[] = {"a1", "a2"};
  Json tables = Json::array();
  std::ostringstream csv;
  csv << "C,pi_s1,pi_s2,Vg_s1,Vg_s2,V_s1,V_s2,closed_Vg_s1,closed_Vg_s2\n";
  for (bool shifted : {false, true}) {
    const double c = shifted ? 2.0 / gamma : 0.0;
    const Mdp mdp = build_example1(gamma, c);
    const auto forms = closed_forms(gamma, shifted);
    Json rows = Json::array();
    std::size_t i = 0;
    for_each_policy(mdp, [&](std::uint64_t, const DeterministicPolicy& pi) {
      const auto vg = eval_discounted(mdp, pi);
      const auto v = eval_total(mdp, pi);
      const auto& f = forms[i++];
      rows.push_back({{"pi", {names[pi(0)], names[pi(1)]}},
                      {"V_gamma", {vg(0), vg(1)}},
                      {"V", {to_json(v[0]), to_json(v[1])}},
                      {"closed_form", {f.v_gamma_s1, f.v_gamma_s2}},
                      {"closed_form_value", {f.v_gamma[0], f.v_gamma[1]}}});
      csv << fmt(c) << ',' << names[pi(0)] << ',' << names[pi(1)] << ',' << fmt(vg(0)) << ','
          << fmt(vg(1)) << ',' << value_text(v[0]) << ',' << value_text(v[1]) << ','
          << f.v_gamma_s1 << ',' << f.v_gamma_s2 << '\n';
    });
    const auto verdict = check_alignment(mdp, c);
    tables.push_back({{"terminal_value", c},
                      {"rows", std::move(rows)},
                      {"discounted_argmax", policy_list(verdict.discounted.argmax_policies(), mdp)},
                      {"total_argmax", policy_list(verdict.total.argmax_policies(), mdp)},
                      {"aligned", verdict.aligned},
                      {"opposed", verdict.opposed}});
  }
  emit(g, {{"gamma", gamma}, {"tables", std::move(tables)}}, csv.str());
}

// ---------------------------------------------------------------- repro

struct ReproOptions {
  std::string figure = "fig3";
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t episodes = 500;
  std::size_t eval_episodes = 100;
};

Json run_json(const ReproRun& r, const Mdp& mdp) {
  return {{"terminal_value", r.terminal_value},
          {"greedy_policy", to_json(r.greedy, mdp)},
          {"eval_mean_length", r.evaluation.mean_length()},
          {"eval_mean_reward", r.evaluation.mean_reward()},
          {"tail_mean_length", r.tail_mean_length},
          {"tail_mean_reward", r.tail_mean_reward}};
}

void run_repro(const Globals& g, const ReproOptions& o, Run& run) {
  ReproConfig cfg;
  cfg.figure = parse_figure(o.figure);
  cfg.seeds = o.seeds;
  cfg.episodes = o.episodes;
  cfg.eval_episodes = o.eval_episodes;
  run.config = {{"figure", o.figure}, {"seeds", o.seeds}, {"episodes", o.episodes},
                {"eval_episodes", o.eval_episodes}};
  const auto report = repro(cfg);
  const auto v = verdict(report);
  const fs::path dir = out_path(g, o.figure);
  Json seeds = Json::array();
  std::ostringstream csv;
  csv << "seed,run,terminal_value,eval_mean_length,eval_mean_reward,tail_mean_length\n";
  for (const auto& s : report.seeds) {
    const Mdp mdp = repro_mdp(cfg, s.seed);
    for (const auto& [name, r] : {std::pair{"baseline", &s.baseline}, std::pair{"aligned", &s.aligned}}) {
      const fs::path path = dir / ("seed" + std::to_string(s.seed) + "_" + name + ".csv");
      write_text_file(path, curves_csv(r->training));
      run.outputs.push_back(path.string());
      csv << s.seed << ',' << name << ',' << fmt(r->terminal_value) << ','
          << fmt(r->evaluation.mean_length()) << ',' << fmt(r->evaluation.mean_reward()) << ','
          << fmt(r->tail_mean_length) << '\n';
    }
    seeds.push_back({{"seed", s.seed},
                     {"bound", bound_json(s.bound)},
                     {"baseline", run_json(s.baseline, mdp)},
                     {"aligned", run_json(s.aligned, mdp)}});
  }
  Json summary = {{"figure", o.figure},
                  {"seeds", std::move(seeds)},
                  {"mean_eval_length", {{"baseline", report.mean_eval_length(false)},
                                        {"aligned", report.mean_eval_length(true)}}},
                  {"verdict", {{"aligned_rule", v.aligned_rule},
                               {"aligned_ok", v.aligned_ok},
                               {"baseline_rule", v.baseline_rule},
                               {"baseline_ok", v.baseline_ok},
                               {"ok", v.ok()}}}};
  const fs::path summary_path = dir / "summary.json";
  write_text_file(summary_path, dump(summary));
  run.outputs.push_back(summary_path.string());
  emit(g, summary, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite-MDP analysis: discounted vs total-reward alignment"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for generators and agents")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for artifacts and manifests")->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_flag("!--no-manifest", g.manifest, "Skip writing the run manifest");

  Run run;

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an MDP file");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"lure", "deterrent", "chain"}))->capture_default_str();
  gen_cmd->add_option("--n-states", gen.cfg.n_states)->capture_default_str();
  gen_cmd->add_option("--n-terminal", gen.cfg.n_terminal)->capture_default_str();
  gen_cmd->add_option("--n-actions", gen.cfg.n_actions)->capture_default_str();
  gen_cmd->add_option("--gamma", gen.cfg.gamma)->capture_default_str();
  gen_cmd->add_option("--max-traj", gen.cfg.max_traj)->capture_default_str();
  gen_cmd->add_option("--chain-n", gen.chain_n, "Chain length (chain kind)")->capture_default_str();
  gen_cmd->add_option("--rc", gen.r_c, "Constant reward (chain kind)")->capture_default_str();
  gen_cmd->add_option("--branch", gen.branch, "Second action self-loops instead of stepping back")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output path");

  MdpOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Episodicity, accessibility and delta");
  analyze_cmd->add_option("--mdp", analyze.mdp)->required();
  analyze_cmd->add_option("--cap", analyze.cap, "Policy enumeration cap")->capture_default_str();

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Value iteration and optional policy enumeration");
  solve_cmd->add_option("--mdp", solve.mdp)->required();
  solve_cmd->add_option("--objective", solve.objective)
      ->check(CLI::IsMember({"discounted", "total"}))
      ->capture_default_str();
  solve_cmd->add_flag("--enumerate", solve.enumerate, "Evaluate every deterministic policy");
  solve_cmd->add_option("--tol", solve.tol)->capture_default_str();
  solve_cmd->add_option("--max-iter", solve.max_iter)->capture_default_str();
  solve_cmd->add_option("--cap", solve.cap)->capture_default_str();

  AlignOptions align;
  auto* align_cmd = app.add_subcommand("align", "Alignment verdict at a terminal value");
  align_cmd->add_option("--mdp", align.mdp)->required();
  auto* c_opt = align_cmd->add_option("--C", align.c, "Terminal value");
  align_cmd->add_option("--auto", align.automatic, "Derive C from a threshold")
      ->check(CLI::IsMember({"thm2", "thm3"}))
      ->excludes(c_opt);
  align_cmd->add_option("--factor", align.factor, "Safety factor applied to the threshold")
      ->capture_default_str();
  align_cmd->add_option("--cap", align.cap)->capture_default_str();

  BoundInputs bound;
  auto* bound_cmd = app.add_subcommand("bound", "Closed-form suboptimality bound");
  bound_cmd->add_option("--m", bound.m)->required();
  bound_cmd->add_option("--gamma", bound.gamma)->required();
  bound_cmd->add_option("--Z", bound.z)->capture_default_str();
  bound_cmd->add_option("--H", bound.horizon)->required();
  bound_cmd->add_option("--conc", bound.concentrability)->capture_default_str();
  bound_cmd->add_option("--barron", bound.barron_norm)->required();

  LossOptions loss;
  auto* loss_cmd = app.add_subcommand("loss", "Bellman loss and its discount derivatives");
  loss_cmd->add_option("--mdp", loss.mdp)->required();
  loss_cmd->add_option("--q", loss.q, "Q table JSON matrix")->required();
  loss_cmd->add_option("--gamma", loss.gamma, "Evaluation discount (default: the MDP's)");
  loss_cmd->add_option("--dist", loss.dist, "Sampling distribution JSON matrix (default uniform)");
  loss_cmd->add_option("--residual-form", loss.form)
      ->check(CLI::IsMember({"per-transition", "mean-inside"}))
      ->capture_default_str();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Tabular Q-learning with terminal bootstrap C");
  train_cmd->add_option("--mdp", train.mdp)->required();
  train_cmd->add_option("--C", train.c)->capture_default_str();
  train_cmd->add_option("--episodes", train.agent.episodes)->capture_default_str();
  train_cmd->add_option("--alpha", train.agent.alpha)->capture_default_str();
  train_cmd->add_option("--eps0", train.agent.eps0)->capture_default_str();
  train_cmd->add_option("--eps-halve-every", train.agent.eps_halve_every)->capture_default_str();
  train_cmd->add_option("--cap", train.agent.cap)->capture_default_str();
  train_cmd->add_option("--eval-episodes", train.eval_episodes)->capture_default_str();
  train_cmd->add_option("--out", train.out, "Learning-curve CSV path");

  double ex_gamma = 0.9;
  auto* ex_cmd = app.add_subcommand("example1", "Value tables of the three-state example");
  ex_cmd->add_option("--gamma", ex_gamma)->capture_default_str();

  ReproOptions rep;
  auto* repro_cmd = app.add_subcommand("repro", "Learning-curve reproduction on generated MDPs");
  repro_cmd->add_option("--figure", rep.figure)->check(CLI::IsMember({"fig3", "fig4"}))->capture_default_str();
  repro_cmd->add_option("--seeds", rep.seeds)->delimiter(',')->capture_default_str();
  repro_cmd->add_option("--episodes", rep.episodes)->capture_default_str();
  repro_cmd->add_option("--eval-episodes", rep.eval_episodes)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (*gen_cmd) {
      run.command = "gen";
      run_gen(g, gen, run);
    } else if (*analyze_cmd) {
      run.command = "analyze";
      run_analyze(g, analyze, run);
    } else if (*solve_cmd) {
      run.command = "solve";
      run_solve(g, solve, run);
    } else if (*align_cmd) {
      run.command = "align";
      run_align(g, align, run);
    } else if (*bound_cmd) {
      run.command = "bound";
      run_bound(g, bound, run);
    } else if (*loss_cmd) {
      run.command = "loss";
      run_loss(g, loss, run);
    } else if (*train_cmd) {
      run.command = "train";
      run_train(g, train, run);
    } else if (*ex_cmd) {
      run.command = "example1";
      run_example1(g, ex_gamma, run);
    } else if (*repro_cmd) {
      run.command = "repro";
      run_repro(g, rep, run);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    write_manifest(g, run, elapsed.count());
  } catch (const EnumerationInfeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
