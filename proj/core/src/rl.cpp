#include "ccap/rl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"

namespace ccap {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Gdcc:
      return "gdcc";
    case Variant::NoPredictor:
      return "no_predictor";
    case Variant::NoReward:
      return "no_reward";
    default:
      return "sparse";
  }
}

std::optional<Variant> variant_from(std::string_view name) {
  if (name == "gdcc") return Variant::Gdcc;
  if (name == "no_predictor") return Variant::NoPredictor;
  if (name == "no_reward") return Variant::NoReward;
  if (name == "sparse") return Variant::Sparse;
  return std::nullopt;
}

int QTable::greedy(StateKey s, StateKey g) const {
  const Entry* e = find(s, g);
  if (e == nullptr) return 0;
  int best = 0;
  for (int a = 1; a < 4; ++a)
    if (e->q[static_cast<size_t>(a)] > e->q[static_cast<size_t>(best)]) best = a;
  return best;
}

namespace {

Action action_of(const Env& env, int idx) {
  Action a = Action::from_move(static_cast<Move>(idx));
  if (env.kind() == EnvKind::ContinuousMaze) {
    a.dx *= env.step_max();
    a.dy *= env.step_max();
  }
  return a;
}

StateKey cell_of_state(Vec2 state, EnvKind kind) {
  if (kind == EnvKind::ContinuousMaze)
    return {static_cast<int32_t>(std::floor(state.x)), static_cast<int32_t>(std::floor(state.y))};
  return {static_cast<int32_t>(state.x), static_cast<int32_t>(state.y)};
}

// Per-goal potential fields and per-state predictions, built lazily and
// cached; both are deterministic functions of their inputs.
struct ShapingRuntime {
  const Env& env;
  const ShapingInputs& inputs;
  Variant variant;
  std::unordered_map<uint64_t, PotentialField> fields;          // goal cell -> field
  std::unordered_map<uint64_t, int> predicted;                  // state key -> subgoal id
  std::unordered_map<uint64_t, int> planned;                    // state key -> region label

  ShapingRuntime(const Env& e, const ShapingInputs& in, Variant v)
      : env(e), inputs(in), variant(v) {}

  const PotentialField& field_for(StateKey goal_cell) {
    const auto it = fields.find(goal_cell.packed());
    if (it != fields.end()) return it->second;
    PotentialField f = build_potentials(env.maze(), inputs.graph->subgoals, *inputs.graph,
                                        GridPos{goal_cell.ky, goal_cell.kx});
    return fields.emplace(goal_cell.packed(), std::move(f)).first->second;
  }

  int predicted_for(StateKey key, Vec2 state) {
    const auto it = predicted.find(key.packed());
    if (it != predicted.end()) return it->second;
    const Vec2 pos = state_position(state, env.kind());
    const int id = variant == Variant::Gdcc ? predict_subgoal(*inputs.model, pos)
                                            : assign_nearest(pos, inputs.graph->subgoals);
    predicted.emplace(key.packed(), id);
    return id;
  }

  int planned_for(StateKey key) {
    const auto it = planned.find(key.packed());
    if (it != planned.end()) return it->second;
    const int id = inputs.graph->region_of(key);
    planned.emplace(key.packed(), id);
    return id;
  }
};

double shaping_bonus(ShapingRuntime& rt, const Transition& tr, StateKey s_key, StateKey goal_cell,
                     double gamma, double kappa) {
  if (rt.inputs.gate_forced_off) return 0.0;
  const int pred = rt.predicted_for(s_key, tr.state);
  const int plan = rt.planned_for(s_key);
  if (pred != plan) return 0.0;  // activation gate
  const PotentialField& field = rt.field_for(goal_cell);
  const double* phi_s = field.find(cell_of_state(tr.state, rt.env.kind()));
  const double* phi_n = field.find(cell_of_state(tr.next_state, rt.env.kind()));
  if (phi_s == nullptr || phi_n == nullptr) return 0.0;  // flagged region
  return kappa * (gamma * *phi_s - *phi_n);
}

struct EpisodeDraw {
  Vec2 start;
  Vec2 goal;
};

EpisodeDraw draw_episode(const Env& env, Rng& rng) {
  EpisodeDraw d;
  d.start = env.random_start(rng);
  d.goal = env.random_start(rng);
  for (int tries = 0; tries < 64 && env.state_key(d.goal) == env.state_key(d.start); ++tries)
    d.goal = env.random_start(rng);
  return d;
}

}  // namespace

TrainResult train(const Env& env, const RLConfig& cfg, Variant variant,
                  const ShapingInputs* shaping) {
  if (!env.has_maze())
    throw MissingDependency("train requires a maze environment");
  const bool shaped = variant == Variant::Gdcc || variant == Variant::NoPredictor;
  if (shaped) {
    if (shaping == nullptr || shaping->graph == nullptr)
      throw MissingDependency(std::string(variant_name(variant)) +
                              " needs subgoals and a subgoal graph");
    if (variant == Variant::Gdcc && shaping->model == nullptr)
      throw MissingDependency("gdcc needs a trained predictor");
  }

  ShapingRuntime rt(env, shaped ? *shaping : ShapingInputs{}, variant);

  TrainResult result;
  Rng rng(cfg.seed);
  const uint64_t eval_seed = mix_seed(cfg.seed, hash_label("eval"));
  const int decay_span =
      std::max(1, static_cast<int>(cfg.episodes * cfg.eps_decay_fraction));

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double frac = std::min(1.0, static_cast<double>(ep) / decay_span);
    const double eps = cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start);

    const EpisodeDraw draw = draw_episode(env, rng);
    const StateKey goal_key = env.state_key(draw.goal);
    const StateKey goal_cell = cell_of_state(draw.goal, env.kind());
    Vec2 s = draw.start;

    for (int t = 0; t < cfg.horizon; ++t) {
      const StateKey s_key = env.state_key(s);
      int a = 0;
      if (rng.next_double() < eps)
        a = rng.next_int(4);
      else
        a = result.q.greedy(s_key, goal_key);

      const Transition tr = env.step(s, action_of(env, a), rng, draw.goal);
      double r = tr.reward;
      if (shaped) r += shaping_bonus(rt, tr, s_key, goal_cell, cfg.gamma, cfg.kappa);

      const StateKey n_key = env.state_key(tr.next_state);
      QTable::Entry& e = result.q.entry(s_key, goal_key);
      double max_next = 0.0;
      if (!tr.done) {
        const QTable::Entry* ne = result.q.find(n_key, goal_key);
        if (ne != nullptr)
          max_next = *std::max_element(ne->q.begin(), ne->q.end());
      }
      ++e.n[static_cast<size_t>(a)];
      const double alpha =
          cfg.alpha_visit_decay ? 1.0 / e.n[static_cast<size_t>(a)] : cfg.alpha;
      double& qv = e.q[static_cast<size_t>(a)];
      qv += alpha * (r + cfg.gamma * max_next - qv);

      if (tr.done) break;
      s = tr.next_state;
    }

    if (cfg.eval_cadence > 0 && (ep + 1) % cfg.eval_cadence == 0)
      result.curve.push_back(
          {ep + 1, evaluate(env, result.q, cfg.eval_episodes, eval_seed, cfg)});
  }
  if (result.curve.empty() || result.curve.back().episode != cfg.episodes)
    result.curve.push_back(
        {cfg.episodes, evaluate(env, result.q, cfg.eval_episodes, eval_seed, cfg)});
  return result;
}

double evaluate(const Env& env, const QTable& q, int episodes, uint64_t seed,
                const RLConfig& cfg) {
  Rng rng(seed);
  int successes = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    const EpisodeDraw draw = draw_episode(env, rng);
    const StateKey goal_key = env.state_key(draw.goal);
    Vec2 s = draw.start;
    for (int t = 0; t < cfg.horizon; ++t) {
      const int a = q.greedy(env.state_key(s), goal_key);
      const Transition tr = env.step(s, action_of(env, a), rng, draw.goal);
      if (tr.done) {
        ++successes;
        break;
      }
      s = tr.next_state;
    }
  }
  return static_cast<double>(successes) / std::max(1, episodes);
}

ValueIteration value_iteration(const TabularMDP& mdp, const RewardFn& reward, double gamma,
                               double tol, int max_iters, double tie_tol) {
  ValueIteration out;
  out.values.assign(static_cast<size_t>(mdp.n_states), 0.0);
  std::vector<double> next(static_cast<size_t>(mdp.n_states), 0.0);

  // Expected immediate reward is iteration-invariant; hoist it.
  std::vector<double> r_sa(static_cast<size_t>(mdp.n_states) * mdp.n_actions, 0.0);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) {
      double acc = 0.0;
      const auto row = mdp.row(s, a);
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        const double p = row[static_cast<size_t>(s2)];
        if (p > 0.0) acc += p * reward(s, a, s2);
      }
      r_sa[static_cast<size_t>(s) * mdp.n_actions + a] = acc;
    }

  int it = 0;
  for (; it < max_iters; ++it) {
    double delta = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.n_actions; ++a) {
        double acc = r_sa[static_cast<size_t>(s) * mdp.n_actions + a];
        const auto row = mdp.row(s, a);
        for (int s2 = 0; s2 < mdp.n_states; ++s2) {
          const double p = row[static_cast<size_t>(s2)];
          if (p > 0.0) acc += gamma * p * out.values[static_cast<size_t>(s2)];
        }
        best = std::max(best, acc);
      }
      next[static_cast<size_t>(s)] = best;
      delta = std::max(delta, std::abs(best - out.values[static_cast<size_t>(s)]));
    }
    out.values.swap(next);
    if (delta < tol) break;
  }
  if (it >= max_iters)
    throw NonConvergence("value iteration did not converge in " + std::to_string(max_iters) +
                         " sweeps");
  out.iterations = it + 1;

  out.greedy.assign(static_cast<size_t>(mdp.n_states), {});
  for (int s = 0; s < mdp.n_states; ++s) {
    std::vector<double> qs(static_cast<size_t>(mdp.n_actions));
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.n_actions; ++a) {
      double acc = r_sa[static_cast<size_t>(s) * mdp.n_actions + a];
      const auto row = mdp.row(s, a);
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        const double p = row[static_cast<size_t>(s2)];
        if (p > 0.0) acc += gamma * p * out.values[static_cast<size_t>(s2)];
      }
      qs[static_cast<size_t>(a)] = acc;
      best = std::max(best, acc);
    }
    for (int a = 0; a < mdp.n_actions; ++a)
      if (qs[static_cast<size_t>(a)] >= best - tie_tol)
        out.greedy[static_cast<size_t>(s)].push_back(a);
  }
  return out;
}

AblationResult run_ablation(const Env& env, const AblationConfig& cfg,
                            const ShapingInputs* shaping) {
  AblationResult result;
  const Variant variants[4] = {Variant::Gdcc, Variant::NoPredictor, Variant::NoReward,
                               Variant::Sparse};
  for (Variant v : variants) {
    double total = 0.0;
    for (uint64_t seed : cfg.seeds) {
      RLConfig rl = cfg.rl;
      rl.seed = seed;
      TrainResult tr = train(env, rl, v, shaping);
      VariantRun run;
      run.variant = v;
      run.seed = seed;
      run.final_success = tr.curve.back().success;
      run.curve = std::move(tr.curve);
      total += run.final_success;
      result.runs.push_back(std::move(run));
    }
    result.mean_final[v] = total / static_cast<double>(cfg.seeds.size());
  }
  return result;
}

void write_curve(const std::string& path, std::span<const CurvePoint> curve) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  std::string out = "episode success_rate\n";
  for (const CurvePoint& p : curve)
    out += std::to_string(p.episode) + ' ' + fmt_double(p.success) + '\n';
  f << out;
  if (!f) throw IoError("write failed: " + path);
}

std::vector<CurvePoint> read_curve(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  std::vector<CurvePoint> curve;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    CurvePoint p;
    if (fields.size() != 2 || !parse_int(fields[0], p.episode) ||
        !parse_double(fields[1], p.success))
      throw MalformedLine(line_no, "unparseable curve record");
    curve.push_back(p);
  }
  return curve;
}

std::string summary_table(const AblationResult& result) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-14s %-12s %s\n", "variant", "mean_final", "runs");
  out += line;
  for (const auto& [variant, mean] : result.mean_final) {
    int runs = 0;
    for (const VariantRun& r : result.runs) runs += r.variant == variant;
    std::snprintf(line, sizeof line, "%-14s %-12.4f %d\n", variant_name(variant), mean, runs);
    out += line;
  }
  return out;
}

void write_qtable(const std::string& path, const QTable& q) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  // sorted dump so identical tables serialize identically
  std::vector<std::pair<std::pair<uint64_t, uint64_t>, const QTable::Entry*>> items;
  items.reserve(q.table.size());
  for (const auto& [key, e] : q.table) items.emplace_back(key, &e);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "sx sy gx gy q0 q1 q2 q3\n";
  for (const auto& [key, e] : items) {
    const StateKey s{static_cast<int32_t>(key.first >> 32), static_cast<int32_t>(key.first)};
    const StateKey g{static_cast<int32_t>(key.second >> 32), static_cast<int32_t>(key.second)};
    out += std::to_string(s.kx) + ' ' + std::to_string(s.ky) + ' ' + std::to_string(g.kx) +
           ' ' + std::to_string(g.ky);
    for (int a = 0; a < 4; ++a) out += ' ' + fmt_double(e->q[static_cast<size_t>(a)]);
    out += '\n';
  }
  f << out;
  if (!f) throw IoError("write failed: " + path);
}

QTable read_qtable(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  QTable q;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 8) throw MalformedLine(line_no, "expected 8 fields");
    int sx = 0, sy = 0, gx = 0, gy = 0;
    QTable::Entry e;
    if (!parse_int(fields[0], sx) || !parse_int(fields[1], sy) || !parse_int(fields[2], gx) ||
        !parse_int(fields[3], gy) || !parse_double(fields[4], e.q[0]) ||
        !parse_double(fields[5], e.q[1]) || !parse_double(fields[6], e.q[2]) ||
        !parse_double(fields[7], e.q[3]))
      throw MalformedLine(line_no, "unparseable q record");
    q.table[{StateKey{sx, sy}.packed(), StateKey{gx, gy}.packed()}] = e;
  }
  return q;
}

}  // namespace ccap
