#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccap/env.hpp"
#include "ccap/predictor.hpp"
#include "ccap/shaping.hpp"
#include "ccap/subgoals.hpp"

namespace ccap {

struct RLConfig {
  double gamma = 0.99;
  double alpha = 0.2;
  bool alpha_visit_decay = false;  // alpha = 1/N(s,a) instead of the constant
  int episodes = 2000;
  int horizon = 600;
  int eval_cadence = 100;  // episodes between evaluation points
  int eval_episodes = 100;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_decay_fraction = 0.5;  // linear decay over this share of episodes
  double kappa = 1.0;               // shaping scale
  uint64_t seed = 0;
};

enum class Variant { Gdcc, NoPredictor, NoReward, Sparse };
const char* variant_name(Variant v);
std::optional<Variant> variant_from(std::string_view name);

/// Goal-conditioned tabular Q-values keyed by (state key, goal key);
/// unseen pairs read as zero.
struct QTable {
  struct Entry {
    std::array<double, 4> q{};
    std::array<int, 4> n{};
  };
  struct KeyHash {
    size_t operator()(const std::pair<uint64_t, uint64_t>& p) const {
      uint64_t h = p.first ^ (p.second * 0x9e3779b97f4a7c15ull);
      h ^= h >> 29;
      h *= 0xbf58476d1ce4e5b9ull;
      h ^= h >> 32;
      return static_cast<size_t>(h);
    }
  };
  std::unordered_map<std::pair<uint64_t, uint64_t>, Entry, KeyHash> table;

  Entry& entry(StateKey s, StateKey g) { return table[{s.packed(), g.packed()}]; }
  const Entry* find(StateKey s, StateKey g) const {
    const auto it = table.find({s.packed(), g.packed()});
    return it == table.end() ? nullptr : &it->second;
  }
  /// Highest-value action, ties to the lowest index; 0 for unseen pairs.
  int greedy(StateKey s, StateKey g) const;
};

/// Dependencies of the shaped variants.
struct ShapingInputs {
  const SubgoalGraph* graph = nullptr;
  const PredictorModel* model = nullptr;  // gdcc only
  bool gate_forced_off = false;           // test hook: suppress the bonus entirely
};

struct CurvePoint {
  int episode = 0;
  double success = 0.0;
};

struct TrainResult {
  QTable q;
  std::vector<CurvePoint> curve;
};

/// One-step Q-learning on multi-objective sparse episodes (random start and
/// goal each episode). The variant decides the training reward: gdcc gates
/// the potential bonus on the trained predictor agreeing with the region
/// label, no_predictor gates on the straight-line nearest subgoal, and
/// no_reward/sparse use the raw environment reward.
TrainResult train(const Env& env, const RLConfig& cfg, Variant variant,
                  const ShapingInputs* shaping = nullptr);

/// Greedy success rate over fresh evaluation episodes; no exploration, no
/// learning. Deterministic given (table, seed).
double evaluate(const Env& env, const QTable& q, int episodes, uint64_t seed,
                const RLConfig& cfg);

struct ValueIteration {
  std::vector<double> values;
  std::vector<std::vector<int>> greedy;  // per state, actions within tie_tol of the max
  int iterations = 0;
};

/// Bellman optimality iteration to sup-norm tolerance.
ValueIteration value_iteration(const TabularMDP& mdp, const RewardFn& reward, double gamma,
                               double tol = 1e-10, int max_iters = 100000,
                               double tie_tol = 1e-9);

struct AblationConfig {
  RLConfig rl;
  std::vector<uint64_t> seeds;  // shared across variants
};

struct VariantRun {
  Variant variant = Variant::Sparse;
  uint64_t seed = 0;
  std::vector<CurvePoint> curve;
  double final_success = 0.0;
};

struct AblationResult {
  std::vector<VariantRun> runs;
  std::map<Variant, double> mean_final;
};

/// All four variants on identical seed lists.
AblationResult run_ablation(const Env& env, const AblationConfig& cfg,
                            const ShapingInputs* shaping);

/// `episode success_rate` lines.
void write_curve(const std::string& path, std::span<const CurvePoint> curve);
std::vector<CurvePoint> read_curve(const std::string& path);
/// Fixed-column final-success summary, one variant per row.
std::string summary_table(const AblationResult& result);

void write_qtable(const std::string& path, const QTable& q);
QTable read_qtable(const std::string& path);

}  // namespace ccap
