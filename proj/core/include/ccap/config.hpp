#pragma once

#include <cmath>
#include <string>

#include "ccap/clustering.hpp"
#include "ccap/rl.hpp"

namespace ccap {

/// Resolved pipeline configuration. File format: `key = value`, one pair
/// per line, '#' comments; unknown keys are rejected, duplicate keys warn
/// and keep the last value, absent keys fall back to the defaults below
/// (each applied default is logged).
struct PipelineConfig {
  std::string maze = "builtin:demo";  // path or builtin:{demo,large,tmaze,umaze}
  std::string out_dir = "out";
  std::string space = "discrete";  // discrete | continuous
  double noise = 0.0;
  double step_max = 0.3;

  double tau_nei = 0.7;
  double tau_adj = 1.0;
  double link_threshold = 0.7;                 // follows tau_nei unless set
  double capacity_threshold = std::log(2.5);
  double suppression_radius = 1.0;             // follows tau_adj unless set
  std::string metric = "euclidean";
  int min_samples = 20;
  bool miller_madow = false;

  uint64_t seed = 1;
  int episodes = 500;
  int horizon = 600;
  int frontier_episodes = 0;

  int embed_dim = 64;
  int hidden = 256;
  int layers = 3;
  int pretrain_steps = 10000;
  int predictor_steps = 10000;
  int batch = 1000;
  double lr = 1e-3;
  double lambda_theta = 1.0;
  double lambda_phi = 1.0;
  int segment_len = 50;

  double gamma = 0.99;
  double alpha = 0.2;
  int rl_episodes = 2000;
  int eval_cadence = 100;
  int eval_episodes = 100;
  double kappa = 1.0;
  int ablation_seeds = 5;

  int render_scale = 12;

  PartitionConfig partition() const {
    PartitionConfig p;
    p.tau_nei = tau_nei;
    p.tau_adj = tau_adj;
    p.link_threshold = link_threshold;
    p.metric = metric == "manhattan" ? Metric::Manhattan : Metric::Euclidean;
    return p;
  }
  RLConfig rl() const {
    RLConfig r;
    r.gamma = gamma;
    r.alpha = alpha;
    r.episodes = rl_episodes;
    r.horizon = horizon;
    r.eval_cadence = eval_cadence;
    r.eval_episodes = eval_episodes;
    r.kappa = kappa;
    r.seed = seed;
    return r;
  }
  bool continuous() const { return space == "continuous"; }
};

/// Parses and validates config text; throws ParseError / UnknownKey /
/// ConfigError. Applied defaults and duplicate-key warnings go to log
/// (stderr when null).
PipelineConfig parse_config(std::string_view text, std::string* log = nullptr);

PipelineConfig load_config(const std::string& path, std::string* log = nullptr);

/// Stage seed fan-out: one master seed, stage names hashed into the stream
/// so stages can be rerun independently yet reproducibly.
inline uint64_t stage_seed(const PipelineConfig& cfg, std::string_view stage) {
  return derive_seed(cfg.seed, stage);
}

}  // namespace ccap
