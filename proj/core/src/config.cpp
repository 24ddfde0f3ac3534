#include "ccap/config.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"

namespace ccap {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct Setter {
  enum Type { Str, Dbl, Int, U64, Bool } type;
  void* target;
};

}  // namespace

PipelineConfig parse_config(std::string_view text, std::string* log) {
  PipelineConfig cfg;
  std::string local_log;
  std::string& out_log = log != nullptr ? *log : local_log;

  const std::map<std::string, Setter> keys = {
      {"maze", {Setter::Str, &cfg.maze}},
      {"out_dir", {Setter::Str, &cfg.out_dir}},
      {"space", {Setter::Str, &cfg.space}},
      {"noise", {Setter::Dbl, &cfg.noise}},
      {"step_max", {Setter::Dbl, &cfg.step_max}},
      {"tau_nei", {Setter::Dbl, &cfg.tau_nei}},
      {"tau_adj", {Setter::Dbl, &cfg.tau_adj}},
      {"link_threshold", {Setter::Dbl, &cfg.link_threshold}},
      {"capacity_threshold", {Setter::Dbl, &cfg.capacity_threshold}},
      {"suppression_radius", {Setter::Dbl, &cfg.suppression_radius}},
      {"metric", {Setter::Str, &cfg.metric}},
      {"min_samples", {Setter::Int, &cfg.min_samples}},
      {"miller_madow", {Setter::Bool, &cfg.miller_madow}},
      {"seed", {Setter::U64, &cfg.seed}},
      {"episodes", {Setter::Int, &cfg.episodes}},
      {"horizon", {Setter::Int, &cfg.horizon}},
      {"frontier_episodes", {Setter::Int, &cfg.frontier_episodes}},
      {"embed_dim", {Setter::Int, &cfg.embed_dim}},
      {"hidden", {Setter::Int, &cfg.hidden}},
      {"layers", {Setter::Int, &cfg.layers}},
      {"pretrain_steps", {Setter::Int, &cfg.pretrain_steps}},
      {"predictor_steps", {Setter::Int, &cfg.predictor_steps}},
      {"batch", {Setter::Int, &cfg.batch}},
      {"lr", {Setter::Dbl, &cfg.lr}},
      {"lambda_theta", {Setter::Dbl, &cfg.lambda_theta}},
      {"lambda_phi", {Setter::Dbl, &cfg.lambda_phi}},
      {"segment_len", {Setter::Int, &cfg.segment_len}},
      {"gamma", {Setter::Dbl, &cfg.gamma}},
      {"alpha", {Setter::Dbl, &cfg.alpha}},
      {"rl_episodes", {Setter::Int, &cfg.rl_episodes}},
      {"eval_cadence", {Setter::Int, &cfg.eval_cadence}},
      {"eval_episodes", {Setter::Int, &cfg.eval_episodes}},
      {"kappa", {Setter::Dbl, &cfg.kappa}},
      {"ablation_seeds", {Setter::Int, &cfg.ablation_seeds}},
      {"render_scale", {Setter::Int, &cfg.render_scale}},
  };

  std::set<std::string> seen;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;

    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected `key = value`");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(line_no, "expected `key = value`");

    const auto it = keys.find(key);
    if (it == keys.end()) throw UnknownKey("unknown config key '" + key + "'");
    if (!seen.insert(key).second)
      out_log += "warning: duplicate key '" + key + "', last value wins\n";

    const Setter& setter = it->second;
    switch (setter.type) {
      case Setter::Str:
        *static_cast<std::string*>(setter.target) = value;
        break;
      case Setter::Dbl: {
        double v = 0;
        if (!parse_double(value, v)) throw ConfigError(key, "not a number: '" + value + "'");
        *static_cast<double*>(setter.target) = v;
        break;
      }
      case Setter::Int: {
        int v = 0;
        if (!parse_int(value, v)) throw ConfigError(key, "not an integer: '" + value + "'");
        *static_cast<int*>(setter.target) = v;
        break;
      }
      case Setter::U64: {
        long v = 0;
        if (!parse_long(value, v) || v < 0)
          throw ConfigError(key, "not a nonnegative integer: '" + value + "'");
        *static_cast<uint64_t*>(setter.target) = static_cast<uint64_t>(v);
        break;
      }
      case Setter::Bool: {
        if (value == "true" || value == "1")
          *static_cast<bool*>(setter.target) = true;
        else if (value == "false" || value == "0")
          *static_cast<bool*>(setter.target) = false;
        else
          throw ConfigError(key, "not a boolean: '" + value + "'");
        break;
      }
    }
  }

  // dependent defaults
  if (!seen.count("link_threshold")) {
    cfg.link_threshold = cfg.tau_nei;
    out_log += "default: link_threshold = tau_nei = " + fmt_double(cfg.link_threshold) + "\n";
  }
  if (!seen.count("suppression_radius")) {
    cfg.suppression_radius = cfg.tau_adj;
    out_log += "default: suppression_radius = tau_adj = " + fmt_double(cfg.suppression_radius) + "\n";
  }
  for (const auto& [key, setter] : keys) {
    if (seen.count(key) || key == "link_threshold" || key == "suppression_radius") continue;
    out_log += "default: " + key + " applied\n";
  }

  // validation
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma", "must lie in (0, 1)");
  cfg.partition().validate();
  if (!(cfg.capacity_threshold > 0.0)) throw ConfigError("capacity_threshold", "must be > 0");
  if (cfg.space != "discrete" && cfg.space != "continuous")
    throw ConfigError("space", "must be 'discrete' or 'continuous'");
  if (cfg.metric != "euclidean" && cfg.metric != "manhattan")
    throw ConfigError("metric", "must be 'euclidean' or 'manhattan'");
  if (cfg.noise < 0.0 || cfg.noise > 0.5) throw ConfigError("noise", "must lie in [0, 0.5]");
  if (cfg.episodes < 1) throw ConfigError("episodes", "must be >= 1");
  if (cfg.horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (cfg.min_samples < 1) throw ConfigError("min_samples", "must be >= 1");
  if (cfg.step_max <= 0.0) throw ConfigError("step_max", "must be > 0");
  if (cfg.alpha <= 0.0 || cfg.alpha > 1.0) throw ConfigError("alpha", "must lie in (0, 1]");
  if (cfg.lambda_theta < 0.0 || cfg.lambda_phi < 0.0 ||
      (cfg.lambda_theta == 0.0 && cfg.lambda_phi == 0.0))
    throw ConfigError("lambda_theta", "loss weights must be nonnegative and not both zero");
  if (cfg.embed_dim < 1 || cfg.hidden < 1 || cfg.layers < 1)
    throw ConfigError("embed_dim", "model dims must be >= 1");
  if (cfg.segment_len < 1) throw ConfigError("segment_len", "must be >= 1");
  if (cfg.render_scale < 1) throw ConfigError("render_scale", "must be >= 1");
  if (cfg.ablation_seeds < 1) throw ConfigError("ablation_seeds", "must be >= 1");

  if (log == nullptr && !local_log.empty()) std::cerr << local_log;
  return cfg;
}

PipelineConfig load_config(const std::string& path, std::string* log) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), log);
}

}  // namespace ccap
