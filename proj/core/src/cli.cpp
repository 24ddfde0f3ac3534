#include "ccap/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ccap/config.hpp"
#include "ccap/errors.hpp"
#include "ccap/fixtures.hpp"
#include "ccap/gradcheck.hpp"
#include "ccap/io_util.hpp"
#include "ccap/render.hpp"
#include "ccap/sampler.hpp"
#include "ccap/transfer_entropy.hpp"

namespace ccap {

namespace {

namespace fs = std::filesystem;

constexpr const char* kUsage =
    "usage: ccap <command> [options]\n"
    "commands:\n"
    "  sample           collect random-policy trajectories\n"
    "  capacity         estimate per-state causal capacity\n"
    "  subgoals         select subgoals and build the subgoal graph\n"
    "  train-predictor  pretrain encoder/decoder and train the predictor\n"
    "  eval-predictor   region-label accuracy of a trained predictor\n"
    "  train            goal-conditioned Q-learning (gdcc|no_predictor|no_reward|sparse)\n"
    "  eval             success rate of a trained Q-table\n"
    "  ablate           all four training variants on shared seeds\n"
    "  render           heatmap / region / curve images\n"
    "  verify           bound, invariance and gradient checks; nonzero on failure\n";

MazeSpec resolve_maze(const std::string& spec) {
  if (spec == "builtin:demo") return parse_maze(fixtures::demo_maze_text());
  if (spec == "builtin:large") return parse_maze(fixtures::large_maze_text());
  if (spec == "builtin:tmaze") return parse_maze(fixtures::t_maze_text());
  if (spec == "builtin:umaze") return parse_maze(fixtures::u_maze_text());
  return load_maze_file(spec);
}

Env make_env(const PipelineConfig& cfg, const MazeSpec& maze) {
  if (cfg.continuous()) return Env::continuous_maze(maze, cfg.step_max, cfg.tau_nei);
  return Env::discrete_maze(maze, cfg.noise);
}

struct Common {
  std::string config_path;
  std::string maze_override;
  std::string out_override;
  int64_t seed_override = -1;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "config file (key = value lines)");
    app->add_option("--maze", maze_override, "maze file or builtin:{demo,large,tmaze,umaze}");
    app->add_option("--out", out_override, "output directory");
    app->add_option("--seed", seed_override, "master seed override");
  }

  PipelineConfig resolve() const {
    std::string log;
    PipelineConfig cfg =
        config_path.empty() ? parse_config("", &log) : load_config(config_path, &log);
    if (!maze_override.empty()) cfg.maze = maze_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
    std::cerr << log;
    std::cerr << "resolved: maze=" << cfg.maze << " space=" << cfg.space
              << " seed=" << cfg.seed << " out=" << cfg.out_dir << "\n";
    fs::create_directories(cfg.out_dir);
    return cfg;
  }
};

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

// label positions of every region-map entry, used by eval-predictor
std::vector<std::pair<Vec2, int>> region_labels(const SubgoalGraph& graph, EnvKind kind) {
  std::vector<std::pair<Vec2, int>> labels;
  for (const auto& [key, id] : graph.region)
    labels.emplace_back(state_position(graph.key_position(key), kind), id);
  return labels;
}

int cmd_sample(const Common& common, int episodes_override, int frontier_override) {
  PipelineConfig cfg = common.resolve();
  if (episodes_override > 0) cfg.episodes = episodes_override;
  if (frontier_override >= 0) cfg.frontier_episodes = frontier_override;
  const MazeSpec maze = resolve_maze(cfg.maze);
  const Env env = make_env(cfg, maze);

  TrajectorySet set = rollout_random(env, cfg.episodes, cfg.horizon, stage_seed(cfg, "sample"));
  if (cfg.frontier_episodes > 0) {
    const VisitCounts counts = visit_counts(set, cfg.tau_nei);
    set = merge_trajectories(set, frontier_resample(env, counts, cfg.frontier_episodes,
                                                    cfg.horizon, stage_seed(cfg, "frontier")));
  }
  const std::string path = out_path(cfg, "trajectories.log");
  write_trajectories(path, set);
  const VisitCounts counts = visit_counts(set, cfg.tau_nei);
  std::cout << "wrote " << set.transitions.size() << " transitions, "
            << counts.counts.size() << " distinct states -> " << path << "\n";
  return 0;
}

int cmd_capacity(const Common& common, const std::string& in, const std::string& estimator) {
  PipelineConfig cfg = common.resolve();
  const std::string traj_path = in.empty() ? out_path(cfg, "trajectories.log") : in;
  const TrajectorySet set = read_trajectories(traj_path);
  const EstimatorTag tag = estimator == "clustered" ? EstimatorTag::Clustered : EstimatorTag::Mc;
  const CapacityMap map =
      capacity_map(set, cfg.partition(), tag, cfg.min_samples, cfg.miller_madow);
  const std::string path = out_path(cfg, "capacity.txt");
  write_capacity_map(path, map);
  std::cout << "wrote capacity of " << map.states.size() << " states -> " << path << "\n";
  return 0;
}

int cmd_subgoals(const Common& common, const std::string& capacity_in,
                 const std::string& traj_in) {
  PipelineConfig cfg = common.resolve();
  const MazeSpec maze = resolve_maze(cfg.maze);
  const CapacityMap map =
      read_capacity_map(capacity_in.empty() ? out_path(cfg, "capacity.txt") : capacity_in);
  const TrajectorySet set =
      read_trajectories(traj_in.empty() ? out_path(cfg, "trajectories.log") : traj_in);

  const SubgoalSet subgoals =
      select_subgoals(map, cfg.capacity_threshold, cfg.suppression_radius, cfg.tau_nei);
  const SubgoalGraph graph = build_subgoal_graph(set, subgoals, cfg.tau_nei, &maze);
  const std::string path = out_path(cfg, "subgoals.txt");
  write_subgoal_graph(path, graph);
  std::cout << "selected " << subgoals.goals.size() << " subgoals, " << graph.edges.size()
            << " edges -> " << path << "\n";
  return 0;
}

int cmd_train_predictor(const Common& common, const std::string& traj_in,
                        const std::string& graph_in) {
  PipelineConfig cfg = common.resolve();
  const MazeSpec maze = resolve_maze(cfg.maze);
  const TrajectorySet set =
      read_trajectories(traj_in.empty() ? out_path(cfg, "trajectories.log") : traj_in);
  const SubgoalGraph graph =
      read_subgoal_graph(graph_in.empty() ? out_path(cfg, "subgoals.txt") : graph_in);

  PredictorModel model =
      init_model(2, cfg.embed_dim, cfg.hidden, cfg.layers, stage_seed(cfg, "model"));
  model.norm = StateNormalizer::for_maze(maze);
  model.set_subgoals(graph.subgoals, set.kind);

  std::vector<Vec2> states;
  states.reserve(set.transitions.size());
  for (const Transition& tr : set.transitions)
    states.push_back(state_position(tr.state, set.kind));

  LossWeights w{cfg.lambda_theta, cfg.lambda_phi};
  const PretrainCurves pre = pretrain_encoder(model, states, w, cfg.pretrain_steps, cfg.lr,
                                              cfg.batch, stage_seed(cfg, "pretrain"));
  const PredictorCurve fit = train_predictor(model, set, cfg.segment_len, cfg.predictor_steps,
                                             cfg.lr, stage_seed(cfg, "predictor"));

  save_model(out_path(cfg, "model.bin"), model);
  auto dump = [&](const std::string& name, const std::vector<double>& values) {
    std::vector<CurvePoint> curve;
    curve.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i)
      curve.push_back({static_cast<int>(i + 1), values[i]});
    write_curve(out_path(cfg, name), curve);
  };
  dump("pretrain_reconstruction.txt", pre.reconstruction);
  dump("pretrain_similarity.txt", pre.subgoal_similarity);
  dump("predictor_loss.txt", fit.loss);

  const double acc = eval_accuracy(model, region_labels(graph, set.kind));
  std::cout << "predictor trained; region-label accuracy " << acc << " -> "
            << out_path(cfg, "model.bin") << "\n";
  return 0;
}

int cmd_eval_predictor(const Common& common, const std::string& model_in,
                       const std::string& graph_in) {
  PipelineConfig cfg = common.resolve();
  const PredictorModel model =
      load_model(model_in.empty() ? out_path(cfg, "model.bin") : model_in);
  const SubgoalGraph graph =
      read_subgoal_graph(graph_in.empty() ? out_path(cfg, "subgoals.txt") : graph_in);
  const EnvKind kind = cfg.continuous() ? EnvKind::ContinuousMaze : EnvKind::DiscreteMaze;
  const double acc = eval_accuracy(model, region_labels(graph, kind));
  std::cout << "accuracy " << acc << "\n";
  return 0;
}

int cmd_train(const Common& common, const std::string& variant_name_in,
              const std::string& graph_in, const std::string& model_in) {
  PipelineConfig cfg = common.resolve();
  const auto variant = variant_from(variant_name_in);
  if (!variant) throw ConfigError("variant", "unknown variant '" + variant_name_in + "'");
  const MazeSpec maze = resolve_maze(cfg.maze);
  const Env env = make_env(cfg, maze);

  SubgoalGraph graph;
  PredictorModel model;
  ShapingInputs shaping;
  const bool shaped = *variant == Variant::Gdcc || *variant == Variant::NoPredictor;
  if (shaped) {
    graph = read_subgoal_graph(graph_in.empty() ? out_path(cfg, "subgoals.txt") : graph_in);
    shaping.graph = &graph;
    if (*variant == Variant::Gdcc) {
      model = load_model(model_in.empty() ? out_path(cfg, "model.bin") : model_in);
      shaping.model = &model;
    }
  }

  RLConfig rl = cfg.rl();
  rl.seed = stage_seed(cfg, "train");
  const TrainResult result = train(env, rl, *variant, shaped ? &shaping : nullptr);

  const std::string tag = variant_name(*variant);
  write_qtable(out_path(cfg, "qtable_" + tag + ".txt"), result.q);
  write_curve(out_path(cfg, "curve_" + tag + ".txt"), result.curve);
  std::cout << "final success rate " << result.curve.back().success << " -> "
            << out_path(cfg, "qtable_" + tag + ".txt") << "\n";
  return 0;
}

int cmd_eval(const Common& common, const std::string& qtable_in) {
  PipelineConfig cfg = common.resolve();
  const MazeSpec maze = resolve_maze(cfg.maze);
  const Env env = make_env(cfg, maze);
  const QTable q =
      read_qtable(qtable_in.empty() ? out_path(cfg, "qtable_gdcc.txt") : qtable_in);
  const double rate =
      evaluate(env, q, cfg.eval_episodes, stage_seed(cfg, "eval"), cfg.rl());
  std::cout << "success_rate " << rate << "\n";
  return 0;
}

int cmd_ablate(const Common& common, const std::string& graph_in, const std::string& model_in) {
  PipelineConfig cfg = common.resolve();
  const MazeSpec maze = resolve_maze(cfg.maze);
  const Env env = make_env(cfg, maze);
  SubgoalGraph graph =
      read_subgoal_graph(graph_in.empty() ? out_path(cfg, "subgoals.txt") : graph_in);
  PredictorModel model = load_model(model_in.empty() ? out_path(cfg, "model.bin") : model_in);
  ShapingInputs shaping;
  shaping.graph = &graph;
  shaping.model = &model;

  AblationConfig ab;
  ab.rl = cfg.rl();
  for (int i = 0; i < cfg.ablation_seeds; ++i)
    ab.seeds.push_back(mix_seed(stage_seed(cfg, "ablate"), static_cast<uint64_t>(i)));

  const AblationResult result = run_ablation(env, ab, &shaping);
  for (const VariantRun& run : result.runs) {
    std::string name = "curve_" + std::string(variant_name(run.variant)) + "_s" +
                       std::to_string(run.seed % 1000) + ".txt";
    write_curve(out_path(cfg, name), run.curve);
  }
  const std::string summary = summary_table(result);
  std::ofstream f(out_path(cfg, "ablation_summary.txt"), std::ios::binary);
  f << summary;
  std::cout << summary;
  return 0;
}

int cmd_render(const Common& common, const std::string& kind, const std::string& in,
               const std::string& out) {
  PipelineConfig cfg = common.resolve();
  if (in.empty() || out.empty()) throw BadInput("render needs --in and --out");
  if (kind == "capacity" || kind == "potential") {
    const MazeSpec maze = resolve_maze(cfg.maze);
    render_heatmap(out, maze, read_capacity_map(in), cfg.render_scale);
  } else if (kind == "regions") {
    const MazeSpec maze = resolve_maze(cfg.maze);
    render_regions(out, maze, read_subgoal_graph(in), cfg.render_scale);
  } else if (kind == "curve") {
    const auto curve = read_curve(in);
    render_curve_svg(out, curve);
  } else {
    throw BadInput("unknown render kind '" + kind + "'");
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

// ---- verify: oracle suites over shipped fixtures ----

bool verify_bounds(std::string& log) {
  const auto t0 = std::chrono::steady_clock::now();
  long checks = 0;
  std::vector<std::string> violations;
  for (int i = 0; i < 100; ++i) {
    const int n_states = 2 + i % 19;
    const int n_actions = 2 + i % 4;
    const int branching = 1 + i % 3;
    const TabularMDP mdp =
        random_tabular(n_states, n_actions, branching, 1000 + static_cast<uint64_t>(i));
    const BoundReport rep = check_propositions(mdp);
    checks += rep.checks;
    for (const auto& v : rep.violations) violations.push_back(v);
  }
  for (double noise : {0.0, 0.2}) {
    const TabularMDP mdp = build_tabular(parse_maze(fixtures::demo_maze_text()), noise);
    const BoundReport rep = check_propositions(mdp);
    checks += rep.checks;
    for (const auto& v : rep.violations) violations.push_back(v);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log += "bounds: " + std::to_string(checks) + " (s,a) checks, " +
         std::to_string(violations.size()) + " violations, " + fmt_double(secs) + "s\n";
  return violations.empty();
}

bool verify_shaping(std::string& log) {
  int bad = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const MazeSpec maze = fixtures::random_maze(7, 7, 0.25, 7000 + seed);
    const TabularMDP mdp = build_tabular(maze, 0.0);
    const auto cells = maze.free_cells();
    const GridPos goal = cells[cells.size() / 2];
    const auto index = state_index_map(mdp);
    const int goal_state = index.at(key_from_cell(goal).packed());
    const TabularMDP task = with_absorbing_state(mdp, goal_state);
    const RewardFn base = [goal_state](int, int, int s2) {
      return s2 == goal_state ? 1.0 : 0.0;
    };

    // random potential over the free cells
    Rng rng(mix_seed(seed, 99));
    PotentialField field;
    for (const GridPos& c : cells) {
      field.phi[{c.col, c.row}] = rng.next_double() * 3.0;
      field.region_id[{c.col, c.row}] = 0;
    }
    const InvarianceReport rep = verify_invariance(task, base, field, 0.99, 1e-9);
    if (!rep.ok()) ++bad;

    // negative control: a non-potential bonus must be flagged
    const RewardFn biased = [&](int s, int a, int s2) {
      return base(s, a, s2) + (a == static_cast<int>(Move::Right) ? 0.1 : 0.0);
    };
    const InvarianceReport control = compare_greedy_sets(task, base, biased, 0.99, 1e-9);
    if (control.ok()) ++bad;  // the control is supposed to mismatch
  }
  log += "shaping invariance: 10 fuzzed mazes + negative controls, " + std::to_string(bad) +
         " failures\n";
  return bad == 0;
}

bool verify_gradients(std::string& log) {
  PredictorModel m = init_model(2, 6, 8, 2, 42);
  m.norm = {0.0, 8.0, 0.0, 8.0};
  m.subgoal_ids = {0, 1, 2};
  m.subgoal_anchors = {{1.5, 1.5}, {6.5, 1.5}, {4.0, 6.0}};
  m.refresh_subgoal_embeddings();

  const std::vector<Vec2> batch = {{1.0, 2.0}, {3.5, 4.0}, {6.0, 1.0}, {2.2, 6.6}};
  const double e_pre = gradcheck_pretrain(m, batch, {1.0, 1.0});

  const std::vector<Vec2> segment = {{1.0, 1.0}, {1.6, 1.4}, {2.4, 1.8}, {3.0, 2.2}};
  const double e_ach = gradcheck_predictor(m, segment, 2, m.subgoal_embeddings[0]);
  const Vec2 last = m.norm.apply(segment.back());
  const double in[2] = {last.x, last.y};
  const auto self_target = m.predictor.forward(std::span<const double>(in, 2));
  const double e_self =
      gradcheck_predictor(m, segment, static_cast<int>(segment.size()), self_target);

  log += "gradients: pretrain " + fmt_double(e_pre) + ", achieved-branch " + fmt_double(e_ach) +
         ", self-target branch " + fmt_double(e_self) + " (tol 1e-4)\n";
  return e_pre < 1e-4 && e_ach < 1e-4 && e_self < 1e-4;
}

int cmd_verify() {
  std::string log;
  bool ok = true;
  ok &= verify_bounds(log);
  ok &= verify_shaping(log);
  ok &= verify_gradients(log);
  std::cout << log << (ok ? "verify: OK" : "verify: FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  const std::string command = argv[1];

  CLI::App app{"causal-capacity goal discovery pipeline"};
  Common common;
  common.attach(&app);

  std::string in, estimator = "mc", capacity_in, traj_in, graph_in, model_in, qtable_in;
  std::string variant = "gdcc", kind = "capacity", render_out;
  int episodes_override = -1, frontier_override = -1;

  try {
    if (command == "sample") {
      app.add_option("--episodes", episodes_override, "episode count override");
      app.add_option("--frontier", frontier_override, "frontier episode count");
      app.parse(argc - 1, argv + 1);
      return cmd_sample(common, episodes_override, frontier_override);
    }
    if (command == "capacity") {
      app.add_option("--in", in, "trajectory log");
      app.add_option("--estimator", estimator, "mc | clustered");
      app.parse(argc - 1, argv + 1);
      return cmd_capacity(common, in, estimator);
    }
    if (command == "subgoals") {
      app.add_option("--capacity", capacity_in, "capacity map file");
      app.add_option("--traj", traj_in, "trajectory log");
      app.parse(argc - 1, argv + 1);
      return cmd_subgoals(common, capacity_in, traj_in);
    }
    if (command == "train-predictor") {
      app.add_option("--traj", traj_in, "trajectory log");
      app.add_option("--graph", graph_in, "subgoal graph file");
      app.parse(argc - 1, argv + 1);
      return cmd_train_predictor(common, traj_in, graph_in);
    }
    if (command == "eval-predictor") {
      app.add_option("--model", model_in, "model checkpoint");
      app.add_option("--graph", graph_in, "subgoal graph file");
      app.parse(argc - 1, argv + 1);
      return cmd_eval_predictor(common, model_in, graph_in);
    }
    if (command == "train") {
      app.add_option("--variant", variant, "gdcc | no_predictor | no_reward | sparse");
      app.add_option("--graph", graph_in, "subgoal graph file");
      app.add_option("--model", model_in, "model checkpoint");
      app.parse(argc - 1, argv + 1);
      return cmd_train(common, variant, graph_in, model_in);
    }
    if (command == "eval") {
      app.add_option("--qtable", qtable_in, "q-table file");
      app.parse(argc - 1, argv + 1);
      return cmd_eval(common, qtable_in);
    }
    if (command == "ablate") {
      app.add_option("--graph", graph_in, "subgoal graph file");
      app.add_option("--model", model_in, "model checkpoint");
      app.parse(argc - 1, argv + 1);
      return cmd_ablate(common, graph_in, model_in);
    }
    if (command == "render") {
      app.add_option("--kind", kind, "capacity | potential | regions | curve");
      app.add_option("--in", in, "input file");
      app.add_option("--render-out", render_out, "output image file")->required();
      app.parse(argc - 1, argv + 1);
      return cmd_render(common, kind, in, render_out);
    }
    if (command == "verify") {
      app.parse(argc - 1, argv + 1);
      return cmd_verify();
    }
    std::cerr << "unknown command '" << command << "'\n" << kUsage;
    return 2;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const UnknownKey& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ccap
