#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccap/maze.hpp"
#include "ccap/subgoals.hpp"
#include "ccap/trajectory.hpp"

namespace ccap {

/// Dense feedforward net with rectifier hidden layers and a linear output,
/// parameters in one contiguous block (per layer: row-major weights, then
/// biases) so plain-SGD updates and finite-difference checks stay simple.
class Mlp {
 public:
  Mlp() = default;
  /// dims = {input, hidden..., output}; fan-in scaled uniform init.
  Mlp(std::vector<int> dims, uint64_t seed);

  int in_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int out_dim() const { return dims_.empty() ? 0 : dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  struct Cache {
    std::vector<std::vector<double>> acts;  // acts[0] = input, then post-activation per layer
  };

  std::vector<double> forward(std::span<const double> x, Cache* cache = nullptr) const;

  /// Accumulates dLoss/dparams into grad (same layout as params); optional
  /// dLoss/dinput. cache must come from a forward of the same input.
  void backward(const Cache& cache, std::span<const double> grad_out, std::vector<double>& grad,
                std::vector<double>* grad_in = nullptr) const;

 private:
  std::vector<int> dims_;
  std::vector<double> params_;
  std::vector<size_t> w_off_, b_off_;
};

double cosine_similarity(std::span<const double> u, std::span<const double> v);
/// d cos(u,v) / du, accumulated into out (scaled by weight).
void cosine_grad_u(std::span<const double> u, std::span<const double> v, double weight,
                   std::span<double> out);

/// Affine map from maze coordinates into [-1,1] per dimension.
struct StateNormalizer {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  Vec2 apply(Vec2 p) const {
    return {2.0 * (p.x - x_lo) / (x_hi - x_lo) - 1.0, 2.0 * (p.y - y_lo) / (y_hi - y_lo) - 1.0};
  }
  static StateNormalizer for_maze(const MazeSpec& m) {
    return {0.0, static_cast<double>(m.width), 0.0, static_cast<double>(m.height)};
  }
};

struct LossWeights {
  double lambda_theta = 1.0;
  double lambda_phi = 1.0;
};

/// Encoder/decoder/predictor triple plus the subgoal embedding table
/// (encoder outputs of the anchors, refreshed after every pretraining
/// step). Anchors live in maze units; all nets see normalized inputs.
struct PredictorModel {
  Mlp encoder;    // state -> embedding
  Mlp decoder;    // embedding -> state
  Mlp predictor;  // state -> embedding
  int state_dim = 2;
  int embed_dim = 64;
  StateNormalizer norm;
  std::vector<int> subgoal_ids;
  std::vector<Vec2> subgoal_anchors;                    // maze units
  double achievement_radius = 0.7;                      // tau_nei
  std::vector<std::vector<double>> subgoal_embeddings;  // parallel to subgoal_ids
  bool pretrained = false;
  bool predictor_trained = false;

  void set_subgoals(const SubgoalSet& set, EnvKind kind);
  void refresh_subgoal_embeddings();
};

/// Fresh model with `layers` hidden layers of `hidden` units in each of the
/// three nets; deterministic given the seed.
PredictorModel init_model(int state_dim, int embed_dim = 64, int hidden = 256, int layers = 3,
                          uint64_t seed = 0);

/// Joint encoder/decoder objective on a batch of maze-unit positions:
///   lambda_theta * mean squared reconstruction error
/// + lambda_phi   * mean pairwise cosine similarity of subgoal embeddings.
/// Gradients (when requested) land in encoder/decoder parameter layout.
double pretrain_objective(const PredictorModel& m, std::span<const Vec2> batch,
                          const LossWeights& w, std::vector<double>* grad_encoder,
                          std::vector<double>* grad_decoder);

/// Predictor objective on one segment of maze-unit positions: the negative
/// mean cosine similarity between the predictor outputs of the first
/// `count` states and a fixed embedding target (a subgoal embedding, or the
/// detached prediction of the segment's last state).
double predictor_objective(const PredictorModel& m, std::span<const Vec2> segment, int count,
                           std::span<const double> target, std::vector<double>* grad_predictor);

struct PretrainCurves {
  std::vector<double> reconstruction;  // per step
  std::vector<double> subgoal_similarity;
};

/// Plain SGD on encoder and decoder jointly. States are raw positions in
/// maze units; they are normalized internally. Requires >= 2 subgoals.
PretrainCurves pretrain_encoder(PredictorModel& m, std::span<const Vec2> states,
                                const LossWeights& w, int steps = 10000, double lr = 1e-3,
                                int batch = 1000, uint64_t seed = 0);

struct PredictorCurve {
  std::vector<double> loss;  // per step
};

/// Trajectory-supervised predictor training: random segments of length
/// segment_len; states up to the first achievement train toward that
/// subgoal's embedding, otherwise toward the detached prediction of the
/// segment's last state. Encoder and decoder stay frozen.
PredictorCurve train_predictor(PredictorModel& m, const TrajectorySet& trajs,
                               int segment_len = 50, int steps = 10000, double lr = 1e-3,
                               uint64_t seed = 0);

/// Subgoal whose embedding is most cosine-similar to the predictor output;
/// ties break toward the lowest id.
int predict_subgoal(const PredictorModel& m, Vec2 state_position);

/// Fraction of states whose predicted subgoal matches the given label.
double eval_accuracy(const PredictorModel& m,
                     std::span<const std::pair<Vec2, int>> labeled_states);

/// Versioned binary checkpoint (magic, dims, little-endian f64 blocks).
void save_model(const std::string& path, const PredictorModel& m);
PredictorModel load_model(const std::string& path);

/// Maze-unit position of a logged state (cell center for grid records).
inline Vec2 state_position(Vec2 state, EnvKind kind) {
  if (kind == EnvKind::ContinuousMaze) return state;
  return {state.x + 0.5, state.y + 0.5};
}

}  // namespace ccap
