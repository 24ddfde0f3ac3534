#include "ccap/predictor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ccap/errors.hpp"
#include "ccap/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "model checkpoints assume a little-endian host");

namespace ccap {

Mlp::Mlp(std::vector<int> dims, uint64_t seed) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw BadDims("Mlp needs at least input and output dims");
  for (int d : dims_)
    if (d < 1) throw BadDims("Mlp dims must be >= 1");

  size_t total = 0;
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    w_off_.push_back(total);
    total += static_cast<size_t>(dims_[l + 1]) * dims_[l];
    b_off_.push_back(total);
    total += static_cast<size_t>(dims_[l + 1]);
  }
  params_.resize(total);

  Rng rng(seed);
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    const size_t count = static_cast<size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
    for (size_t i = 0; i < count; ++i)
      params_[w_off_[l] + i] = rng.uniform(-limit, limit);
  }
}

std::vector<double> Mlp::forward(std::span<const double> x, Cache* cache) const {
  if (static_cast<int>(x.size()) != in_dim()) throw BadDims("Mlp::forward: input size mismatch");
  std::vector<double> a(x.begin(), x.end());
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(a);
  }
  const size_t n_layers = dims_.size() - 1;
  for (size_t l = 0; l < n_layers; ++l) {
    const int in = dims_[l];
    const int out = dims_[l + 1];
    const double* w = params_.data() + w_off_[l];
    const double* b = params_.data() + b_off_[l];
    std::vector<double> z(static_cast<size_t>(out));
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * a[static_cast<size_t>(i)];
      z[static_cast<size_t>(o)] = acc;
    }
    if (l + 1 < n_layers)
      for (double& v : z)
        if (v < 0.0) v = 0.0;
    a = std::move(z);
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

void Mlp::backward(const Cache& cache, std::span<const double> grad_out,
                   std::vector<double>& grad, std::vector<double>* grad_in) const {
  const size_t n_layers = dims_.size() - 1;
  if (grad.size() != params_.size()) grad.resize(params_.size(), 0.0);
  std::vector<double> delta(grad_out.begin(), grad_out.end());

  for (size_t l = n_layers; l-- > 0;) {
    const int in = dims_[l];
    const int out = dims_[l + 1];
    const double* w = params_.data() + w_off_[l];
    const std::vector<double>& input = cache.acts[l];
    double* gw = grad.data() + w_off_[l];
    double* gb = grad.data() + b_off_[l];

    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<size_t>(o)];
      if (d == 0.0) continue;
      double* grow = gw + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) grow[i] += d * input[static_cast<size_t>(i)];
      gb[o] += d;
    }

    if (l == 0 && grad_in == nullptr) break;
    std::vector<double> prev(static_cast<size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<size_t>(o)];
      if (d == 0.0) continue;
      const double* row = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) prev[static_cast<size_t>(i)] += d * row[i];
    }
    if (l > 0) {
      // rectifier derivative of the previous layer's output
      const std::vector<double>& act = cache.acts[l];
      for (int i = 0; i < in; ++i)
        if (act[static_cast<size_t>(i)] <= 0.0) prev[static_cast<size_t>(i)] = 0.0;
    }
    if (l == 0) {
      *grad_in = std::move(prev);
      break;
    }
    delta = std::move(prev);
  }
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  const double denom = std::sqrt(nu) * std::sqrt(nv);
  if (denom < 1e-12) return 0.0;
  return dot / denom;
}

void cosine_grad_u(std::span<const double> u, std::span<const double> v, double weight,
                   std::span<double> out) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  const double un = std::sqrt(nu), vn = std::sqrt(nv);
  if (un * vn < 1e-12) return;
  const double inv = 1.0 / (un * vn);
  const double c = dot * inv;
  for (size_t i = 0; i < u.size(); ++i)
    out[i] += weight * (v[i] * inv - c * u[i] / nu);
}

void PredictorModel::set_subgoals(const SubgoalSet& set, EnvKind kind) {
  subgoal_ids.clear();
  subgoal_anchors.clear();
  for (const Subgoal& g : set.goals) {
    subgoal_ids.push_back(g.id);
    subgoal_anchors.push_back(state_position(g.anchor, kind));
  }
  if (!set.goals.empty()) achievement_radius = set.goals[0].radius;
  refresh_subgoal_embeddings();
}

void PredictorModel::refresh_subgoal_embeddings() {
  subgoal_embeddings.clear();
  subgoal_embeddings.reserve(subgoal_anchors.size());
  for (const Vec2& a : subgoal_anchors) {
    const Vec2 n = norm.apply(a);
    const double in[2] = {n.x, n.y};
    subgoal_embeddings.push_back(encoder.forward(std::span<const double>(in, 2)));
  }
}

PredictorModel init_model(int state_dim, int embed_dim, int hidden, int layers, uint64_t seed) {
  if (state_dim < 1 || embed_dim < 1 || hidden < 1 || layers < 1)
    throw BadDims("init_model: all dims must be >= 1");
  PredictorModel m;
  m.state_dim = state_dim;
  m.embed_dim = embed_dim;

  std::vector<int> enc{state_dim};
  for (int l = 0; l < layers; ++l) enc.push_back(hidden);
  enc.push_back(embed_dim);
  std::vector<int> dec{embed_dim};
  for (int l = 0; l < layers; ++l) dec.push_back(hidden);
  dec.push_back(state_dim);

  m.encoder = Mlp(enc, mix_seed(seed, 1));
  m.decoder = Mlp(dec, mix_seed(seed, 2));
  m.predictor = Mlp(enc, mix_seed(seed, 3));
  return m;
}

double pretrain_objective(const PredictorModel& m, std::span<const Vec2> batch,
                          const LossWeights& w, std::vector<double>* grad_encoder,
                          std::vector<double>* grad_decoder) {
  if (grad_encoder) grad_encoder->assign(m.encoder.params().size(), 0.0);
  if (grad_decoder) grad_decoder->assign(m.decoder.params().size(), 0.0);

  double recon = 0.0;
  const size_t n = batch.size();
  for (const Vec2& s : batch) {
    const Vec2 sn = m.norm.apply(s);
    const double in[2] = {sn.x, sn.y};
    Mlp::Cache enc_cache, dec_cache;
    const auto z = m.encoder.forward(std::span<const double>(in, 2), grad_encoder ? &enc_cache : nullptr);
    const auto r = m.decoder.forward(z, grad_decoder ? &dec_cache : nullptr);
    double err2 = 0.0;
    std::vector<double> dr(r.size());
    for (size_t i = 0; i < r.size(); ++i) {
      const double e = r[i] - (i == 0 ? sn.x : sn.y);
      err2 += e * e;
      dr[i] = 2.0 * e * w.lambda_theta / static_cast<double>(n);
    }
    recon += err2;
    if (grad_decoder) {
      std::vector<double> dz;
      m.decoder.backward(dec_cache, dr, *grad_decoder, grad_encoder ? &dz : nullptr);
      if (grad_encoder) m.encoder.backward(enc_cache, dz, *grad_encoder);
    }
  }
  recon /= n == 0 ? 1.0 : static_cast<double>(n);

  // pairwise subgoal similarity in latent space
  double pair_mean = 0.0;
  const size_t k = m.subgoal_anchors.size();
  if (k >= 2) {
    std::vector<Mlp::Cache> caches(k);
    std::vector<std::vector<double>> zs(k);
    for (size_t i = 0; i < k; ++i) {
      const Vec2 a = m.norm.apply(m.subgoal_anchors[i]);
      const double in[2] = {a.x, a.y};
      zs[i] = m.encoder.forward(std::span<const double>(in, 2),
                                grad_encoder ? &caches[i] : nullptr);
    }
    const double npairs = static_cast<double>(k * (k - 1) / 2);
    std::vector<std::vector<double>> dzs(k, std::vector<double>(zs[0].size(), 0.0));
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = i + 1; j < k; ++j) {
        pair_mean += cosine_similarity(zs[i], zs[j]);
        if (grad_encoder) {
          const double weight = w.lambda_phi / npairs;
          cosine_grad_u(zs[i], zs[j], weight, dzs[i]);
          cosine_grad_u(zs[j], zs[i], weight, dzs[j]);
        }
      }
    }
    pair_mean /= npairs;
    if (grad_encoder)
      for (size_t i = 0; i < k; ++i) m.encoder.backward(caches[i], dzs[i], *grad_encoder);
  }

  return w.lambda_theta * recon + w.lambda_phi * pair_mean;
}

double predictor_objective(const PredictorModel& m, std::span<const Vec2> segment, int count,
                           std::span<const double> target, std::vector<double>* grad_predictor) {
  if (grad_predictor) grad_predictor->assign(m.predictor.params().size(), 0.0);
  if (count <= 0 || count > static_cast<int>(segment.size()))
    throw BadDims("predictor_objective: bad count");

  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  for (int i = 0; i < count; ++i) {
    const Vec2 sn = m.norm.apply(segment[static_cast<size_t>(i)]);
    const double in[2] = {sn.x, sn.y};
    Mlp::Cache cache;
    const auto u =
        m.predictor.forward(std::span<const double>(in, 2), grad_predictor ? &cache : nullptr);
    loss -= inv * cosine_similarity(u, target);
    if (grad_predictor) {
      std::vector<double> du(u.size(), 0.0);
      cosine_grad_u(u, target, -inv, du);
      m.predictor.backward(cache, du, *grad_predictor);
    }
  }
  return loss;
}

namespace {

void sgd_step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
  for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

}  // namespace

PretrainCurves pretrain_encoder(PredictorModel& m, std::span<const Vec2> states,
                                const LossWeights& w, int steps, double lr, int batch,
                                uint64_t seed) {
  if (m.subgoal_anchors.size() < 2)
    throw TooFewSubgoals("pretraining needs at least 2 subgoals for the pairwise term");
  if (states.empty()) throw EmptyData("pretrain_encoder: no states");
  if (w.lambda_theta < 0.0 || w.lambda_phi < 0.0 || (w.lambda_theta == 0.0 && w.lambda_phi == 0.0))
    throw ConfigError("lambda", "loss weights must be nonnegative and not both zero");

  PretrainCurves curves;
  curves.reconstruction.reserve(static_cast<size_t>(steps));
  curves.subgoal_similarity.reserve(static_cast<size_t>(steps));

  Rng rng(seed);
  std::vector<Vec2> minibatch;
  std::vector<double> grad_enc, grad_dec;
  const int bsz = std::min<int>(batch, static_cast<int>(states.size()));

  for (int step = 0; step < steps; ++step) {
    minibatch.clear();
    for (int i = 0; i < bsz; ++i)
      minibatch.push_back(states[static_cast<size_t>(rng.next_int(static_cast<int>(states.size())))]);

    pretrain_objective(m, minibatch, w, &grad_enc, &grad_dec);
    sgd_step(m.encoder.params(), grad_enc, lr);
    sgd_step(m.decoder.params(), grad_dec, lr);
    m.refresh_subgoal_embeddings();

    // report raw reconstruction error and raw mean pairwise similarity
    double recon = 0.0;
    for (const Vec2& s : minibatch) {
      const Vec2 sn = m.norm.apply(s);
      const double in[2] = {sn.x, sn.y};
      const auto r = m.decoder.forward(m.encoder.forward(std::span<const double>(in, 2)));
      const double ex = r[0] - sn.x, ey = r[1] - sn.y;
      recon += ex * ex + ey * ey;
    }
    recon /= static_cast<double>(minibatch.size());
    double sim = 0.0;
    const size_t k = m.subgoal_embeddings.size();
    for (size_t i = 0; i < k; ++i)
      for (size_t j = i + 1; j < k; ++j)
        sim += cosine_similarity(m.subgoal_embeddings[i], m.subgoal_embeddings[j]);
    sim /= static_cast<double>(k * (k - 1) / 2);
    curves.reconstruction.push_back(recon);
    curves.subgoal_similarity.push_back(sim);
  }
  m.pretrained = true;
  return curves;
}

PredictorCurve train_predictor(PredictorModel& m, const TrajectorySet& trajs, int segment_len,
                               int steps, double lr, uint64_t seed) {
  if (!m.pretrained) throw Untrained("train_predictor requires a pretrained encoder");
  if (m.subgoal_anchors.empty()) throw Untrained("train_predictor requires a subgoal table");

  // Valid segments: (episode offset, start) pairs over episodes of length
  // >= segment_len.
  struct Segment {
    size_t begin;
  };
  std::vector<Segment> segments;
  const auto& trs = trajs.transitions;
  size_t ep_begin = 0;
  while (ep_begin < trs.size()) {
    size_t ep_end = ep_begin;
    while (ep_end < trs.size() && trs[ep_end].episode == trs[ep_begin].episode) ++ep_end;
    const size_t len = ep_end - ep_begin;
    if (len >= static_cast<size_t>(segment_len))
      for (size_t s = 0; s + static_cast<size_t>(segment_len) <= len; ++s)
        segments.push_back({ep_begin + s});
    ep_begin = ep_end;
  }
  if (segments.empty())
    throw NoSegments("all episodes are shorter than the segment length " +
                     std::to_string(segment_len));

  PredictorCurve curve;
  curve.loss.reserve(static_cast<size_t>(steps));
  Rng rng(seed);
  std::vector<Vec2> positions(static_cast<size_t>(segment_len));
  std::vector<double> grad;

  for (int step = 0; step < steps; ++step) {
    const Segment seg = segments[static_cast<size_t>(rng.next_int(static_cast<int>(segments.size())))];
    for (int i = 0; i < segment_len; ++i)
      positions[static_cast<size_t>(i)] =
          state_position(trs[seg.begin + static_cast<size_t>(i)].state, trajs.kind);

    // first state achieving any subgoal
    int m_idx = -1, subgoal_idx = -1;
    for (int i = 0; i < segment_len && m_idx < 0; ++i) {
      double best_d = m.achievement_radius;
      for (size_t g = 0; g < m.subgoal_anchors.size(); ++g) {
        const double d = distance(positions[static_cast<size_t>(i)], m.subgoal_anchors[g]);
        if (d < best_d) {
          best_d = d;
          m_idx = i;
          subgoal_idx = static_cast<int>(g);
        }
      }
    }

    double loss;
    if (m_idx >= 0) {
      loss = predictor_objective(m, positions, m_idx + 1, m.subgoal_embeddings[static_cast<size_t>(subgoal_idx)],
                                 &grad);
    } else {
      const Vec2 last = m.norm.apply(positions.back());
      const double in[2] = {last.x, last.y};
      const auto target = m.predictor.forward(std::span<const double>(in, 2));
      loss = predictor_objective(m, positions, segment_len, target, &grad);
    }
    sgd_step(m.predictor.params(), grad, lr);
    curve.loss.push_back(loss);
  }
  m.predictor_trained = true;
  return curve;
}

int predict_subgoal(const PredictorModel& m, Vec2 state_pos) {
  if (!m.predictor_trained) throw Untrained("predictor has not been trained");
  if (m.subgoal_embeddings.empty()) throw Untrained("subgoal table is empty");
  const Vec2 sn = m.norm.apply(state_pos);
  const double in[2] = {sn.x, sn.y};
  const auto u = m.predictor.forward(std::span<const double>(in, 2));
  int best = m.subgoal_ids[0];
  double best_sim = -2.0;
  for (size_t g = 0; g < m.subgoal_embeddings.size(); ++g) {
    const double sim = cosine_similarity(u, m.subgoal_embeddings[g]);
    if (sim > best_sim) {  // strict >: earlier (lower) ids win ties
      best_sim = sim;
      best = m.subgoal_ids[g];
    }
  }
  return best;
}

double eval_accuracy(const PredictorModel& m,
                     std::span<const std::pair<Vec2, int>> labeled_states) {
  if (labeled_states.empty()) throw EmptyLabels("eval_accuracy: no labeled states");
  long hits = 0;
  for (const auto& [pos, label] : labeled_states)
    if (predict_subgoal(m, pos) == label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(labeled_states.size());
}

namespace {

constexpr char kMagic[8] = {'C', 'C', 'A', 'P', 'P', 'M', '0', '1'};

void write_raw(std::ofstream& f, const void* data, size_t bytes) {
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& f, void* data, size_t bytes, const std::string& path) {
  f.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!f) throw IoError("truncated model checkpoint: " + path);
}

void write_i32(std::ofstream& f, int32_t v) { write_raw(f, &v, sizeof v); }
int32_t read_i32(std::ifstream& f, const std::string& path) {
  int32_t v = 0;
  read_raw(f, &v, sizeof v, path);
  return v;
}
void write_f64(std::ofstream& f, double v) { write_raw(f, &v, sizeof v); }
double read_f64(std::ifstream& f, const std::string& path) {
  double v = 0;
  read_raw(f, &v, sizeof v, path);
  return v;
}

void write_net(std::ofstream& f, const Mlp& net) {
  write_i32(f, static_cast<int32_t>(net.dims().size()));
  for (int d : net.dims()) write_i32(f, d);
  const uint64_t n = net.params().size();
  write_raw(f, &n, sizeof n);
  write_raw(f, net.params().data(), n * sizeof(double));
}

Mlp read_net(std::ifstream& f, const std::string& path) {
  const int32_t nd = read_i32(f, path);
  if (nd < 2 || nd > 64) throw IoError("corrupt model checkpoint: " + path);
  std::vector<int> dims(static_cast<size_t>(nd));
  for (int32_t i = 0; i < nd; ++i) dims[static_cast<size_t>(i)] = read_i32(f, path);
  Mlp net(dims, 0);
  uint64_t n = 0;
  read_raw(f, &n, sizeof n, path);
  if (n != net.params().size()) throw IoError("corrupt model checkpoint: " + path);
  read_raw(f, net.params().data(), n * sizeof(double), path);
  return net;
}

}  // namespace

void save_model(const std::string& path, const PredictorModel& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_raw(f, kMagic, sizeof kMagic);
  write_i32(f, m.state_dim);
  write_i32(f, m.embed_dim);
  const uint8_t flags =
      static_cast<uint8_t>((m.pretrained ? 1 : 0) | (m.predictor_trained ? 2 : 0));
  write_raw(f, &flags, 1);
  write_f64(f, m.norm.x_lo);
  write_f64(f, m.norm.x_hi);
  write_f64(f, m.norm.y_lo);
  write_f64(f, m.norm.y_hi);
  write_f64(f, m.achievement_radius);
  write_i32(f, static_cast<int32_t>(m.subgoal_ids.size()));
  for (size_t i = 0; i < m.subgoal_ids.size(); ++i) {
    write_i32(f, m.subgoal_ids[i]);
    write_f64(f, m.subgoal_anchors[i].x);
    write_f64(f, m.subgoal_anchors[i].y);
  }
  write_net(f, m.encoder);
  write_net(f, m.decoder);
  write_net(f, m.predictor);
  if (!f) throw IoError("write failed: " + path);
}

PredictorModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  char magic[8];
  read_raw(f, magic, sizeof magic, path);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw IoError("not a model checkpoint: " + path);
  PredictorModel m;
  m.state_dim = read_i32(f, path);
  m.embed_dim = read_i32(f, path);
  uint8_t flags = 0;
  read_raw(f, &flags, 1, path);
  m.pretrained = (flags & 1) != 0;
  m.predictor_trained = (flags & 2) != 0;
  m.norm.x_lo = read_f64(f, path);
  m.norm.x_hi = read_f64(f, path);
  m.norm.y_lo = read_f64(f, path);
  m.norm.y_hi = read_f64(f, path);
  m.achievement_radius = read_f64(f, path);
  const int32_t k = read_i32(f, path);
  if (k < 0 || k > 1 << 20) throw IoError("corrupt model checkpoint: " + path);
  for (int32_t i = 0; i < k; ++i) {
    m.subgoal_ids.push_back(read_i32(f, path));
    Vec2 a;
    a.x = read_f64(f, path);
    a.y = read_f64(f, path);
    m.subgoal_anchors.push_back(a);
  }
  m.encoder = read_net(f, path);
  m.decoder = read_net(f, path);
  m.predictor = read_net(f, path);
  m.refresh_subgoal_embeddings();
  return m;
}

}  // namespace ccap
