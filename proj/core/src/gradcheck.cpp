#include "ccap/gradcheck.hpp"

#include <cmath>

namespace ccap {

namespace {

double rel_error(double fd, double an) {
  const double denom = std::max(1e-6, std::abs(fd) + std::abs(an));
  return std::abs(fd - an) / denom;
}

}  // namespace

double gradcheck_pretrain(PredictorModel& m, std::span<const Vec2> batch, const LossWeights& w,
                          double h) {
  std::vector<double> grad_enc, grad_dec;
  pretrain_objective(m, batch, w, &grad_enc, &grad_dec);

  double worst = 0.0;
  auto sweep = [&](std::vector<double>& params, const std::vector<double>& grad) {
    for (size_t i = 0; i < params.size(); ++i) {
      const double orig = params[i];
      params[i] = orig + h;
      const double up = pretrain_objective(m, batch, w, nullptr, nullptr);
      params[i] = orig - h;
      const double down = pretrain_objective(m, batch, w, nullptr, nullptr);
      params[i] = orig;
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, rel_error(fd, grad[i]));
    }
  };
  sweep(m.encoder.params(), grad_enc);
  sweep(m.decoder.params(), grad_dec);
  return worst;
}

double gradcheck_predictor(PredictorModel& m, std::span<const Vec2> segment, int count,
                           std::span<const double> target, double h) {
  std::vector<double> grad;
  predictor_objective(m, segment, count, target, &grad);

  double worst = 0.0;
  std::vector<double>& params = m.predictor.params();
  for (size_t i = 0; i < params.size(); ++i) {
    const double orig = params[i];
    params[i] = orig + h;
    const double up = predictor_objective(m, segment, count, target, nullptr);
    params[i] = orig - h;
    const double down = predictor_objective(m, segment, count, target, nullptr);
    params[i] = orig;
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, rel_error(fd, grad[i]));
  }
  return worst;
}

}  // namespace ccap
