#pragma once

#include <span>
#include <vector>

#include "ccap/predictor.hpp"

namespace ccap {

/// Central finite differences against the analytic gradients. Returns the
/// worst relative error |g_fd - g_an| / max(eps, |g_fd| + |g_an|) over all
/// parameters of the nets the objective touches.

double gradcheck_pretrain(PredictorModel& m, std::span<const Vec2> batch, const LossWeights& w,
                          double h = 1e-6);

double gradcheck_predictor(PredictorModel& m, std::span<const Vec2> segment, int count,
                           std::span<const double> target, double h = 1e-6);

}  // namespace ccap
