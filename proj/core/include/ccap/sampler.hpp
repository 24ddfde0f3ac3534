#pragma once

#include "ccap/env.hpp"
#include "ccap/trajectory.hpp"

namespace ccap {

/// Random-policy data collection: each episode resets to a uniformly random
/// free start and draws actions uniformly (over the move set, or over the
/// step ball for continuous envs). Episodes own derived rng streams keyed
/// by episode index, so the result is identical however episodes are
/// scheduled across workers.
TrajectorySet rollout_random(const Env& env, int episodes, int horizon, uint64_t seed);

/// Coverage-completion pass: restarts episodes from the least-visited
/// already-visited states (the bottom 10% by count, ties included) and then
/// acts randomly. The returned set is tagged "frontier".
TrajectorySet frontier_resample(const Env& env, const VisitCounts& counts, int episodes,
                                int horizon, uint64_t seed);

}  // namespace ccap
