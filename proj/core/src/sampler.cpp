#include "ccap/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "ccap/errors.hpp"

namespace ccap {

namespace {

void run_episode(const Env& env, Vec2 start, int episode, int horizon, Rng& rng,
                 std::vector<Transition>& out) {
  Vec2 s = start;
  for (int t = 0; t < horizon; ++t) {
    Transition tr = env.step(s, env.random_action(rng), rng);
    tr.episode = episode;
    tr.t = t;
    out.push_back(tr);
    if (tr.done) break;
    s = tr.next_state;
  }
}

}  // namespace

TrajectorySet rollout_random(const Env& env, int episodes, int horizon, uint64_t seed) {
  TrajectorySet set;
  set.episodes = episodes;
  set.seed = seed;
  set.policy = "random";
  set.env = env.tag();
  set.kind = env.kind();
  set.transitions.reserve(static_cast<size_t>(episodes) * horizon);

  for (int ep = 0; ep < episodes; ++ep) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(ep)));
    run_episode(env, env.random_start(rng), ep, horizon, rng, set.transitions);
  }
  return set;
}

TrajectorySet frontier_resample(const Env& env, const VisitCounts& counts, int episodes,
                                int horizon, uint64_t seed) {
  if (counts.counts.empty()) throw EmptyCounts("frontier_resample needs nonempty visit counts");

  // Bottom decile by count; every key tied with the cutoff count joins the
  // pool, so equal counts degrade to a uniform restart over visited states.
  std::vector<std::pair<long, StateKey>> by_count;
  by_count.reserve(counts.counts.size());
  for (const auto& [key, n] : counts.counts) by_count.emplace_back(n, key);
  std::sort(by_count.begin(), by_count.end());
  const size_t decile =
      std::max<size_t>(1, static_cast<size_t>(std::ceil(0.10 * by_count.size())));
  const long cutoff = by_count[decile - 1].first;

  std::vector<Vec2> pool;
  for (const auto& [n, key] : by_count) {
    if (n > cutoff) break;
    Vec2 pos = env.key_position(key);
    if (env.kind() == EnvKind::ContinuousMaze && !position_free(env.maze(), pos))
      continue;  // bin center straddles a wall; skip
    pool.push_back(pos);
  }
  if (pool.empty()) throw EmptyCounts("no usable restart states");

  TrajectorySet set;
  set.episodes = episodes;
  set.seed = seed;
  set.policy = "frontier";
  set.env = env.tag();
  set.kind = env.kind();
  set.transitions.reserve(static_cast<size_t>(episodes) * horizon);

  for (int ep = 0; ep < episodes; ++ep) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(ep)));
    const Vec2 start = pool[static_cast<size_t>(rng.next_int(static_cast<int>(pool.size())))];
    run_episode(env, start, ep, horizon, rng, set.transitions);
  }
  return set;
}

}  // namespace ccap
