#include "ccap/tabular.hpp"

#include <algorithm>
#include <cmath>

#include "ccap/errors.hpp"

namespace ccap {

bool TabularMDP::stochastic(double tol) const {
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (double v : row(s, a)) {
        if (v < 0.0) return false;
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) return false;
    }
  }
  return true;
}

TabularMDP build_tabular(const MazeSpec& maze, double noise) {
  if (noise < 0.0 || noise > 0.5) throw InvalidState("slip noise must lie in [0, 0.5]");

  const auto cells = maze.free_cells();
  TabularMDP mdp;
  mdp.n_states = static_cast<int>(cells.size());
  mdp.n_actions = kNumMoves;
  mdp.state_coords = cells;
  mdp.p.assign(static_cast<size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states, 0.0);

  std::unordered_map<uint64_t, int> index;
  for (int i = 0; i < mdp.n_states; ++i) index[key_from_cell(cells[i]).packed()] = i;

  auto target_of = [&](GridPos s, Move m) {
    const GridPos d = move_delta(m);
    GridPos n{s.row + d.row, s.col + d.col};
    if (!maze.is_free(n)) n = s;
    return index.at(key_from_cell(n).packed());
  };

  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      for (int m = 0; m < kNumMoves; ++m) {
        const double pr = (m == a) ? 1.0 - noise : noise / (kNumMoves - 1);
        if (pr > 0.0) mdp.prob_ref(s, a, target_of(mdp.state_coords[s], static_cast<Move>(m))) += pr;
      }
    }
  }
  return mdp;
}

std::unordered_map<uint64_t, int> state_index_map(const TabularMDP& mdp) {
  std::unordered_map<uint64_t, int> index;
  index.reserve(mdp.state_coords.size());
  for (int i = 0; i < static_cast<int>(mdp.state_coords.size()); ++i)
    index[key_from_cell(mdp.state_coords[i]).packed()] = i;
  return index;
}

TabularMDP random_tabular(int n_states, int n_actions, int branching, uint64_t seed) {
  if (n_states < 2 || n_actions < 2 || branching < 1)
    throw BadDims("random_tabular requires n_states >= 2, n_actions >= 2, branching >= 1");

  TabularMDP mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.p.assign(static_cast<size_t>(n_states) * n_actions * n_states, 0.0);

  Rng rng(seed);
  std::vector<int> pool(static_cast<size_t>(n_states));
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      const int k = 1 + rng.next_int(branching);
      // partial Fisher-Yates draw of k distinct successors
      for (int i = 0; i < n_states; ++i) pool[static_cast<size_t>(i)] = i;
      double total = 0.0;
      std::vector<std::pair<int, double>> entries;
      entries.reserve(static_cast<size_t>(k));
      for (int i = 0; i < k && i < n_states; ++i) {
        const int j = i + rng.next_int(n_states - i);
        std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
        const double w = 0.05 + rng.next_double();  // bounded away from zero
        entries.emplace_back(pool[static_cast<size_t>(i)], w);
        total += w;
      }
      for (const auto& [s2, w] : entries) mdp.prob_ref(s, a, s2) = w / total;
    }
  }
  return mdp;
}

int sample_next(const TabularMDP& mdp, int s, int a, Rng& rng) {
  if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions)
    throw IndexOutOfRange("sample_next: state or action out of range");
  const double u = rng.next_double();
  double acc = 0.0;
  const auto r = mdp.row(s, a);
  for (int s2 = 0; s2 < mdp.n_states; ++s2) {
    acc += r[static_cast<size_t>(s2)];
    if (u < acc) return s2;
  }
  // numerical guard: return the last state with nonzero mass
  for (int s2 = mdp.n_states - 1; s2 >= 0; --s2)
    if (r[static_cast<size_t>(s2)] > 0.0) return s2;
  return mdp.n_states - 1;
}

TabularMDP with_absorbing_state(TabularMDP mdp, int s) {
  if (s < 0 || s >= mdp.n_states) throw IndexOutOfRange("with_absorbing_state: bad state");
  for (int a = 0; a < mdp.n_actions; ++a) {
    for (int s2 = 0; s2 < mdp.n_states; ++s2) mdp.prob_ref(s, a, s2) = 0.0;
    mdp.prob_ref(s, a, s) = 1.0;
  }
  return mdp;
}

}  // namespace ccap
