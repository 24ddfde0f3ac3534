#include "ccap/subgoals.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>

#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"

namespace ccap {

const Subgoal* SubgoalSet::by_id(int id) const {
  for (const Subgoal& g : goals)
    if (g.id == id) return &g;
  return nullptr;
}

SubgoalSet select_subgoals(const CapacityMap& cmap, double threshold,
                           double suppression_radius, double tau_nei) {
  if (cmap.states.empty()) throw EmptyData("select_subgoals: empty capacity map");
  if (!(threshold > 0.0)) throw ConfigError("capacity_threshold", "must be > 0");

  struct Candidate {
    StateKey key;
    Vec2 pos;
    double capacity;
  };
  std::vector<Candidate> cands;
  for (const auto& [key, e] : cmap.states) {
    if (e.low_confidence || e.capacity < threshold) continue;
    cands.push_back({key, cmap.key_position(key), e.capacity});
  }
  if (cands.empty()) throw NoCandidates("no state reaches the capacity threshold");

  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.capacity != b.capacity) return a.capacity > b.capacity;
    return a.key < b.key;
  });

  SubgoalSet set;
  set.suppression_radius = suppression_radius;
  std::vector<bool> suppressed(cands.size(), false);
  for (size_t i = 0; i < cands.size(); ++i) {
    if (suppressed[i]) continue;
    Subgoal g;
    g.id = static_cast<int>(set.goals.size());
    g.key = cands[i].key;
    g.anchor = cands[i].pos;
    g.capacity = cands[i].capacity;
    g.radius = tau_nei;
    set.goals.push_back(g);
    for (size_t j = i + 1; j < cands.size(); ++j) {
      if (!suppressed[j] && distance(cands[i].pos, cands[j].pos) <= suppression_radius)
        suppressed[j] = true;
    }
  }
  return set;
}

int SubgoalGraph::region_of(StateKey k) const {
  const auto it = region.find(k);
  if (it != region.end()) return it->second;
  return assign_nearest(key_position(k), subgoals);
}

namespace {

// Index of the subgoal whose radius contains the position, nearest first,
// ties to the lowest id; -1 if none.
int achieved_subgoal(Vec2 pos, const SubgoalSet& set) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Subgoal& g : set.goals) {
    const double d = distance(pos, g.anchor);
    if (d < g.radius && d < best_d) {
      best = g.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

std::vector<int> bfs_distances(const MazeSpec& maze, GridPos src) {
  std::vector<int> dist(static_cast<size_t>(maze.width) * maze.height, -1);
  if (!maze.is_free(src)) return dist;
  std::deque<GridPos> queue{src};
  dist[static_cast<size_t>(src.row) * maze.width + src.col] = 0;
  while (!queue.empty()) {
    const GridPos p = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<size_t>(p.row) * maze.width + p.col];
    const GridPos nbrs[4] = {{p.row - 1, p.col}, {p.row + 1, p.col}, {p.row, p.col - 1},
                             {p.row, p.col + 1}};
    for (const GridPos& n : nbrs) {
      if (!maze.is_free(n)) continue;
      int& nd = dist[static_cast<size_t>(n.row) * maze.width + n.col];
      if (nd == -1) {
        nd = d + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

SubgoalGraph build_subgoal_graph(const TrajectorySet& trajs, const SubgoalSet& subgoals,
                                 double tau_nei, const MazeSpec* maze) {
  if (subgoals.empty()) throw EmptySubgoals("build_subgoal_graph: no subgoals");

  SubgoalGraph graph;
  graph.subgoals = subgoals;
  graph.bin_width = trajs.kind == EnvKind::ContinuousMaze ? tau_nei : 0.0;

  // Per-key tallies of which subgoal is achieved next.
  std::map<StateKey, std::map<int, long>> next_achieved;

  const auto& trs = trajs.transitions;
  size_t begin = 0;
  while (begin < trs.size()) {
    size_t end = begin;
    while (end < trs.size() && trs[end].episode == trs[begin].episode) ++end;

    // In-radius subgoal per record; crossing into a radius is an event.
    const size_t len = end - begin;
    std::vector<int> in_ball(len, -1);
    for (size_t i = 0; i < len; ++i)
      in_ball[i] = achieved_subgoal(trs[begin + i].state, subgoals);

    int last_event = -1;
    for (size_t i = 0; i < len; ++i) {
      const int g = in_ball[i];
      if (g == -1) continue;
      const bool entering = i == 0 || in_ball[i - 1] != g;
      if (!entering) continue;
      if (last_event != -1) ++graph.edges[{last_event, g}];
      last_event = g;
    }

    // Label every record with the subgoal achieved at or after it.
    int upcoming = -1;
    for (size_t i = len; i-- > 0;) {
      if (in_ball[i] != -1) upcoming = in_ball[i];
      if (upcoming != -1)
        ++next_achieved[discretize(trs[begin + i], trajs.kind, tau_nei, false)][upcoming];
    }
    begin = end;
  }

  for (const auto& [key, tally] : next_achieved) {
    int best_id = -1;
    long best_n = -1;
    for (const auto& [id, n] : tally) {
      if (n > best_n) {  // map iteration is id-ascending, so ties keep the lowest id
        best_id = id;
        best_n = n;
      }
    }
    graph.region[key] = best_id;
  }

  // Visited keys that never preceded an achievement: nearest anchor, by
  // maze distance when the maze is known.
  std::map<StateKey, long> visited;
  for (const Transition& tr : trs) ++visited[discretize(tr, trajs.kind, tau_nei, false)];

  std::vector<std::vector<int>> anchor_dists;
  if (maze != nullptr) {
    anchor_dists.reserve(subgoals.goals.size());
    for (const Subgoal& g : subgoals.goals) {
      const GridPos cell{static_cast<int>(g.anchor.y), static_cast<int>(g.anchor.x)};
      anchor_dists.push_back(bfs_distances(*maze, cell));
    }
  }

  for (const auto& [key, n] : visited) {
    if (graph.region.count(key)) continue;
    if (maze == nullptr) {
      graph.region[key] = assign_nearest(graph.key_position(key), subgoals);
      continue;
    }
    const Vec2 pos = graph.key_position(key);
    const GridPos cell{static_cast<int>(pos.y), static_cast<int>(pos.x)};
    int best_id = -1;
    int best_d = std::numeric_limits<int>::max();
    for (size_t i = 0; i < subgoals.goals.size(); ++i) {
      if (!maze->in_bounds(cell.row, cell.col)) break;
      const int d = anchor_dists[i][static_cast<size_t>(cell.row) * maze->width + cell.col];
      if (d >= 0 && d < best_d) {
        best_d = d;
        best_id = subgoals.goals[i].id;
      }
    }
    graph.region[key] =
        best_id != -1 ? best_id : assign_nearest(graph.key_position(key), subgoals);
  }
  return graph;
}

int plan_next_subgoal(const SubgoalGraph& graph, int current_region, StateKey final_goal) {
  if (graph.subgoals.empty()) throw EmptySubgoals("plan_next_subgoal: no subgoals");
  const int goal_region = graph.region_of(final_goal);
  if (current_region == goal_region) return SubgoalGraph::kGoalNode;

  // Unit-cost BFS over directed edges; neighbour expansion in ascending id
  // order keeps the planner deterministic. Self-edges are ignored.
  std::map<int, std::vector<int>> adjacency;
  for (const auto& [edge, count] : graph.edges) {
    if (edge.first == edge.second || count <= 0) continue;
    adjacency[edge.first].push_back(edge.second);
  }
  for (auto& [from, next] : adjacency) std::sort(next.begin(), next.end());

  std::map<int, int> parent;  // node -> predecessor
  std::deque<int> queue{current_region};
  parent[current_region] = current_region;
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    if (node == goal_region) {
      int hop = node;
      while (parent[hop] != current_region) hop = parent[hop];
      return hop;
    }
    const auto it = adjacency.find(node);
    if (it == adjacency.end()) continue;
    for (int next : it->second) {
      if (parent.count(next)) continue;
      parent[next] = node;
      queue.push_back(next);
    }
  }
  throw Unreachable("no edge path from region " + std::to_string(current_region) +
                    " to the goal region " + std::to_string(goal_region));
}

int assign_nearest(Vec2 state, const SubgoalSet& subgoals) {
  if (subgoals.empty()) throw EmptySubgoals("assign_nearest: no subgoals");
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Subgoal& g : subgoals.goals) {
    const double d = distance(state, g.anchor);
    if (d < best_d) {
      best = g.id;
      best_d = d;
    }
  }
  return best;
}

void write_subgoal_graph(const std::string& path, const SubgoalGraph& graph) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  std::string out;
  out += "# suppression_radius " + fmt_double(graph.subgoals.suppression_radius) + "\n";
  out += "# bin_width " + fmt_double(graph.bin_width) + "\n";
  const double radius = graph.subgoals.goals.empty() ? 0.7 : graph.subgoals.goals[0].radius;
  out += "# radius " + fmt_double(radius) + "\n";
  for (const Subgoal& g : graph.subgoals.goals) {
    out += "subgoal " + std::to_string(g.id) + ' ' + fmt_double(g.anchor.x) + ' ' +
           fmt_double(g.anchor.y) + ' ' + fmt_double(g.capacity) + '\n';
  }
  for (const auto& [edge, count] : graph.edges)
    out += "edge " + std::to_string(edge.first) + ' ' + std::to_string(edge.second) + ' ' +
           std::to_string(count) + '\n';
  for (const auto& [key, id] : graph.region)
    out += "region " + std::to_string(key.kx) + ' ' + std::to_string(key.ky) + ' ' +
           std::to_string(id) + '\n';
  f << out;
  if (!f) throw IoError("write failed: " + path);
}

SubgoalGraph read_subgoal_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  SubgoalGraph graph;
  std::string line;
  int line_no = 0;
  double radius = 0.7;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (line[0] == '#') {
      if (fields.size() >= 3 && fields[1] == "suppression_radius")
        parse_double(fields[2], graph.subgoals.suppression_radius);
      else if (fields.size() >= 3 && fields[1] == "bin_width")
        parse_double(fields[2], graph.bin_width);
      else if (fields.size() >= 3 && fields[1] == "radius")
        parse_double(fields[2], radius);
      continue;
    }
    if (fields[0] == "subgoal") {
      Subgoal g;
      g.radius = radius;
      if (fields.size() != 5 || !parse_int(fields[1], g.id) ||
          !parse_double(fields[2], g.anchor.x) || !parse_double(fields[3], g.anchor.y) ||
          !parse_double(fields[4], g.capacity))
        throw MalformedLine(line_no, "bad subgoal record");
      if (graph.bin_width > 0.0) {
        g.key = key_from_position(g.anchor, graph.bin_width);
      } else {
        g.key = {static_cast<int32_t>(g.anchor.x), static_cast<int32_t>(g.anchor.y)};
      }
      graph.subgoals.goals.push_back(g);
    } else if (fields[0] == "edge") {
      int from = 0, to = 0;
      long count = 0;
      if (fields.size() != 4 || !parse_int(fields[1], from) || !parse_int(fields[2], to) ||
          !parse_long(fields[3], count))
        throw MalformedLine(line_no, "bad edge record");
      graph.edges[{from, to}] = count;
    } else if (fields[0] == "region") {
      int kx = 0, ky = 0, id = 0;
      if (fields.size() != 4 || !parse_int(fields[1], kx) || !parse_int(fields[2], ky) ||
          !parse_int(fields[3], id))
        throw MalformedLine(line_no, "bad region record");
      graph.region[{kx, ky}] = id;
    } else {
      throw MalformedLine(line_no, "unknown record type");
    }
  }
  return graph;
}

}  // namespace ccap
