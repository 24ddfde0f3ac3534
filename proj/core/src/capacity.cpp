#include "ccap/capacity.hpp"

#include <cmath>
#include <fstream>

#include "ccap/clustering.hpp"
#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"

namespace ccap {

CountTable count_transitions(const TrajectorySet& trajs, double bin_width) {
  if (trajs.empty()) throw EmptyData("count_transitions: no trajectory data");
  CountTable table;
  table.kind = trajs.kind;
  table.bin_width = trajs.kind == EnvKind::ContinuousMaze ? bin_width : 0.0;
  for (const Transition& tr : trajs.transitions) {
    if (tr.done) continue;  // terminal records carry no outgoing transition
    const StateKey from = discretize(tr, trajs.kind, bin_width, false);
    const StateKey to = discretize(tr, trajs.kind, bin_width, true);
    StateCounts& row = table.rows[from];
    ++row.total;
    ++row.next[to];
  }
  return table;
}

double entropy_nats(const std::map<StateKey, long>& counts, long total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (const auto& [key, n] : counts) {
    if (n <= 0) continue;
    const double p = static_cast<double>(n) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

namespace {

struct McEstimate {
  double capacity = 0.0;
  int support = 0;
  long samples = 0;
};

McEstimate mc_estimate(const StateCounts& row, StateKey self, bool miller_madow) {
  // Drop transitions that stayed in the same discretized state: they carry
  // no physical state change, hence no causal choice.
  long moved = 0;
  int support = 0;
  for (const auto& [key, n] : row.next) {
    if (key == self || n <= 0) continue;
    moved += n;
    ++support;
  }
  McEstimate est;
  est.samples = row.total;
  est.support = support;
  if (moved == 0) return est;  // all self-loops (or nothing): capacity 0
  double h = 0.0;
  for (const auto& [key, n] : row.next) {
    if (key == self || n <= 0) continue;
    const double p = static_cast<double>(n) / static_cast<double>(moved);
    h -= p * std::log(p);
  }
  if (miller_madow && moved > 0) h += static_cast<double>(support - 1) / (2.0 * moved);
  est.capacity = h < 0.0 ? 0.0 : h;
  return est;
}

}  // namespace

double capacity_mc(const CountTable& counts, StateKey s, int min_samples, bool miller_madow) {
  const auto it = counts.rows.find(s);
  const long total = it == counts.rows.end() ? 0 : it->second.total;
  if (total < min_samples)
    throw InsufficientSamples("state (" + std::to_string(s.kx) + "," + std::to_string(s.ky) +
                              ") has " + std::to_string(total) + " samples, need " +
                              std::to_string(min_samples));
  return mc_estimate(it->second, s, miller_madow).capacity;
}

CapacityMap capacity_map(const CountTable& counts, int min_samples, bool miller_madow) {
  if (counts.rows.empty()) throw EmptyData("capacity_map: empty count table");
  CapacityMap map;
  map.estimator = EstimatorTag::Mc;
  map.bin_width = counts.bin_width;
  for (const auto& [key, row] : counts.rows) {
    const McEstimate est = mc_estimate(row, key, miller_madow);
    CapacityEntry e;
    e.capacity = est.capacity;
    e.support = est.support;
    e.samples = est.samples;
    e.low_confidence = est.samples < min_samples;
    map.states[key] = e;
  }
  return map;
}

CapacityMap capacity_map(const TrajectorySet& trajs, const PartitionConfig& cfg,
                         EstimatorTag estimator, int min_samples, bool miller_madow) {
  if (trajs.empty()) throw EmptyData("capacity_map: no trajectory data");
  cfg.validate();
  if (estimator == EstimatorTag::Mc)
    return capacity_map(count_transitions(trajs, cfg.tau_nei), min_samples, miller_madow);

  // Clustered estimator: anchors are the visited tau_nei bins; every logged
  // state position is a sample.
  std::vector<Vec2> samples;
  samples.reserve(trajs.transitions.size());
  for (const Transition& tr : trajs.transitions) samples.push_back(tr.state);

  const double w = trajs.kind == EnvKind::ContinuousMaze ? cfg.tau_nei : 0.0;
  CapacityMap map;
  map.estimator = EstimatorTag::Clustered;
  map.bin_width = w;

  std::map<StateKey, long> visited;
  for (const Transition& tr : trajs.transitions)
    ++visited[discretize(tr, trajs.kind, cfg.tau_nei, false)];

  for (const auto& [key, visits] : visited) {
    const Vec2 anchor = map.key_position(key);
    const Partition part = partition_states(samples, anchor, cfg);
    CapacityEntry e;
    e.samples = static_cast<long>(part.adj.size());
    e.low_confidence = e.samples < min_samples;
    if (!part.adj.empty()) {
      const ClusterResult clusters = cluster_adjacent(samples, anchor, cfg);
      e.support = static_cast<int>(clusters.clusters.size());
      double h = 0.0;
      for (double p : clusters.probabilities)
        if (p > 0.0) h -= p * std::log(p);
      e.capacity = h < 0.0 ? 0.0 : h;
    }
    map.states[key] = e;
  }
  return map;
}

void write_capacity_map(const std::string& path, const CapacityMap& map) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  std::string out;
  out += "# estimator " + std::string(map.estimator == EstimatorTag::Mc ? "mc" : "clustered") + "\n";
  out += "# bin_width " + fmt_double(map.bin_width) + "\n";
  out += "state_key capacity support samples confidence\n";
  for (const auto& [key, e] : map.states) {
    out += std::to_string(key.kx);
    out += ' ';
    out += std::to_string(key.ky);
    out += ' ';
    out += fmt_double(e.capacity);
    out += ' ';
    out += std::to_string(e.support);
    out += ' ';
    out += std::to_string(e.samples);
    out += ' ';
    out += e.low_confidence ? "low" : "ok";
    out += '\n';
  }
  f << out;
  if (!f) throw IoError("write failed: " + path);
}

CapacityMap read_capacity_map(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  CapacityMap map;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto fields = split_fields(line);
      if (fields.size() >= 3 && fields[1] == "estimator")
        map.estimator = fields[2] == "clustered" ? EstimatorTag::Clustered : EstimatorTag::Mc;
      else if (fields.size() >= 3 && fields[1] == "bin_width") {
        if (!parse_double(fields[2], map.bin_width))
          throw MalformedLine(line_no, "bad bin_width");
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 6) throw MalformedLine(line_no, "expected 6 fields");
    StateKey key;
    CapacityEntry e;
    int kx = 0, ky = 0, support = 0;
    long samples = 0;
    if (!parse_int(fields[0], kx) || !parse_int(fields[1], ky) ||
        !parse_double(fields[2], e.capacity) || !parse_int(fields[3], support) ||
        !parse_long(fields[4], samples) || (fields[5] != "ok" && fields[5] != "low"))
      throw MalformedLine(line_no, "unparseable capacity record");
    key.kx = kx;
    key.ky = ky;
    e.support = support;
    e.samples = samples;
    e.low_confidence = fields[5] == "low";
    map.states[key] = e;
  }
  if (!header_seen) throw MalformedLine(line_no == 0 ? 1 : line_no, "missing column header");
  return map;
}

}  // namespace ccap
