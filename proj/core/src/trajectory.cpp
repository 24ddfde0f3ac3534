#include "ccap/trajectory.hpp"

#include <fstream>

#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"

namespace ccap {

bool chained(const TrajectorySet& set) {
  for (size_t i = 1; i < set.transitions.size(); ++i) {
    const Transition& prev = set.transitions[i - 1];
    const Transition& cur = set.transitions[i];
    if (cur.episode != prev.episode) {
      if (cur.episode != prev.episode + 1 || cur.t != 0) return false;
      continue;
    }
    if (cur.t != prev.t + 1) return false;
    if (prev.done) return false;  // no records after a terminal step
    if (!(prev.next_state == cur.state)) return false;
  }
  return true;
}

TrajectorySet merge_trajectories(TrajectorySet a, const TrajectorySet& b) {
  const int offset = a.episodes;
  a.transitions.reserve(a.transitions.size() + b.transitions.size());
  for (Transition tr : b.transitions) {
    tr.episode += offset;
    a.transitions.push_back(tr);
  }
  a.episodes += b.episodes;
  return a;
}

StateKey discretize(const Transition& tr, EnvKind kind, double bin_width, bool next) {
  const Vec2& s = next ? tr.next_state : tr.state;
  if (kind == EnvKind::ContinuousMaze) return key_from_position(s, bin_width);
  return {static_cast<int32_t>(s.x), static_cast<int32_t>(s.y)};
}

VisitCounts visit_counts(const TrajectorySet& set, double bin_width) {
  VisitCounts vc;
  vc.bin_width = set.kind == EnvKind::ContinuousMaze ? bin_width : 0.0;
  for (const Transition& tr : set.transitions) {
    ++vc.counts[discretize(tr, set.kind, bin_width, false)];
    ++vc.total;
  }
  return vc;
}

namespace {

const char* kind_tag(EnvKind k) {
  switch (k) {
    case EnvKind::DiscreteMaze:
      return "discrete";
    case EnvKind::ContinuousMaze:
      return "continuous";
    default:
      return "tabular";
  }
}

EnvKind kind_from_tag(std::string_view s, int line_no) {
  if (s == "discrete") return EnvKind::DiscreteMaze;
  if (s == "continuous") return EnvKind::ContinuousMaze;
  if (s == "tabular") return EnvKind::Tabular;
  throw MalformedLine(line_no, "unknown kind tag");
}

constexpr const char* kHeader = "episode t sx sy ax ay nsx nsy reward done";

}  // namespace

void write_trajectories(const std::string& path, const TrajectorySet& set) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);

  std::string out;
  out += "# seed " + std::to_string(set.seed) + "\n";
  out += "# policy " + (set.policy.empty() ? std::string("random") : set.policy) + "\n";
  out += "# env " + (set.env.empty() ? std::string("unknown") : set.env) + "\n";
  out += "# kind " + std::string(kind_tag(set.kind)) + "\n";
  out += "# episodes " + std::to_string(set.episodes) + "\n";
  out += kHeader;
  out += '\n';
  for (const Transition& tr : set.transitions) {
    out += std::to_string(tr.episode);
    out += ' ';
    out += std::to_string(tr.t);
    out += ' ';
    out += fmt_double(tr.state.x);
    out += ' ';
    out += fmt_double(tr.state.y);
    out += ' ';
    out += fmt_double(tr.action.dx);
    out += ' ';
    out += fmt_double(tr.action.dy);
    out += ' ';
    out += fmt_double(tr.next_state.x);
    out += ' ';
    out += fmt_double(tr.next_state.y);
    out += ' ';
    out += fmt_double(tr.reward);
    out += ' ';
    out += tr.done ? '1' : '0';
    out += '\n';
  }
  f << out;
  if (!f) throw IoError("write failed: " + path);
}

TrajectorySet read_trajectories(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);

  TrajectorySet set;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) throw MalformedLine(line_no, "empty line");
    if (line[0] == '#') {
      const auto fields = split_fields(line);
      if (fields.size() >= 3 && fields[1] == "seed") {
        long v = 0;
        if (!parse_long(fields[2], v)) throw MalformedLine(line_no, "bad seed");
        set.seed = static_cast<uint64_t>(v);
      } else if (fields.size() >= 3 && fields[1] == "policy") {
        set.policy = std::string(fields[2]);
      } else if (fields.size() >= 3 && fields[1] == "env") {
        set.env = std::string(fields[2]);
      } else if (fields.size() >= 3 && fields[1] == "kind") {
        set.kind = kind_from_tag(fields[2], line_no);
      } else if (fields.size() >= 3 && fields[1] == "episodes") {
        int v = 0;
        if (!parse_int(fields[2], v)) throw MalformedLine(line_no, "bad episode count");
        set.episodes = v;
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) throw MalformedLine(line_no, "missing column header");
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 10) throw MalformedLine(line_no, "expected 10 fields");
    Transition tr;
    long done = 0;
    if (!parse_int(fields[0], tr.episode) || !parse_int(fields[1], tr.t) ||
        !parse_double(fields[2], tr.state.x) || !parse_double(fields[3], tr.state.y) ||
        !parse_double(fields[4], tr.action.dx) || !parse_double(fields[5], tr.action.dy) ||
        !parse_double(fields[6], tr.next_state.x) || !parse_double(fields[7], tr.next_state.y) ||
        !parse_double(fields[8], tr.reward) || !parse_long(fields[9], done) ||
        (done != 0 && done != 1))
      throw MalformedLine(line_no, "unparseable transition record");
    tr.done = done == 1;
    set.transitions.push_back(tr);
  }
  if (!header_seen) throw MalformedLine(line_no == 0 ? 1 : line_no, "missing column header");
  return set;
}

}  // namespace ccap
