#pragma once

#include <stdexcept>
#include <string>

namespace ccap {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// maze parsing
struct RaggedGrid : Error {
  using Error::Error;
};
struct UnknownChar : Error {
  using Error::Error;
};
struct NoFreeCell : Error {
  using Error::Error;
};
struct InvalidMaze : Error {
  using Error::Error;
};

// environment stepping
struct InvalidState : Error {
  using Error::Error;
};
struct BadDims : Error {
  using Error::Error;
};

// trajectory io / sampling
struct IoError : Error {
  using Error::Error;
};
struct MalformedLine : Error {
  int line_no;
  explicit MalformedLine(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_no(line) {}
};
struct EmptyCounts : Error {
  using Error::Error;
};

// capacity estimation
struct EmptyData : Error {
  using Error::Error;
};
struct InsufficientSamples : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};

// subgoals
struct NoCandidates : Error {
  using Error::Error;
};
struct EmptySubgoals : Error {
  using Error::Error;
};
struct Unreachable : Error {
  using Error::Error;
};

// predictor
struct TooFewSubgoals : Error {
  using Error::Error;
};
struct NoSegments : Error {
  using Error::Error;
};
struct Untrained : Error {
  using Error::Error;
};
struct EmptyLabels : Error {
  using Error::Error;
};

// shaping
struct UnreachableGoal : Error {
  using Error::Error;
};
struct UnknownState : Error {
  using Error::Error;
};

// rl
struct MissingDependency : Error {
  using Error::Error;
};
struct NonConvergence : Error {
  using Error::Error;
};

// cli / config
struct UnknownCommand : Error {
  using Error::Error;
};
struct ConfigError : Error {
  std::string key;
  ConfigError(const std::string& k, const std::string& reason)
      : Error("config key '" + k + "': " + reason), key(k) {}
};
struct ParseError : Error {
  int line_no;
  explicit ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_no(line) {}
};
struct UnknownKey : Error {
  using Error::Error;
};
struct BadInput : Error {
  using Error::Error;
};

}  // namespace ccap
