#pragma once

#include <stdexcept>
#include <string>

namespace dmpc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewWaypoints : Error {
  using Error::Error;
};
struct DegenerateWaypoints : Error {
  using Error::Error;
};
struct SingularTangent : Error {
  using Error::Error;
};
struct MissingTrajectory : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string &msg, int line_, std::string field_)
      : Error(msg), line(line_), field(std::move(field_)) {}
  int line;  // 1-based, 0 when unknown
  std::string field;
};

struct ValidationError : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  SolverFailure(const std::string &msg, int agent_, int step_)
      : Error(msg), agent(agent_), step(step_) {}
  int agent;
  int step;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace dmpc
