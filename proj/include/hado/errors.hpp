#pragma once

#include <stdexcept>
#include <string>

namespace hado {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")"
                                     : what),
        line_number(line) {}
  int line_number;
};

struct NotVisibleError : std::runtime_error {
  NotVisibleError() : std::runtime_error("door not visible from current base pose") {}
};

struct EmptyMaskError : std::runtime_error {
  EmptyMaskError() : std::runtime_error("handle mask is empty") {}
};

struct TooFewPointsError : std::runtime_error {
  TooFewPointsError() : std::runtime_error("point cloud has fewer than 3 points") {}
};

struct DegenerateCloudError : std::runtime_error {
  DegenerateCloudError() : std::runtime_error("all sampled triples were collinear") {}
};

struct DegenerateDemoError : std::runtime_error {
  DegenerateDemoError()
      : std::runtime_error("demonstration start equals goal in every dimension") {}
};

struct BehindCameraError : std::runtime_error {
  BehindCameraError() : std::runtime_error("projection ray does not reach the plane") {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hado
