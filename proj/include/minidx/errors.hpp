#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minidx {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class ChartDomainError : public Error {
 public:
  using Error::Error;
};

class TangencyViolation : public Error {
 public:
  using Error::Error;
};

class FrameConstructionError : public Error {
 public:
  using Error::Error;
};

class IncompatibleKind : public Error {
 public:
  using Error::Error;
};

class ResolutionTooSmall : public Error {
 public:
  using Error::Error;
};

/// Jacobian rank loss at coordinate singularities; carries the node ids.
class FrameDegeneracy : public Error {
 public:
  FrameDegeneracy(const std::string& what, std::vector<int> nodes)
      : Error(what), nodes_(std::move(nodes)) {}
  const std::vector<int>& nodes() const { return nodes_; }

 private:
  std::vector<int> nodes_;
};

class MeshNotSymmetric : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double achieved_residual)
      : Error(what), residual_(achieved_residual) {}
  double achieved_residual() const { return residual_; }

 private:
  double residual_;
};

class NotHarmonic : public Error {
 public:
  using Error::Error;
};

class IllConditionedBasis : public Error {
 public:
  using Error::Error;
};

class MissingStructure : public Error {
 public:
  using Error::Error;
};

/// Config parse failure; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace minidx
