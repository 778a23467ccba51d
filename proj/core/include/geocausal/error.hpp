#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geocausal {

/// Failure classes; the CLI maps each one to its own exit code.
enum class ErrorKind { validation, io, estimation, trajectory_escape };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what)
      : Error(ErrorKind::estimation, what) {}
};

/// A simulated state left the local map's domain.
class TrajectoryEscape : public Error {
 public:
  TrajectoryEscape(std::size_t step, std::size_t node, double value);

  std::size_t step() const noexcept { return step_; }
  std::size_t node() const noexcept { return node_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t step_;
  std::size_t node_;
  double value_;
};

}  // namespace geocausal
