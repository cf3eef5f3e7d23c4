#pragma once

#include <stdexcept>
#include <string>

namespace litmeta {

/// Base error for all library failures. Messages are meant to be actionable:
/// parse errors carry byte offsets, validation errors name the offending item.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an input file or configuration is rejected before any work runs.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Raised by the regression core when the design matrix loses full column
/// rank; the message lists the collinear columns.
class RankError : public Error {
public:
  explicit RankError(const std::string& msg) : Error(msg) {}
};

/// Raised when a pipeline stage fails mid-run; carries the stage name.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& msg)
      : Error("stage '" + stage + "': " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

}  // namespace litmeta
