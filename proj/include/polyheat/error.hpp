#pragma once

#include <stdexcept>
#include <string>

namespace polyheat {

enum class ErrorKind {
  invalid_argument,
  grid_mismatch,
  decay_violation,
  under_resolved,
  quadrature,
  blow_up,
  stiffness,
  boundedness,
  schedule_range,
  log_singularity,
  io,
  config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the runner,
/// sweep rows) can map it onto an outcome without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

} // namespace polyheat
