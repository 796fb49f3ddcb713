#pragma once

#include <stdexcept>
#include <string>

namespace sfrf {

enum class ErrorKind {
  Geometry,
  DegenerateBand,
  GridMismatch,
  EmptyDisjunction,
  Parse,
  EmptyRun,
  EmptyHistory,
  InsufficientLength,
  DegenerateSignal,
  Config,
  Data,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace sfrf
