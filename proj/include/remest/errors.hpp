#pragma once

#include <stdexcept>
#include <string>

namespace remest {

/// Coarse failure class, used by the CLI to pick an exit code.
enum class ErrorClass {
  Validation,   // bad input: chain, age function, distortion, config
  Solver,       // iteration caps, singular systems, degenerate searches
  Io,
};

/// Base for every error raised by the library. `name()` is the stable,
/// machine-readable identifier (e.g. "RowSumError").
class Error : public std::runtime_error {
 public:
  Error(std::string name, ErrorClass cls, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)), class_(cls) {}

  const std::string& name() const noexcept { return name_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string name_;
  ErrorClass class_;
};

#define REMEST_DEFINE_ERROR(Type, Class)                                 \
  class Type : public Error {                                            \
   public:                                                               \
    explicit Type(const std::string& what)                               \
        : Error(#Type, ErrorClass::Class, what) {}                       \
  };

REMEST_DEFINE_ERROR(RowSumError, Validation)
REMEST_DEFINE_ERROR(NegativeEntry, Validation)
REMEST_DEFINE_ERROR(ReducibleChain, Validation)
REMEST_DEFINE_ERROR(DomainError, Validation)
REMEST_DEFINE_ERROR(DistortionDiagonalError, Validation)
REMEST_DEFINE_ERROR(AgeFunctionError, Validation)
REMEST_DEFINE_ERROR(ConfigError, Validation)

REMEST_DEFINE_ERROR(ConvergenceFailure, Solver)
REMEST_DEFINE_ERROR(NonConvergence, Solver)
REMEST_DEFINE_ERROR(DegenerateSlopes, Solver)
REMEST_DEFINE_ERROR(BadBracket, Solver)
REMEST_DEFINE_ERROR(NoProgress, Solver)
REMEST_DEFINE_ERROR(InfeasiblePair, Solver)
REMEST_DEFINE_ERROR(SupportMismatch, Solver)

REMEST_DEFINE_ERROR(IoError, Io)

#undef REMEST_DEFINE_ERROR

}  // namespace remest
