#pragma once

#include <stdexcept>
#include <string>

namespace tiedown {

/// Base class for every error raised by the library. The `kind` distinguishes
/// usage problems (bad parameters, malformed files) from numerical failures,
/// which the command-line front end maps to different exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { usage, numerical, io };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& w) : Error(Kind::usage, "invalid parameter: " + w) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(Kind::usage, "domain error: " + w) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(Kind::usage, "dimension error: " + w) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(Kind::usage, "precondition violated: " + w) {}
};

struct HorizonError : Error {
  explicit HorizonError(const std::string& w) : Error(Kind::numerical, "horizon exceeded: " + w) {}
};

struct MemoryBoundError : Error {
  explicit MemoryBoundError(const std::string& w) : Error(Kind::numerical, "memory bound exceeded: " + w) {}
};

struct QuadratureError : Error {
  explicit QuadratureError(const std::string& w) : Error(Kind::numerical, "quadrature did not converge: " + w) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& w) : Error(Kind::numerical, "overflow: " + w) {}
};

struct ResidueError : Error {
  explicit ResidueError(const std::string& w) : Error(Kind::numerical, "rounding residue too large: " + w) {}
};

struct RootNotFound : Error {
  explicit RootNotFound(const std::string& w) : Error(Kind::numerical, "root not found: " + w) {}
};

struct NumericalEscape : Error {
  explicit NumericalEscape(const std::string& w) : Error(Kind::numerical, "orbit escaped [0,1]: " + w) {}
};

struct TimeoutError : Error {
  explicit TimeoutError(const std::string& w) : Error(Kind::numerical, "timeout: " + w) {}
};

struct UnsupportedMap : Error {
  explicit UnsupportedMap(const std::string& w) : Error(Kind::usage, "unsupported map: " + w) {}
};

struct EmptyDistribution : Error {
  explicit EmptyDistribution(const std::string& w) : Error(Kind::usage, "empty distribution: " + w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(Kind::io, w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(Kind::usage, "parse error: " + w) {}
};

}  // namespace tiedown
