#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wellsep {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid vertex id, malformed set, bad parameter value.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Edge-list or JSON input that does not parse; carries the 1-based line.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Input objects are internally inconsistent (overlapping parts, coverage gaps,
/// degree-loss violations of a supplied partition).
class StructuralError : public Error {
  public:
    using Error::Error;
};

/// Input is larger than an exact search can handle.
class RegimeError : public Error {
  public:
    using Error::Error;
};

/// The host graph does not satisfy the degree regime the construction needs
/// (isolated exceptional vertex, empty common neighbourhood, missing F2 path).
class HostRegimeError : public Error {
  public:
    using Error::Error;
};

/// A certificate was contradicted by a later measurement.
class InconsistencyError : public Error {
  public:
    using Error::Error;
};

/// Cluster sizes could not be brought within the balance target.
class BalanceError : public Error {
  public:
    using Error::Error;
};

}  // namespace wellsep
