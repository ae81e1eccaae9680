#pragma once

#include <stdexcept>
#include <string>

namespace qimem {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Qubit count or subset size outside the supported range.
class SizeError : public Error {
  public:
    using Error::Error;
};

/// Operands act on systems of different dimension.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Qubit index out of range, duplicated, or otherwise unusable.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Probability weights negative or not summing to one.
class ProbabilityError : public Error {
  public:
    using Error::Error;
};

/// Grid coordinate outside the image, or an invalid vertex list.
class CoordinateError : public Error {
  public:
    using Error::Error;
};

/// Two shapes share a vertex qubit in entangled storage.
class OverlapError : public Error {
  public:
    using Error::Error;
};

/// Requested shape inventory does not fit in the array.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Retrieval produced contradictory findings (overlapping violations).
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// Observable or measurement operator fails a structural requirement.
class OperatorError : public Error {
  public:
    using Error::Error;
};

/// Invalid search oracle (empty or out-of-range marked set, wrong mode).
class OracleError : public Error {
  public:
    using Error::Error;
};

/// Stored amplitudes do not form a normalized state.
class NormalizationError : public Error {
  public:
    using Error::Error;
};

} // namespace qimem
