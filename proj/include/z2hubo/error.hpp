#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace z2hubo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array lengths disagree with the instance they are used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance or graph text. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Requested problem size is outside what the routine supports.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// The polynomial cannot be mapped onto a HUBO-graph.
class MappingError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken (e.g. a gauge operator that does not commute).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Random instance generation gave up after its retry cap.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A solver trajectory left the finite range.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Argument outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace z2hubo
