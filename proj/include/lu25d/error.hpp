#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lu25d {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (matrix dimensions, permutation lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A processor count does not admit the requested grid preset.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the communication fabric (bad proc id, no open superstep).
class FabricError : public Error {
 public:
  using Error::Error;
};

/// A runtime check on the simulated execution failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Every pivot candidate of a panel column fell below the singularity threshold.
class SingularPanelError : public Error {
 public:
  SingularPanelError(std::size_t iteration, std::size_t column)
      : Error("singular panel at iteration " + std::to_string(iteration) +
              ", column " + std::to_string(column)),
        iteration_(iteration),
        column_(column) {}

  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t iteration_;
  std::size_t column_;
};

}  // namespace lu25d
