#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cht {

/// Argument outside the mathematical domain of an operation (negative
/// density, exponent below one, nonpositive regularization, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a precondition that is not a domain question: mismatched
/// grids, missing snapshots, negative density fed to a flux kernel.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values appeared in a field.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solve stopped at the iteration cap.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

/// A density left the nonnegative cone after an update.
class PositivityViolation : public std::runtime_error {
 public:
  PositivityViolation(const std::string& what, std::size_t cell, double value)
      : std::runtime_error(what), cell_(cell), value_(value) {}
  std::size_t cell() const noexcept { return cell_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t cell_;
  double value_;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cht
