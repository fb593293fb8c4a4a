#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kpz {

// Argument outside the mathematically supported range of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller asked for a rule, grid or budget the library does not support.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computed quantity failed a consistency check (imaginary residue,
// truncation sensitivity, value outside its admissible range, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A kernel or integrand produced NaN at a specific node pair.
class EvaluationError : public NumericalError {
 public:
  EvaluationError(const std::string& what, std::size_t i, std::size_t j)
      : NumericalError(what + " at node pair (" + std::to_string(i) + ", " +
                       std::to_string(j) + ")"),
        i_(i),
        j_(j) {}

  std::size_t row() const noexcept { return i_; }
  std::size_t col() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

// Matrix entry 1/d with |d| below the singularity threshold.
class SingularityError : public NumericalError {
 public:
  SingularityError(const std::string& what, std::size_t i, std::size_t j)
      : NumericalError(what + " (entry " + std::to_string(i) + ", " +
                       std::to_string(j) + ")"),
        i_(i),
        j_(j) {}

  std::size_t row() const noexcept { return i_; }
  std::size_t col() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

}  // namespace kpz
