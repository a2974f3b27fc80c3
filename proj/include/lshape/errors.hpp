#pragma once

#include <stdexcept>
#include <string>

namespace lshape {

/// Input violates a precondition of the geometric model.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input sits on (or within tolerance of) a boundary where the L-form
/// collapses into a cuboid.
class DegeneracyError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Inputs are individually valid but cannot describe one consistent design.
class InconsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An objective returned a non-finite value.
class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const std::string& what, double point)
      : std::runtime_error(what), point_(point) {}

  double point() const noexcept { return point_; }

private:
  double point_;
};

} // namespace lshape
