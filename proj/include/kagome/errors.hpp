#pragma once

#include <stdexcept>
#include <string>

namespace kagome {

/// Parameters outside their documented domain (bad spec, empty grid, ...).
class ConstraintError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A formula evaluated where it is singular, e.g. coincident dipoles.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Lattice sums or other iterative pieces that cannot meet their tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver breakdown; `what()` carries the condition report.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace kagome
