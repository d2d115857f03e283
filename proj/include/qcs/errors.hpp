#pragma once

#include <stdexcept>
#include <string>

namespace qcs {

// Input outside the mathematical domain of an operation (zero quaternion,
// point at the Cayley pole, degenerate differential, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The Cayley inverse was asked to evaluate too close to (0,...,0,-1).
class PoleError : public DomainError {
 public:
  PoleError(const std::string& what, double distance)
      : DomainError(what), distance_(distance) {}
  double distance() const noexcept { return distance_; }

 private:
  double distance_;
};

// A parameter violates a documented range (p outside (1,Q), lambda <= 0, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solver exhausted its budget. Carries the best residual seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace qcs
