#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace huplab {

// Argument outside the domain of a map or density.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Point sits exactly on a branch endpoint, where the Koopman operator is
// not single-valued. Callers are expected to perturb the sample point.
class AmbiguityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Invalid numerical parameter (cutoff too small, empty grid, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative or adaptive routine failed to reach its tolerance. Carries the
// best estimate that was available when it gave up.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::complex<double> best_estimate,
                   double residual)
      : std::runtime_error(what), best_estimate_(best_estimate), residual_(residual) {}

  std::complex<double> best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::complex<double> best_estimate_;
  double residual_;
};

// Requested computation exceeds a documented resource cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Orbit-based average whose normalising sum vanished.
class DegenerateOrbitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace huplab
