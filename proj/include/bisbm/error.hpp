#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bisbm {

/// Parameter outside its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A planting function equal to the uniform distribution.
class NoSignal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested operation exists but not for these inputs.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Refusal to build an object whose expected size exceeds the guard.
class SizeGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectrum carries no usable second direction (all-zero operator, lambda_2 = 0).
class Degenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative eigensolver ran out of iterations. Carries the best residuals
/// reached so callers may accept the estimate or retry with a new seed.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_values,
                   std::vector<double> best_residuals)
      : std::runtime_error(what),
        best_values_(std::move(best_values)),
        best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_values() const { return best_values_; }
  const std::vector<double>& best_residuals() const { return best_residuals_; }

 private:
  std::vector<double> best_values_;
  std::vector<double> best_residuals_;
};

}  // namespace bisbm
