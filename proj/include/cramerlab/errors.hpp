#pragma once

#include <stdexcept>
#include <string>

namespace cramerlab {

/// Precondition violated by the caller (bad dimension, zero direction, N <= n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine could not reach its accuracy target.  `partial` carries
/// the best value available when one exists (e.g. a certified lower bound).
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what, double partial = 0.0)
      : std::runtime_error(what), partial_(partial) {}
  double partial() const noexcept { return partial_; }

 private:
  double partial_;
};

/// Monte Carlo estimator collapsed (effective sample size too small, every draw censored, ...).
class EstimatorDegenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empirical covariance not positive definite; more samples are needed.
class SampleSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested level is not bracketed by the data.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cramerlab
