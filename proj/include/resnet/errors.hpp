#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resnet {

// Bad argument: unknown vertex, size mismatch, empty set, out-of-range parameter.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix handed to the reconstruction does not come from any network.
class NotAResistanceMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration budget (subsets, correspondences) would be exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampler ran out of attempts. Retrying with another seed is fine.
class RejectionBudgetExceeded : public std::runtime_error {
 public:
  RejectionBudgetExceeded(const std::string& what, std::size_t attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

// Monte Carlo replicates hit the safety jump cap.
class McBudgetAbort : public std::runtime_error {
 public:
  McBudgetAbort(const std::string& what, std::size_t aborted)
      : std::runtime_error(what), aborted_(aborted) {}
  std::size_t aborted() const { return aborted_; }

 private:
  std::size_t aborted_;
};

// Should never happen on valid input (e.g. a singular grounded Laplacian).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace resnet
