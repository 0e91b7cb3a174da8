#pragma once

#include <stdexcept>
#include <string>

namespace disjstream {

// Raised for arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A protocol has no message table for a reachable (player, prefix, bit).
class SpecificationIncomplete : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact enumeration would exceed the configured atom budget.
class StateSpaceOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A declared promise (strict turnstile, stream length bound) was broken.
class PromiseViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthBudgetExceeded : public PromiseViolation {
 public:
  using PromiseViolation::PromiseViolation;
};

}  // namespace disjstream
