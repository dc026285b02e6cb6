#pragma once

#include <stdexcept>
#include <string>

namespace onecomp {

/// Input violates an operation's precondition (maps to CLI exit status 2).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point outside the open disc was passed where an interior point is required.
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// The requested tolerance could not be met; carries the best bracket found.
class PrecisionExhausted : public std::runtime_error {
 public:
  PrecisionExhausted(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " (best bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Certified Blaschke tail is too large to meet the tolerance at the queried point.
class TailInsufficient : public PrecisionExhausted {
 public:
  using PrecisionExhausted::PrecisionExhausted;
};

/// A measure query asked for a square finer than the materialized zero horizon.
class HorizonExceeded : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace onecomp
