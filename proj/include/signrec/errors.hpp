#pragma once

#include <stdexcept>
#include <string>

namespace signrec {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument: bad dimensions, out-of-range parameter, malformed file.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An iterative solver ran out of its iteration budget.  Carries the last
// observed optimality gap so callers can decide whether the result is usable.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double last_gap)
      : Error(msg), last_gap_(last_gap) {}
  double last_gap() const { return last_gap_; }

 private:
  double last_gap_;
};

// A linear program or equality-constrained problem has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A tuning target cannot be met (e.g. the requested success probability
// exceeds what any penalty level can achieve).  Carries the best achievable
// value when known.
class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& msg, double best_achievable = 0)
      : Error(msg), best_achievable_(best_achievable) {}
  double best_achievable() const { return best_achievable_; }

 private:
  double best_achievable_;
};

// Numerical breakdown: loss of rank where rank was required, a diverging
// fixed point, a failed internal consistency check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace signrec
