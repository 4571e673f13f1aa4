#pragma once

#include <stdexcept>
#include <string>

namespace entropylab {

// Bad argument or malformed field (non-positive density, t <= 0, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two routes to the same quantity disagree beyond their tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hypothesis of an inequality is not met by the supplied density.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(double t, double dt, const std::string& what)
      : std::runtime_error(what + " (t=" + std::to_string(t) + ", dt=" + std::to_string(dt) + ")"),
        t_(t),
        dt_(dt) {}
  double t() const { return t_; }
  double dt() const { return dt_; }

 private:
  double t_;
  double dt_;
};

}  // namespace entropylab
