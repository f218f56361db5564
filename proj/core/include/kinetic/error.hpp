#pragma once

#include <stdexcept>
#include <string>

namespace kinetic {

/// An iterative method hit its iteration cap before reaching the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integral that must be finite was detected to diverge.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinetic
