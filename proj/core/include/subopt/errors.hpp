#pragma once

#include <stdexcept>
#include <string>

namespace subopt {

// A computation produced a result that fails its own residual or sanity check.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The problem has no solution (unstabilizable plant, infeasible conditions).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A gain violates the structure the interaction graph imposes.
class StructureError : public std::runtime_error {
 public:
  explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subopt
