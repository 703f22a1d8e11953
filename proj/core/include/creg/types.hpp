#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace creg {

inline constexpr const char* kToolVersion = "0.1.0";

/// A signal of n real levels on the implicit equispaced grid i = 1..n.
/// Storage is 0-based; every index that appears in a public API (mode
/// positions, block breakpoints, clamp sets) is 1-based to match the
/// grid convention.
using Sequence = std::vector<double>;

/// Thrown when an iterative solver fails to converge. Carries the best
/// iterate seen and its residual so callers can diagnose or salvage.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Sequence best_iterate, double residual,
              int iterations)
      : std::runtime_error(what),
        best_iterate(std::move(best_iterate)),
        residual(residual),
        iterations(iterations) {}

  Sequence best_iterate;
  double residual = 0.0;
  int iterations = 0;
};

void require_finite(const Sequence& x, const char* what);

}  // namespace creg
