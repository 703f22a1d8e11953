#pragma once

#include <vector>

#include "creg/cones.hpp"
#include "creg/types.hpp"

namespace creg {

/// One inequality sum_t coef[t] * theta[start + t] <= rhs touching at most
/// three consecutive coordinates (0-based start).
struct LinearConstraint {
  int start = 0;
  int len = 0;
  double coef[3] = {0, 0, 0};
  double rhs = 0.0;
};

/// The banded inequality description of a cone, sorted by leftmost
/// coordinate. This is the canonical constraint order used for dual
/// vectors. For ModeConstrained the second difference centred at the mode
/// is omitted: it is implied by the two first-difference rows that pin the
/// mode, and dropping it keeps every subset of rows linearly independent.
/// ConcaveOrthoAffine maps to the FullConcave rows (the affine part is
/// split off before solving).
std::vector<LinearConstraint> cone_constraints(std::size_t n,
                                               const ConeSpec& cone);

struct ProjectionResult {
  Sequence point;
  std::vector<double> duals;  // one per cone_constraints row, >= 0
  double kkt_residual = 0.0;  // max violation across the KKT conditions
  int iterations = 0;
};

inline constexpr double kDefaultSolverTol = 1e-8;

/// Euclidean projection of y onto the cone, certified by KKT: the point is
/// feasible within tol, the residual y - point equals the nonnegative
/// combination of active constraint rows (exactly, by construction), and
/// active rows are tight. Throws SolverError past the pivot cap.
ProjectionResult project(const Sequence& y, const ConeSpec& cone,
                         double tol = kDefaultSolverTol);

/// Projection onto the concave cone intersected with the orthogonal
/// complement of the affine subspace, computed by splitting off the affine
/// part first. The identity against project(y) - project_affine(y) is a
/// tested invariant, not an assumption.
ProjectionResult project_ortho_affine(const Sequence& y,
                                      double tol = kDefaultSolverTol);

struct BallMaxResult {
  double value = 0.0;
  Sequence argmax;
  double certificate = 0.0;  // duality-gap bound on the reported value
  int iterations = 0;
  bool feasible = true;  // false when the ball misses the cone entirely
};

/// sup <z, theta - center> over {theta in cone, ||theta - center|| <= t},
/// solved by Lagrangian bisection: theta(lambda) = project(center +
/// z/lambda) has a radius non-increasing in lambda, so lambda is bisected
/// until the duality gap certifies the value within tol * (|value| + 1).
/// Requires center in cone (value >= 0 since center is feasible).
BallMaxResult max_linear_over_ball(const Sequence& z, const Sequence& center,
                                   double t, const ConeSpec& cone,
                                   double tol = kDefaultSolverTol);

/// Same supremum without requiring center in cone; the feasible set may
/// then be empty (feasible = false) and the value may be negative.
/// Shrinkage targets the cone projection of the center.
BallMaxResult ball_supremum(const Sequence& z, const Sequence& center,
                            double t, const ConeSpec& cone,
                            double tol = kDefaultSolverTol);

}  // namespace creg
