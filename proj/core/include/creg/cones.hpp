#pragma once

#include <string>

#include "creg/types.hpp"

namespace creg {

inline constexpr double kMembershipTol = 1e-9;

/// Tagged description of a feasible set of sequences.
///
///  - FullConcave:        non-positive second differences (n >= 3).
///  - ModeConstrained(k): concave with the maximum attained at position k
///                        (1 <= k <= n).
///  - ThreeBlock(m1,m2):  concave separately on [1,m1], [m1+1,m2-1] and
///                        [m2,n]; 0 <= m1 < m2 <= n+1, empty blocks allowed.
///  - ConcaveOrthoAffine: concave and orthogonal to the affine subspace.
///  - BoundedConcave(B):  concave with every |value| <= B.
///
/// A positive `bound` may also be attached to ThreeBlock for bounded
/// three-block sets; elsewhere it must be zero.
struct ConeSpec {
  enum class Kind {
    FullConcave,
    ModeConstrained,
    ThreeBlock,
    ConcaveOrthoAffine,
    BoundedConcave,
  };

  Kind kind = Kind::FullConcave;
  int mode = 0;        // ModeConstrained position, 1-based
  int m1 = 0, m2 = 0;  // ThreeBlock breakpoints
  double bound = 0.0;  // BoundedConcave / bounded ThreeBlock

  static ConeSpec full_concave() { return {}; }
  static ConeSpec mode_constrained(int k) {
    ConeSpec c;
    c.kind = Kind::ModeConstrained;
    c.mode = k;
    return c;
  }
  static ConeSpec three_block(int m1, int m2, double bound = 0.0) {
    ConeSpec c;
    c.kind = Kind::ThreeBlock;
    c.m1 = m1;
    c.m2 = m2;
    c.bound = bound;
    return c;
  }
  static ConeSpec concave_ortho_affine() {
    ConeSpec c;
    c.kind = Kind::ConcaveOrthoAffine;
    return c;
  }
  static ConeSpec bounded_concave(double bound) {
    ConeSpec c;
    c.kind = Kind::BoundedConcave;
    c.bound = bound;
    return c;
  }

  /// True for the kinds that are convex cones (positively homogeneous).
  bool is_cone() const {
    return !(kind == Kind::BoundedConcave ||
             (kind == Kind::ThreeBlock && bound > 0.0));
  }

  std::string describe() const;

  /// Throws std::invalid_argument when parameters are inconsistent with a
  /// length-n sequence.
  void validate(std::size_t n) const;
};

/// Entry j (1-based) is theta_j - 2 theta_{j+1} + theta_{j+2}; a sequence
/// is concave iff every entry is <= 0. Requires n >= 3.
Sequence second_differences(const Sequence& theta);

/// All defining inequalities of `cone` hold within `tol`.
bool is_member(const Sequence& theta, const ConeSpec& cone,
               double tol = kMembershipTol);

/// Least-squares fit of theta by a + b*i over i = 1..n (the projection
/// onto the affine subspace). Idempotent; the residual is orthogonal to
/// both the constant and the linear sequence.
Sequence project_affine(const Sequence& theta);

/// theta minus its affine fit.
Sequence remove_affine(const Sequence& theta);

/// max_i theta_i - min_i theta_i.
double value_range(const Sequence& theta);

/// Smallest 1-based position attaining the maximum of a concave sequence
/// (validated within tol). The returned k satisfies: theta is in the
/// mode-constrained cone at k, the prefix up to k is non-decreasing, and
/// the suffix from k is non-increasing.
int mode_index(const Sequence& theta, double tol = kMembershipTol);

}  // namespace creg
