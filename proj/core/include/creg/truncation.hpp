#pragma once

#include <cstdint>
#include <vector>

#include "creg/types.hpp"

namespace creg {

/// Default clamp level as a multiple of the noise scale.
inline constexpr double kDefaultClampMultiple = 128.0;

/// Result of clamping a concave sequence into the band
/// [ref_1 - L, ref_n + L] around a monotone reference:
///  - s1 holds the positions pushed up to the lower clamp (at most two
///    boundary runs),
///  - s2 holds the positions pulled down to the upper clamp (one run
///    containing the mode),
///  - the clamped sequence splits into at most three concave blocks with
///    breakpoints (m1, m2).
/// Indices are 1-based.
struct TruncationResult {
  Sequence truncated;
  std::vector<int> s1;
  std::vector<int> s2;
  double level = 0.0;        // L
  double lower_clamp = 0.0;  // ref_1 - L
  double upper_clamp = 0.0;  // ref_n + L
  int m1 = 0, m2 = 0;        // three-block breakpoints certified for truncated
};

/// Clamp theta into [ref_1 - L, ref_n + L]. theta must be concave; ref
/// must be non-decreasing concave (pass allow_reversed to handle a
/// non-increasing ref by index reversal).
TruncationResult truncate_to_band(const Sequence& theta, const Sequence& ref,
                                  double level, bool allow_reversed = false);

/// max_i (|theta_i - truncated_i| - |theta_i - ref_i|); always <= 0: the
/// clamp moves every entry toward the reference.
double check_contractive(const Sequence& theta, const Sequence& ref,
                         const TruncationResult& result);

/// Per-level deviation counts against their Chebyshev-type caps.
/// Level j covers deviations above 2^j * L; the cap is v_j = t^2 / (4^j L^2).
/// The structural fields certify that the low-side exceedances live in two
/// boundary windows of length v_j and the high-side exceedances in a
/// window of radius v_j around the mode.
struct LevelSetReport {
  int j = 0;
  double level = 0.0;     // 2^j * L
  double cap = 0.0;       // v_j
  int count_abs = 0;      // |{ i : |theta_i - ref_i| > level }|
  int count_low = 0;      // |{ i : theta_i < ref_1 - level }|
  int count_high = 0;     // |{ i : theta_i > ref_n + level }|
  bool count_ok = false;       // count_abs <= cap
  bool low_structure_ok = false;
  bool high_structure_ok = false;
};

/// Requires ||theta - ref|| <= t. Levels stop once 2^j L exceeds the
/// largest observed deviation.
std::vector<LevelSetReport> level_set_counts(const Sequence& theta,
                                             const Sequence& ref, double t,
                                             double level);

/// One-sided Monte-Carlo check that the expected truncation-error width
/// E sup_theta <z, theta - clamp(theta)> stays below t^2/8 at the default
/// clamp level. The supremum is approximated from sampled ball members, so
/// the estimate is a lower bound of the true supremum; pass means the
/// sampled mean stays below t^2/8 + 3 stderr.
struct TruncationWidthCheck {
  double mean = 0.0;
  double stderr_ = 0.0;
  double budget = 0.0;  // t^2 / 8
  bool pass = false;
};

TruncationWidthCheck truncation_width_check(const Sequence& ref, int k,
                                            double t, double sigma,
                                            double level, int reps,
                                            int samples_per_rep,
                                            std::uint64_t seed,
                                            int threads = 1);

}  // namespace creg
