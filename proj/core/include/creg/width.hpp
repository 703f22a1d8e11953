#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "creg/cones.hpp"
#include "creg/projection.hpp"
#include "creg/types.hpp"

namespace creg {

/// Monte-Carlo estimate of the localized width curve
/// t |-> E sup { <z, theta - center> : theta in cone, ||theta-center|| <= t }
/// with common noise across the t-grid, so per-replication curves are
/// non-decreasing in t and star-shaped (value/t non-increasing) up to the
/// solver certificate.
struct WidthCurve {
  Sequence center;
  double sigma = 1.0;
  std::vector<double> t_grid;
  std::vector<double> mean;
  std::vector<double> stderr_;
  int reps = 0;
  std::uint64_t seed = 0;
  std::optional<double> fixed_point;  // radius s with fhat(s) <= s^2/2
  std::vector<std::vector<double>> rep_sups;  // [rep][t] supremum values
};

WidthCurve estimate_width(const Sequence& center, const ConeSpec& cone,
                          double sigma, const std::vector<double>& t_grid,
                          int reps, std::uint64_t seed, int threads = 1);

struct ModeWidth {
  double mean = 0.0;
  double stderr_ = 0.0;
  bool feasible = true;  // false when the ball never reaches the mode cone
};

/// E sup over the mode-constrained cone at position k intersected with the
/// t-ball. The center is required to be monotone concave unless
/// allow_nonmonotone is set.
ModeWidth mode_restricted_width(const Sequence& center, int k, double sigma,
                                double t, int reps, std::uint64_t seed,
                                bool allow_nonmonotone = false,
                                int threads = 1);

/// Per-replication suprema for a whole mode range at fixed t with the same
/// noise stream as estimate_width. Row r holds sup over mode k = 1..n;
/// -inf marks an unreachable mode cone.
std::vector<std::vector<double>> mode_supremum_samples(
    const Sequence& center, double sigma, double t, int reps,
    std::uint64_t seed, int threads = 1);

/// Smallest radius s (within a relative bracket of `rel_bracket`) where
/// curve(s) <= s^2/2, found by bisection on curve(t)/t - t/2; valid
/// because the curve is star-shaped. Throws std::range_error when the
/// crossing is outside [lo, hi].
double find_fixed_point(const std::function<double(double)>& curve, double lo,
                        double hi, double rel_bracket = 1e-2);

/// Width evaluator with frozen common noise, suitable for
/// find_fixed_point. For a conic feasible set centred at the origin the
/// curve is exactly linear in t and is evaluated from a single projection
/// pass.
std::function<double(double)> make_width_evaluator(const Sequence& center,
                                                   const ConeSpec& cone,
                                                   double sigma, int reps,
                                                   std::uint64_t seed,
                                                   int threads = 1);

/// Inputs of the closed-form width upper bounds. C is the universal
/// constant treated as a calibration input; V_term is the relevant range
/// term; x is the tail parameter where one applies.
struct WidthBoundParams {
  double C = 1.0;
  double sigma = 1.0;
  int n = 1;
  double V_term = 0.0;
  double x = 0.0;
};

/// C sigma [ (V+sigma)^{1/4} n^{1/8} t^{3/4} + sqrt(log n) t ] + t^2/4.
double width_bound_concave(double t, const WidthBoundParams& p);

/// C sigma (V+sigma)^{1/4} n^{1/8} t^{3/4} + 2 sigma sqrt(2 log(n+2)) t
/// + t^2/8; holds uniformly over the mode position.
double width_bound_fixed_mode(double t, const WidthBoundParams& p);

/// C sigma [ (V+sigma)^{1/4} n^{1/8} t^{3/4} + sqrt(log n) t ] + t^2/8,
/// the union-over-modes form with a single sigma prefactor on both terms.
double width_bound_mode_union(double t, const WidthBoundParams& p);

/// max_mean + 2 a (sqrt(2 log n) + sqrt(2 pi)): expected-maximum bound for
/// n variables with subgaussian upper tails at scale a.
double subgaussian_max_bound(int n, double a, double max_mean = 0.0);

struct SubgaussianCheck {
  double empirical_mean = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  bool pass = false;  // empirical_mean <= bound + 3 stderr
};

SubgaussianCheck check_subgaussian_max(int n, double a, int reps,
                                       std::uint64_t seed, int threads = 1);

}  // namespace creg
