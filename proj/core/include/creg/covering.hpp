#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "creg/cones.hpp"
#include "creg/types.hpp"

namespace creg {

/// Packing/covering estimates at one (n, B, epsilon) point. Distances are
/// plain Euclidean norms of R^n.
struct EntropyEstimate {
  int n = 0;
  double B = 0.0;
  double epsilon = 0.0;
  long packing_count = 0;  // greedy maximal epsilon-separated set size
  long net_count = 0;      // constructed epsilon-net size (0 = not built)
  double log_packing = 0.0;
  double log_net = 0.0;
};

/// Deterministic member sampler for bounded concave (or bounded
/// three-block) sets: extremal shapes first, then projected Gaussian
/// probes at varied scales. Every emitted point passes is_member.
class BoundedConeSampler {
 public:
  BoundedConeSampler(int n, double B, bool three_block, std::uint64_t seed);

  /// The k-th proposal (deterministic in k for a fixed seed).
  Sequence operator()(long k);

  int size_hint() const { return n_; }

 private:
  int n_;
  double B_;
  bool three_block_;
  std::uint64_t seed_;
  std::vector<Sequence> extremals_;
};

/// Maximal epsilon-separated set built greedily from the sampler stream.
/// Acceptance stops after `budget` consecutive rejected proposals. The
/// origin is always accepted first.
EntropyEstimate greedy_packing(int n, double B, double epsilon,
                               bool three_block, long budget,
                               std::uint64_t seed);

/// The quantized-interpolation net: values on a grid of step
/// ~ epsilon/sqrt(n) at ~ n^{1/4} sqrt(B/epsilon) evenly spaced knots,
/// repaired to a concave knot profile and linearly interpolated.
struct NetSpec {
  int n = 0;
  double B = 0.0;
  double epsilon = 0.0;
  std::vector<int> knots;  // 1-based, includes 1 and n
  double step = 0.0;       // value grid step
  double grid_bound = 0.0; // largest representable |value|
};

NetSpec make_net_spec(int n, double B, double epsilon);

/// The net point assigned to theta: knot values are rounded to the grid,
/// repaired by their least concave majorant, and interpolated. The result
/// is concave, bounded by B, and within the net's covering radius of theta
/// for members of the bounded concave set.
Sequence canonical_net_point(const Sequence& theta, const NetSpec& spec);

struct NetCount {
  long count = 0;             // distinct canonical images reached
  double max_distance = 0.0;  // largest ||theta - canonical(theta)|| seen
  long samples = 0;
};

/// Counts the distinct net points reachable from members of the bounded
/// concave set, sampling until a full batch adds nothing new or the budget
/// is exhausted. The count converges to the net size from below; the
/// covering property is the max_distance <= epsilon check.
NetCount interpolation_net(int n, double B, double epsilon,
                           long sample_budget, std::uint64_t seed);

struct EntropySlopes {
  std::optional<double> epsilon_slope;  // d log(log M) / d log(1/epsilon)
  std::optional<double> n_slope;        // d log(log M) / d log n
};

/// Least-squares slopes of log(log packing_count) against log(1/epsilon)
/// (rows sharing n and B) and against log(n) (rows sharing B and epsilon).
/// Each fit needs >= 4 usable points with packing_count >= 2; throws when
/// neither direction has them.
EntropySlopes fit_entropy_exponents(const std::vector<EntropyEstimate>& rows);

}  // namespace creg
