#include "creg/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "creg/cones.hpp"
#include "creg/parallel.hpp"
#include "creg/projection.hpp"
#include "creg/rng.hpp"
#include "creg/stats.hpp"

namespace creg {

namespace {

bool non_decreasing(const Sequence& x, double tol) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] < x[i - 1] - tol) return false;
  return true;
}

bool non_increasing(const Sequence& x, double tol) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] > x[i - 1] + tol) return false;
  return true;
}

Sequence reversed(const Sequence& x) { return Sequence(x.rbegin(), x.rend()); }

double norm2_diff(const Sequence& a, const Sequence& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// 1-based positions where pred holds, which must form at most two runs
// anchored at the boundaries (low side) or one run (high side).
bool is_boundary_runs(const std::vector<int>& pos, int n) {
  if (pos.empty()) return true;
  std::size_t i = 1;
  while (i < pos.size() && pos[i] == pos[i - 1] + 1) ++i;
  if (pos.front() != 1 && pos.back() != n) return false;
  if (i == pos.size())  // a single run: must touch either end
    return pos.front() == 1 || pos.back() == n;
  // two runs: the first must start at 1, the second must end at n
  if (pos.front() != 1 || pos.back() != n) return false;
  for (std::size_t j = i + 1; j < pos.size(); ++j)
    if (pos[j] != pos[j - 1] + 1) return false;
  return true;
}

bool is_single_run(const std::vector<int>& pos) {
  for (std::size_t j = 1; j < pos.size(); ++j)
    if (pos[j] != pos[j - 1] + 1) return false;
  return true;
}

}  // namespace

TruncationResult truncate_to_band(const Sequence& theta, const Sequence& ref,
                                  double level, bool allow_reversed) {
  if (theta.size() != ref.size())
    throw std::invalid_argument("truncate_to_band: size mismatch");
  if (!(level > 0.0))
    throw std::invalid_argument("truncate_to_band: level must be > 0");
  if (!is_member(theta, ConeSpec::full_concave(), kMembershipTol))
    throw std::domain_error("truncate_to_band: theta must be concave");
  if (!is_member(ref, ConeSpec::full_concave(), kMembershipTol))
    throw std::domain_error("truncate_to_band: reference must be concave");
  if (!non_decreasing(ref, 0.0)) {
    if (allow_reversed && non_increasing(ref, 0.0)) {
      TruncationResult rev =
          truncate_to_band(reversed(theta), reversed(ref), level, false);
      const int n = static_cast<int>(theta.size());
      TruncationResult out;
      out.truncated = reversed(rev.truncated);
      for (int i : rev.s1) out.s1.push_back(n + 1 - i);
      for (int i : rev.s2) out.s2.push_back(n + 1 - i);
      std::sort(out.s1.begin(), out.s1.end());
      std::sort(out.s2.begin(), out.s2.end());
      out.level = rev.level;
      out.lower_clamp = rev.lower_clamp;
      out.upper_clamp = rev.upper_clamp;
      out.m1 = n + 1 - rev.m2 == 0 ? 0 : n + 1 - rev.m2;
      out.m2 = n + 1 - rev.m1;
      return out;
    }
    throw std::domain_error(
        "truncate_to_band: reference must be monotone (non-decreasing, or "
        "non-increasing with allow_reversed)");
  }

  const int n = static_cast<int>(theta.size());
  TruncationResult out;
  out.level = level;
  out.lower_clamp = ref.front() - level;
  out.upper_clamp = ref.back() + level;
  out.truncated.resize(n);
  for (int i = 0; i < n; ++i) {
    if (theta[i] < out.lower_clamp) {
      out.truncated[i] = out.lower_clamp;
      out.s1.push_back(i + 1);
    } else if (theta[i] > out.upper_clamp) {
      out.truncated[i] = out.upper_clamp;
      out.s2.push_back(i + 1);
    } else {
      out.truncated[i] = theta[i];
    }
  }

  // breakpoints: the low-side clamp runs become the outer blocks
  int m1 = 0;
  while (m1 < n && theta[m1] < out.lower_clamp) ++m1;
  int m2 = n + 1;
  while (m2 > m1 + 1 && theta[m2 - 2] < out.lower_clamp) --m2;
  out.m1 = m1;
  out.m2 = m2;
  return out;
}

double check_contractive(const Sequence& theta, const Sequence& ref,
                         const TruncationResult& result) {
  if (theta.size() != ref.size() || theta.size() != result.truncated.size())
    throw std::invalid_argument("check_contractive: size mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double moved = std::abs(theta[i] - result.truncated[i]);
    const double dist = std::abs(theta[i] - ref[i]);
    worst = std::max(worst, moved - dist);
  }
  return worst;
}

std::vector<LevelSetReport> level_set_counts(const Sequence& theta,
                                             const Sequence& ref, double t,
                                             double level) {
  if (theta.size() != ref.size())
    throw std::invalid_argument("level_set_counts: size mismatch");
  if (!(level > 0.0))
    throw std::invalid_argument("level_set_counts: level must be > 0");
  const double dist = norm2_diff(theta, ref);
  if (dist > t * (1.0 + 1e-12) + 1e-12)
    throw std::domain_error(
        "level_set_counts: ||theta - ref|| exceeds the stated radius t");

  const int n = static_cast<int>(theta.size());
  double max_dev = 0.0;
  for (int i = 0; i < n; ++i)
    max_dev = std::max(max_dev, std::abs(theta[i] - ref[i]));
  const int k_mode = mode_index(theta);

  std::vector<LevelSetReport> reports;
  for (int j = 0;; ++j) {
    const double lj = std::ldexp(level, j);  // 2^j * L
    LevelSetReport rep;
    rep.j = j;
    rep.level = lj;
    rep.cap = (t * t) / (lj * lj);

    std::vector<int> low, high;
    for (int i = 0; i < n; ++i) {
      if (std::abs(theta[i] - ref[i]) > lj) ++rep.count_abs;
      if (theta[i] < ref.front() - lj) low.push_back(i + 1);
      if (theta[i] > ref.back() + lj) high.push_back(i + 1);
    }
    rep.count_low = static_cast<int>(low.size());
    rep.count_high = static_cast<int>(high.size());
    rep.count_ok = static_cast<double>(rep.count_abs) <= rep.cap * (1 + 1e-12);

    // low-side exceedances: two boundary windows of length <= cap
    bool low_ok = is_boundary_runs(low, n);
    for (int i : low) {
      const bool in_window = static_cast<double>(i) <= rep.cap * (1 + 1e-12) ||
                             static_cast<double>(n - i) < rep.cap * (1 + 1e-12);
      low_ok = low_ok && in_window;
    }
    rep.low_structure_ok = low_ok;

    // high-side exceedances: one window of radius cap around the mode
    bool high_ok = is_single_run(high);
    for (int i : high) {
      high_ok = high_ok &&
                std::abs(static_cast<double>(i - k_mode)) < rep.cap * (1 + 1e-12);
    }
    rep.high_structure_ok = high_ok;

    reports.push_back(rep);
    if (lj > max_dev) break;
  }
  return reports;
}

TruncationWidthCheck truncation_width_check(const Sequence& ref, int k,
                                            double t, double sigma,
                                            double level, int reps,
                                            int samples_per_rep,
                                            std::uint64_t seed, int threads) {
  if (reps < 2)
    throw std::domain_error("truncation_width_check: reps must be >= 2");
  if (samples_per_rep < 1)
    throw std::domain_error("truncation_width_check: samples_per_rep >= 1");
  if (!(t > 0.0))
    throw std::domain_error("truncation_width_check: t must be > 0");
  const std::size_t n = ref.size();
  const ConeSpec cone = ConeSpec::mode_constrained(k);

  // anchor for shrinking sampled points back into the ball
  const Sequence anchor = project(ref, cone).point;
  Sequence anchor_diff(n);
  for (std::size_t i = 0; i < n; ++i) anchor_diff[i] = anchor[i] - ref[i];
  double d0 = 0.0;
  for (double v : anchor_diff) d0 += v * v;
  d0 = std::sqrt(d0);
  if (d0 > t)
    throw std::domain_error(
        "truncation_width_check: the mode cone does not meet the t-ball");

  std::vector<double> sups(reps, 0.0);
  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    const Sequence z = gaussian_vector(eng, n, sigma);
    double best = 0.0;
    // candidate 1: the ball-supremum argmax of <z, .> itself
    std::vector<Sequence> candidates;
    candidates.push_back(ball_supremum(z, ref, t, cone).argmax);
    // candidates 2..: random cone points shrunk into the ball
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 1; s < samples_per_rep; ++s) {
      Sequence probe(n);
      const double radius = t * std::pow(2.0, -(s % 3));
      for (std::size_t i = 0; i < n; ++i)
        probe[i] = ref[i] + radius * normal(eng);
      Sequence pt = project(probe, cone).point;
      double dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = pt[i] - ref[i];
        dist += d * d;
      }
      dist = std::sqrt(dist);
      if (dist > t) {
        // shrink toward the anchor; stays in the cone by convexity
        double a_lo = 0.0, a_hi = 1.0;
        for (int it = 0; it < 50; ++it) {
          const double a = 0.5 * (a_lo + a_hi);
          double rr = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double ui =
                (1.0 - a) * anchor_diff[i] + a * (pt[i] - ref[i]);
            rr += ui * ui;
          }
          if (rr <= t * t)
            a_lo = a;
          else
            a_hi = a;
        }
        for (std::size_t i = 0; i < n; ++i)
          pt[i] = ref[i] + (1.0 - a_lo) * anchor_diff[i] +
                  a_lo * (pt[i] - ref[i]);
      }
      candidates.push_back(std::move(pt));
    }
    for (const auto& cand : candidates) {
      const TruncationResult tr = truncate_to_band(cand, ref, level);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        v += z[i] * (cand[i] - tr.truncated[i]);
      best = std::max(best, v);
    }
    sups[r] = best;
  });

  const MeanStderr s = summarize(sups);
  TruncationWidthCheck out;
  out.mean = s.mean;
  out.stderr_ = s.stderr_;
  out.budget = t * t / 8.0;
  out.pass = s.mean <= out.budget + 3.0 * s.stderr_;
  return out;
}

}  // namespace creg
