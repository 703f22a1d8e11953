#include "creg/width.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "creg/parallel.hpp"
#include "creg/rng.hpp"
#include "creg/stats.hpp"

namespace creg {

namespace {

double norm2(const Sequence& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

bool all_zero(const Sequence& x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty())
    throw std::invalid_argument("width: t_grid must be non-empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0)
      throw std::invalid_argument("width: t_grid entries must be >= 0");
    if (i > 0 && t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("width: t_grid must be increasing");
  }
}

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

}  // namespace

WidthCurve estimate_width(const Sequence& center, const ConeSpec& cone,
                          double sigma, const std::vector<double>& t_grid,
                          int reps, std::uint64_t seed, int threads) {
  if (reps < 1) throw std::domain_error("estimate_width: reps must be >= 1");
  if (!(sigma > 0.0))
    throw std::invalid_argument("estimate_width: sigma must be > 0");
  check_grid(t_grid);
  if (!is_member(center, cone, 1e-7))
    throw std::invalid_argument("estimate_width: center not in cone");

  const std::size_t n = center.size();
  const bool conic_origin = cone.is_cone() && all_zero(center);

  WidthCurve curve;
  curve.center = center;
  curve.sigma = sigma;
  curve.t_grid = t_grid;
  curve.reps = reps;
  curve.seed = seed;
  curve.rep_sups.assign(reps, std::vector<double>(t_grid.size(), 0.0));

  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    const Sequence z = gaussian_vector(eng, n, sigma);
    auto& row = curve.rep_sups[r];
    if (conic_origin) {
      // sup over cone cap tB of <z,theta> = t ||proj z||: one projection
      // serves the whole grid and the curve is exactly linear in t
      const double pn = norm2(project(z, cone).point);
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
        row[ti] = t_grid[ti] * pn;
    } else {
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        if (t_grid[ti] == 0.0) {
          row[ti] = 0.0;
          continue;
        }
        row[ti] = max_linear_over_ball(z, center, t_grid[ti], cone).value;
      }
    }
  });

  curve.mean.resize(t_grid.size());
  curve.stderr_.resize(t_grid.size());
  std::vector<double> column(reps);
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    for (int r = 0; r < reps; ++r) column[r] = curve.rep_sups[r][ti];
    const MeanStderr s = summarize(column);
    curve.mean[ti] = s.mean;
    curve.stderr_[ti] = s.stderr_;
  }
  return curve;
}

ModeWidth mode_restricted_width(const Sequence& center, int k, double sigma,
                                double t, int reps, std::uint64_t seed,
                                bool allow_nonmonotone, int threads) {
  if (reps < 1)
    throw std::domain_error("mode_restricted_width: reps must be >= 1");
  if (t < 0.0)
    throw std::domain_error("mode_restricted_width: t must be >= 0");
  if (!allow_nonmonotone) {
    const bool concave = is_member(center, ConeSpec::full_concave(), 1e-7);
    const bool monotone =
        non_decreasing(center, 1e-12) || non_increasing(center, 1e-12);
    if (!concave || !monotone)
      throw std::invalid_argument(
          "mode_restricted_width: center must be monotone concave "
          "(set allow_nonmonotone to override)");
  }

  const ConeSpec cone = ConeSpec::mode_constrained(k);
  // reachability does not depend on the noise draw
  {
    const ProjectionResult pr = project(center, cone);
    Sequence u(center.size());
    for (std::size_t i = 0; i < center.size(); ++i)
      u[i] = pr.point[i] - center[i];
    if (norm2(u) > t * (1.0 + 1e-12) + 1e-13 * (1.0 + norm2(center)))
      return {0.0, 0.0, false};
  }

  std::vector<double> sups(reps);
  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    const Sequence z = gaussian_vector(eng, center.size(), sigma);
    sups[r] = ball_supremum(z, center, t, cone).value;
  });
  const MeanStderr s = summarize(sups);
  return {s.mean, s.stderr_, true};
}

std::vector<std::vector<double>> mode_supremum_samples(
    const Sequence& center, double sigma, double t, int reps,
    std::uint64_t seed, int threads) {
  const std::size_t n = center.size();
  std::vector<std::vector<double>> out(
      reps, std::vector<double>(n, -std::numeric_limits<double>::infinity()));
  std::vector<char> reachable(n, 0);
  for (std::size_t k = 1; k <= n; ++k) {
    const ProjectionResult pr =
        project(center, ConeSpec::mode_constrained(static_cast<int>(k)));
    Sequence u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = pr.point[i] - center[i];
    reachable[k - 1] =
        norm2(u) <= t * (1.0 + 1e-12) + 1e-13 * (1.0 + norm2(center));
  }
  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    const Sequence z = gaussian_vector(eng, n, sigma);
    for (std::size_t k = 1; k <= n; ++k) {
      if (!reachable[k - 1]) continue;
      out[r][k - 1] =
          ball_supremum(z, center, t,
                        ConeSpec::mode_constrained(static_cast<int>(k)))
              .value;
    }
  });
  return out;
}

double find_fixed_point(const std::function<double(double)>& curve, double lo,
                        double hi, double rel_bracket) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("find_fixed_point: need 0 < lo < hi");
  auto excess = [&](double t) { return curve(t) / t - 0.5 * t; };
  double g_lo = excess(lo);
  if (g_lo <= 0.0)
    throw std::range_error(
        "find_fixed_point: curve(lo) <= lo^2/2 already; the crossing lies "
        "below the search range (lo = " +
        std::to_string(lo) + ")");
  double g_hi = excess(hi);
  if (g_hi > 0.0)
    throw std::range_error(
        "find_fixed_point: curve(hi) > hi^2/2; the crossing lies above the "
        "search range (hi = " +
        std::to_string(hi) + ")");
  double a = lo, b = hi;
  while (b / a > 1.0 + rel_bracket) {
    const double mid = std::sqrt(a * b);
    if (excess(mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  return b;
}

std::function<double(double)> make_width_evaluator(const Sequence& center,
                                                   const ConeSpec& cone,
                                                   double sigma, int reps,
                                                   std::uint64_t seed,
                                                   int threads) {
  if (reps < 1)
    throw std::domain_error("make_width_evaluator: reps must be >= 1");
  if (cone.is_cone() && all_zero(center)) {
    // linear curve: one projection per replication, frozen up front
    std::vector<double> norms(reps);
    const std::size_t n = center.size();
    parallel_for_index(static_cast<std::size_t>(reps), threads,
                       [&](std::size_t r) {
                         auto eng = replication_engine(seed, r);
                         const Sequence z = gaussian_vector(eng, n, sigma);
                         norms[r] = norm2(project(z, cone).point);
                       });
    const double slope = summarize(norms).mean;
    return [slope](double t) { return slope * t; };
  }
  Sequence c = center;
  ConeSpec cs = cone;
  return [c, cs, sigma, reps, seed, threads](double t) {
    if (t <= 0.0) return 0.0;
    std::vector<double> sups(reps);
    parallel_for_index(static_cast<std::size_t>(reps), threads,
                       [&](std::size_t r) {
                         auto eng = replication_engine(seed, r);
                         const Sequence z = gaussian_vector(eng, c.size(), sigma);
                         sups[r] = max_linear_over_ball(z, c, t, cs).value;
                       });
    return summarize(sups).mean;
  };
}

double width_bound_concave(double t, const WidthBoundParams& p) {
  if (t < 0.0) throw std::domain_error("width_bound_concave: t >= 0 required");
  if (p.n < 1) throw std::invalid_argument("width bound: n >= 1 required");
  const double head = p.C * p.sigma *
                      (std::pow(p.V_term + p.sigma, 0.25) *
                           std::pow(static_cast<double>(p.n), 0.125) *
                           std::pow(t, 0.75) +
                       std::sqrt(std::log(static_cast<double>(p.n))) * t);
  return head + t * t / 4.0;
}

double width_bound_fixed_mode(double t, const WidthBoundParams& p) {
  if (t < 0.0)
    throw std::domain_error("width_bound_fixed_mode: t >= 0 required");
  if (p.n < 1) throw std::invalid_argument("width bound: n >= 1 required");
  return p.C * p.sigma * std::pow(p.V_term + p.sigma, 0.25) *
             std::pow(static_cast<double>(p.n), 0.125) * std::pow(t, 0.75) +
         2.0 * p.sigma * std::sqrt(2.0 * std::log(static_cast<double>(p.n + 2))) *
             t +
         t * t / 8.0;
}

double width_bound_mode_union(double t, const WidthBoundParams& p) {
  if (t < 0.0)
    throw std::domain_error("width_bound_mode_union: t >= 0 required");
  if (p.n < 1) throw std::invalid_argument("width bound: n >= 1 required");
  const double head = p.C * p.sigma *
                      (std::pow(p.V_term + p.sigma, 0.25) *
                           std::pow(static_cast<double>(p.n), 0.125) *
                           std::pow(t, 0.75) +
                       std::sqrt(std::log(static_cast<double>(p.n))) * t);
  return head + t * t / 8.0;
}

double subgaussian_max_bound(int n, double a, double max_mean) {
  if (n < 1) throw std::invalid_argument("subgaussian_max_bound: n >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("subgaussian_max_bound: a > 0");
  const double pi = 3.14159265358979323846;
  return max_mean +
         2.0 * a * (std::sqrt(2.0 * std::log(static_cast<double>(n))) +
                    std::sqrt(2.0 * pi));
}

SubgaussianCheck check_subgaussian_max(int n, double a, int reps,
                                       std::uint64_t seed, int threads) {
  if (reps < 2)
    throw std::domain_error("check_subgaussian_max: reps must be >= 2");
  std::vector<double> maxima(reps);
  parallel_for_index(static_cast<std::size_t>(reps), threads,
                     [&](std::size_t r) {
                       auto eng = replication_engine(seed, r);
                       const Sequence z =
                           gaussian_vector(eng, static_cast<std::size_t>(n), a);
                       maxima[r] = *std::max_element(z.begin(), z.end());
                     });
  const MeanStderr s = summarize(maxima);
  SubgaussianCheck out;
  out.empirical_mean = s.mean;
  out.stderr_ = s.stderr_;
  out.bound = subgaussian_max_bound(n, a);
  out.pass = s.mean <= out.bound + 3.0 * s.stderr_;
  return out;
}

}  // namespace creg
