#include <cmath>
#include <random>

#include "creg/cones.hpp"
#include "creg/projection.hpp"
#include "creg/rng.hpp"
#include "creg/width.hpp"
#include "doctest.h"

using namespace creg;

TEST_CASE("width curve basics at the apex") {
  // singleton grid at t = 0
  const Sequence zeros(8, 0.0);
  WidthCurve c0 = estimate_width(zeros, ConeSpec::full_concave(), 1.0, {0.0},
                                 16, 42);
  CHECK(c0.mean[0] == 0.0);
  CHECK(c0.stderr_[0] == 0.0);

  // at the apex the curve is linear: value(t)/t equals the Monte-Carlo
  // mean of the projected-noise norm
  WidthCurve c = estimate_width(zeros, ConeSpec::full_concave(), 1.0,
                                {0.5, 1.0, 2.0, 4.0}, 64, 42);
  const double slope = c.mean[1] / 1.0;
  for (std::size_t ti = 0; ti < c.t_grid.size(); ++ti)
    CHECK(c.mean[ti] ==
          doctest::Approx(slope * c.t_grid[ti]).epsilon(1e-12));

  // direct projection-norm Monte Carlo with the same streams
  std::vector<double> norms;
  for (int r = 0; r < 64; ++r) {
    auto eng = replication_engine(42, r);
    const Sequence z = gaussian_vector(eng, 8, 1.0);
    double s = 0;
    for (double v : project(z, ConeSpec::full_concave()).point) s += v * v;
    norms.push_back(std::sqrt(s));
  }
  double mean = 0;
  for (double v : norms) mean += v;
  mean /= norms.size();
  CHECK(slope == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("n = 3 closed form: E||proj z||^2 = 2.5 sigma^2") {
  // K_3 is a single halfspace; the projected-noise norm has a closed
  // second moment, so the linear width slope is below sigma*sqrt(2.5)
  const Sequence zeros(3, 0.0);
  const double sigma = 1.0;
  WidthCurve c = estimate_width(zeros, ConeSpec::full_concave(), sigma, {1.0},
                                4000, 7);
  CHECK(c.mean[0] <= sigma * std::sqrt(2.5) + 3.0 * c.stderr_[0]);

  // and the second moment itself matches 2.5 sigma^2 within noise
  double m2 = 0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    auto eng = replication_engine(7, r);
    const Sequence z = gaussian_vector(eng, 3, sigma);
    double s = 0;
    for (double v : project(z, ConeSpec::full_concave()).point) s += v * v;
    m2 += s;
  }
  m2 /= reps;
  CHECK(m2 == doctest::Approx(2.5 * sigma * sigma).epsilon(0.06));
}

TEST_CASE("pathwise monotone and star-shaped curves with a real center") {
  const int n = 24;
  Sequence center(n);
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * i / (n - 1.0) - 1.0;
    center[i] = 1.0 - x * x;
  }
  WidthCurve c = estimate_width(center, ConeSpec::full_concave(), 1.0,
                                {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}, 24, 11);
  for (const auto& row : c.rep_sups) {
    for (std::size_t ti = 1; ti < row.size(); ++ti) {
      const double slack = 1e-6 * (1.0 + std::abs(row[ti]));
      CHECK(row[ti] >= row[ti - 1] - slack);
      CHECK(row[ti - 1] / c.t_grid[ti - 1] >=
            row[ti] / c.t_grid[ti] - slack);
    }
    for (double v : row) CHECK(v >= 0.0);
  }
}

TEST_CASE("mode-restricted widths stay below the full width pathwise") {
  const int n = 6;
  const Sequence center(n, 0.0);
  const double t = 2.0, sigma = 1.0;
  const int reps = 12;
  auto per_mode = mode_supremum_samples(center, sigma, t, reps, 5);
  WidthCurve full =
      estimate_width(center, ConeSpec::full_concave(), sigma, {t}, reps, 5);
  for (int r = 0; r < reps; ++r) {
    double best = -1e300;
    for (double v : per_mode[r]) best = std::max(best, v);
    CHECK(best <= full.rep_sups[r][0] + 1e-6 * (1 + std::abs(best)));
    // union over modes reproduces the full supremum
    CHECK(best >= full.rep_sups[r][0] - 1e-6 * (1 + std::abs(best)));
  }
}

TEST_CASE("mode width: degenerate radius and monotone-center guard") {
  const Sequence inc = {0.0, 1.0, 1.8, 2.4};  // non-decreasing concave
  const ModeWidth w0 = mode_restricted_width(inc, 4, 1.0, 0.0, 8, 3);
  CHECK(w0.feasible);
  CHECK(w0.mean == 0.0);

  // a far-away mode cone is unreachable at tiny radius
  const ModeWidth unreachable = mode_restricted_width(inc, 1, 1.0, 0.05, 8, 3);
  CHECK(!unreachable.feasible);

  const Sequence bump = {0.0, 1.0, 0.0};
  CHECK_THROWS_AS(mode_restricted_width(bump, 2, 1.0, 1.0, 8, 3),
                  std::invalid_argument);
  CHECK_NOTHROW(mode_restricted_width(bump, 2, 1.0, 1.0, 8, 3, true));
}

TEST_CASE("small-ball mode width matches the full width at an end mode") {
  // center strictly increasing concave with mode at n: for small t the
  // ball never leaves the mode-n cone
  const Sequence center = {0.0, 0.9, 1.6, 2.1};
  const double t = 0.05, sigma = 1.0;
  const int reps = 10;
  const ModeWidth m = mode_restricted_width(center, 4, sigma, t, reps, 9);
  WidthCurve full =
      estimate_width(center, ConeSpec::full_concave(), sigma, {t}, reps, 9);
  CHECK(m.feasible);
  CHECK(m.mean == doctest::Approx(full.mean[0]).epsilon(1e-6));
}

TEST_CASE("fixed point of a planted linear curve") {
  auto curve = [](double t) { return 3.0 * t; };
  const double s = find_fixed_point(curve, 0.5, 100.0);
  CHECK(s == doctest::Approx(6.0).epsilon(2e-2));
  CHECK_THROWS_AS(find_fixed_point(curve, 7.0, 100.0), std::range_error);
  CHECK_THROWS_AS(find_fixed_point(curve, 0.001, 1.0), std::range_error);
}

TEST_CASE("fixed point of the apex width equals twice the projected norm") {
  const int n = 12;
  const Sequence zeros(n, 0.0);
  auto curve = make_width_evaluator(zeros, ConeSpec::full_concave(), 1.0, 200, 21);
  const double s = find_fixed_point(curve, 0.05, 100.0);
  // independent Monte Carlo of 2 E||proj z|| with the same streams
  double mean = 0;
  for (int r = 0; r < 200; ++r) {
    auto eng = replication_engine(21, r);
    const Sequence z = gaussian_vector(eng, n, 1.0);
    double sq = 0;
    for (double v : project(z, ConeSpec::full_concave()).point) sq += v * v;
    mean += std::sqrt(sq);
  }
  mean /= 200;
  CHECK(s == doctest::Approx(2.0 * mean).epsilon(2e-2));
}

TEST_CASE("closed-form width bounds") {
  WidthBoundParams p;
  p.C = 1.0;
  p.sigma = 1.0;
  p.n = 1;
  p.V_term = 0.0;
  CHECK(width_bound_concave(0.0, p) == 0.0);
  // n = 1: log term vanishes, so the bound is t^{3/4} + t^2/4
  for (double t : {0.5, 1.0, 2.0, 7.5})
    CHECK(width_bound_concave(t, p) ==
          doctest::Approx(std::pow(t, 0.75) + t * t / 4).epsilon(1e-12));

  // doubling V + sigma multiplies the leading term by 2^{1/4}
  WidthBoundParams q = p;
  q.V_term = 1.0;  // V + sigma = 2
  const double t = 3.0;
  const double lead_p = width_bound_concave(t, p) - t * t / 4;
  const double lead_q = width_bound_concave(t, q) - t * t / 4;
  CHECK(lead_q == doctest::Approx(std::pow(2.0, 0.25) * lead_p).epsilon(1e-12));

  // fixed-mode bound at n = 2: linear term is 2 sigma sqrt(2 log 4) t
  WidthBoundParams r;
  r.C = 0.0;
  r.sigma = 1.5;
  r.n = 2;
  r.V_term = 0.0;
  CHECK(width_bound_fixed_mode(1.0, r) ==
        doctest::Approx(2 * 1.5 * std::sqrt(2 * std::log(4.0)) + 1.0 / 8)
            .epsilon(1e-12));

  // all three bounds increase in t
  WidthBoundParams g;
  g.C = 0.7;
  g.sigma = 2.0;
  g.n = 64;
  g.V_term = 1.0;
  double prev_a = 0, prev_b = 0, prev_c = 0;
  for (double tt = 0.25; tt < 20; tt *= 2) {
    CHECK(width_bound_concave(tt, g) > prev_a);
    CHECK(width_bound_fixed_mode(tt, g) > prev_b);
    CHECK(width_bound_mode_union(tt, g) > prev_c);
    prev_a = width_bound_concave(tt, g);
    prev_b = width_bound_fixed_mode(tt, g);
    prev_c = width_bound_mode_union(tt, g);
  }
}

TEST_CASE("subgaussian maximum bound") {
  CHECK(subgaussian_max_bound(1, 1.0) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * 3.14159265358979323846))
            .epsilon(1e-12));
  // linear in the scale a
  CHECK(subgaussian_max_bound(50, 3.0) ==
        doctest::Approx(3.0 * subgaussian_max_bound(50, 1.0)).epsilon(1e-12));

  for (int n : {1, 10, 1000}) {
    const SubgaussianCheck chk = check_subgaussian_max(n, 1.0, 2000, 13);
    CHECK(chk.pass);
    CHECK(chk.empirical_mean <= chk.bound);
  }
  // sanity scale at n = 1000: the empirical mean maximum sits just below
  // the asymptotic sqrt(2 log 1000) ~ 3.72, far below the bound ~ 12.45
  const SubgaussianCheck big = check_subgaussian_max(1000, 1.0, 3000, 29);
  CHECK(big.empirical_mean > 3.0);
  CHECK(big.empirical_mean < std::sqrt(2.0 * std::log(1000.0)));
  CHECK(big.bound == doctest::Approx(12.447).epsilon(1e-3));
}

TEST_CASE("width estimation validates its inputs") {
  const Sequence zeros(6, 0.0);
  CHECK_THROWS_AS(estimate_width(zeros, ConeSpec::full_concave(), 1.0, {1.0},
                                 0, 1),
                  std::domain_error);
  CHECK_THROWS_AS(estimate_width(zeros, ConeSpec::full_concave(), 1.0,
                                 {1.0, 0.5}, 4, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_width({0, 0, 1}, ConeSpec::full_concave(), 1.0,
                                 {1.0}, 4, 1),
                  std::invalid_argument);
}
