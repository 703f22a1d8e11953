#include <algorithm>
#include <cmath>
#include <random>

#include "creg/cones.hpp"
#include "creg/truncation.hpp"
#include "doctest.h"

using namespace creg;

namespace {

// Exactly representable concave sequences:increments are dyadic
// rationals (multiples of 2^-20 within a few units), partial sums of a few
// dozen of them fit in 53 bits, so concavity comparisons are exact.
double dyadic(std::mt19937_64& eng, double lo, double hi) {
  const double step = std::ldexp(1.0, -20);
  const long range = static_cast<long>((hi - lo) / step);
  return lo + step * static_cast<double>(static_cast<long>(eng() % range));
}

Sequence exact_concave(std::mt19937_64& eng, int n) {
  std::vector<double> inc(n - 1);
  for (auto& d : inc) d = dyadic(eng, -1.0, 1.0);
  std::sort(inc.begin(), inc.end(), std::greater<>());
  Sequence s(n, dyadic(eng, -2.0, 2.0));
  for (int i = 1; i < n; ++i) s[i] = s[i - 1] + inc[i - 1];
  return s;
}

Sequence exact_monotone_concave(std::mt19937_64& eng, int n) {
  std::vector<double> inc(n - 1);
  for (auto& d : inc) d = dyadic(eng, 0.0, 1.0);
  std::sort(inc.begin(), inc.end(), std::greater<>());
  Sequence s(n, dyadic(eng, -2.0, 2.0));
  for (int i = 1; i < n; ++i) s[i] = s[i - 1] + inc[i - 1];
  return s;
}

double norm2_diff(const Sequence& a, const Sequence& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Sequence reversed_copy(const Sequence& s) {
  return Sequence(s.rbegin(), s.rend());
}

}  // namespace

TEST_CASE("clamp example from first principles") {
  const Sequence ref = {0, 1, 2};       // non-decreasing concave
  const Sequence theta = {-3, 5, 0};    // concave, mode 2
  const TruncationResult tr = truncate_to_band(theta, ref, 1.0);
  CHECK(tr.lower_clamp == -1.0);
  CHECK(tr.upper_clamp == 3.0);
  CHECK(tr.truncated == Sequence{-1, 3, 0});
  CHECK(tr.s1 == std::vector<int>{1});
  CHECK(tr.s2 == std::vector<int>{2});
  CHECK(is_member(tr.truncated, ConeSpec::three_block(tr.m1, tr.m2), 0.0));
  CHECK(check_contractive(theta, ref, tr) == doctest::Approx(-1.0));
}

TEST_CASE("no clamping when theta stays inside the band") {
  const Sequence ref = {0, 1, 2};
  const Sequence theta = {-0.5, 1.5, 1.0};
  REQUIRE(is_member(theta, ConeSpec::full_concave(), 0.0));
  const TruncationResult tr = truncate_to_band(theta, ref, 1.0);
  CHECK(tr.truncated == theta);
  CHECK(tr.s1.empty());
  CHECK(tr.s2.empty());
  CHECK(check_contractive(theta, ref, tr) <= 0.0);
}

TEST_CASE("validation of the inputs") {
  CHECK_THROWS_AS(truncate_to_band({0, 1, 0}, {0, 1, 0}, 1.0),
                  std::domain_error);  // reference not monotone
  CHECK_THROWS_AS(truncate_to_band({0, 0, 1}, {0, 1, 2}, 1.0),
                  std::domain_error);  // theta not concave
  CHECK_THROWS_AS(truncate_to_band({0, 1, 0}, {0, 1, 2}, 0.0),
                  std::invalid_argument);
  // non-increasing reference needs the symmetric variant
  CHECK_THROWS_AS(truncate_to_band({0, 1, 0}, {2, 1, 0}, 1.0),
                  std::domain_error);
  CHECK_NOTHROW(truncate_to_band({0, 1, 0}, {2, 1, 0}, 1.0, true));
}

TEST_CASE("reversal symmetry") {
  std::mt19937_64 eng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + static_cast<int>(eng() % 20);
    const Sequence theta = exact_concave(eng, n);
    const Sequence ref = exact_monotone_concave(eng, n);
    const double L = dyadic(eng, 0.25, 4.0);
    const TruncationResult fwd = truncate_to_band(theta, ref, L);
    const TruncationResult rev = truncate_to_band(
        reversed_copy(theta), reversed_copy(ref), L, /*allow_reversed=*/true);
    CHECK(reversed_copy(rev.truncated) == fwd.truncated);
  }
}

TEST_CASE("fuzzed clamp properties hold exactly") {
  std::mt19937_64 eng(77);
  int clamped_cases = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const int n = 3 + static_cast<int>(eng() % 30);
    const Sequence theta = exact_concave(eng, n);
    const Sequence ref = exact_monotone_concave(eng, n);
    const double L = dyadic(eng, 0.25, 4.0);
    const TruncationResult tr = truncate_to_band(theta, ref, L);

    // band containment
    for (double v : tr.truncated) {
      CHECK(v >= tr.lower_clamp);
      CHECK(v <= tr.upper_clamp);
    }
    // contractivity
    CHECK(check_contractive(theta, ref, tr) <= 0.0);
    // three concave blocks at the certified breakpoints
    CHECK(is_member(tr.truncated, ConeSpec::three_block(tr.m1, tr.m2), 0.0));
    // the clamp sets are boundary runs / a mode run
    if (!tr.s1.empty() || !tr.s2.empty()) ++clamped_cases;
    for (std::size_t i = 1; i < tr.s2.size(); ++i)
      CHECK(tr.s2[i] == tr.s2[i - 1] + 1);
    if (!tr.s2.empty()) {
      const int k = mode_index(theta);
      CHECK(tr.s2.front() <= k);
      CHECK(tr.s2.back() >= k);
    }
  }
  CHECK(clamped_cases > 200);  // the fuzz must actually exercise clamping
}

TEST_CASE("level-set counts stay under their caps") {
  // worked example: distances (3, 4, 2), norm sqrt(29)
  const Sequence ref = {0, 1, 2};
  const Sequence theta = {-3, 5, 0};
  const double t = std::sqrt(29.0);
  const auto reports = level_set_counts(theta, ref, t, 1.0);
  REQUIRE(reports.size() >= 3);
  CHECK(reports[0].count_abs == 3);  // all deviations exceed 1
  CHECK(reports[2].count_abs == 0);  // none exceeds 4
  CHECK(reports[2].cap == doctest::Approx(29.0 / 16.0));
  for (const auto& r : reports) {
    CHECK(r.count_ok);
    CHECK(r.low_structure_ok);
    CHECK(r.high_structure_ok);
  }

  // identical sequences: every count is zero
  const auto zero_reports = level_set_counts(ref, ref, 0.0, 1.0);
  for (const auto& r : zero_reports) CHECK(r.count_abs == 0);

  // norm precondition is enforced
  CHECK_THROWS_AS(level_set_counts(theta, ref, 1.0, 1.0), std::domain_error);
}

TEST_CASE("fuzzed level sets") {
  std::mt19937_64 eng(99);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 3 + static_cast<int>(eng() % 30);
    const Sequence theta = exact_concave(eng, n);
    const Sequence ref = exact_monotone_concave(eng, n);
    const double L = dyadic(eng, 0.25, 4.0);
    const double t = norm2_diff(theta, ref);
    if (t == 0.0) continue;
    for (const auto& r : level_set_counts(theta, ref, t, L)) {
      CHECK(r.count_ok);
      CHECK(r.low_structure_ok);
      CHECK(r.high_structure_ok);
    }
  }
}

TEST_CASE("truncation width stays within budget at the default level") {
  const int n = 16;
  Sequence ref(n);
  for (int i = 0; i < n; ++i) ref[i] = std::sqrt(static_cast<double>(i));
  const double sigma = 1.0;
  const double t = 3.0;
  const TruncationWidthCheck chk = truncation_width_check(
      ref, n, t, sigma, kDefaultClampMultiple * sigma, 60, 12, 4242);
  CHECK(chk.budget == doctest::Approx(t * t / 8.0));
  CHECK(chk.pass);
}
