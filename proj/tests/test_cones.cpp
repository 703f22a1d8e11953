#include <cmath>
#include <random>

#include "creg/cones.hpp"
#include "creg/rng.hpp"
#include "doctest.h"

using namespace creg;

namespace {

Sequence random_concave(std::mt19937_64& eng, int n) {
  // non-increasing increments give an exactly concave sequence
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> inc(n - 1);
  for (auto& d : inc) d = U(eng);
  std::sort(inc.begin(), inc.end(), std::greater<>());
  Sequence s(n, 0.0);
  for (int i = 1; i < n; ++i) s[i] = s[i - 1] + inc[i - 1];
  return s;
}

}  // namespace

TEST_CASE("second differences") {
  CHECK(second_differences({0, 1, 0}) == Sequence{-2});
  CHECK(second_differences({1, 2, 3, 4}) == Sequence{0, 0});
  CHECK(second_differences({0, 0, 1}) == Sequence{1});
  CHECK(!is_member({0, 0, 1}, ConeSpec::full_concave(), 0.0));
  CHECK_THROWS_AS(second_differences({1, 2}), std::invalid_argument);
}

TEST_CASE("membership over cone kinds") {
  CHECK(is_member({0, 1, 0}, ConeSpec::full_concave(), 0.0));
  CHECK(!is_member({0, 1, 0}, ConeSpec::mode_constrained(1), 0.0));
  CHECK(is_member({0, 1, 0}, ConeSpec::mode_constrained(2), 0.0));
  // singleton/empty blocks are vacuously concave
  CHECK(is_member({5, 0, 5}, ConeSpec::three_block(1, 3), 0.0));
  CHECK(!is_member({5, 0, 5}, ConeSpec::full_concave(), 0.0));
  CHECK(is_member({0.5, 1, 0.5}, ConeSpec::bounded_concave(1.0), 0.0));
  CHECK(!is_member({0.5, 2, 0.5}, ConeSpec::bounded_concave(1.0), 0.0));
  CHECK_THROWS_AS(is_member({1, 2, 3}, ConeSpec::three_block(3, 2), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(is_member({1, 2}, ConeSpec::full_concave(), 0.0),
                  std::invalid_argument);
}

TEST_CASE("affine projection basics") {
  CHECK(project_affine({1, 2, 3}) == Sequence{1, 2, 3});
  const Sequence p = project_affine({0, 0, 3});
  CHECK(p[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("affine projection is an orthogonal projection") {
  std::mt19937_64 eng(11);
  std::normal_distribution<double> N(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 3 + static_cast<int>(eng() % 40);
    Sequence y(n);
    for (auto& v : y) v = N(eng);
    const Sequence f = project_affine(y);
    const Sequence ff = project_affine(f);
    double s_const = 0, s_lin = 0, ny = 0, nf = 0, nr = 0, idem = 0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - f[i];
      s_const += r;
      s_lin += r * (i + 1);
      ny += y[i] * y[i];
      nf += f[i] * f[i];
      nr += r * r;
      idem = std::max(idem, std::abs(ff[i] - f[i]));
    }
    CHECK(std::abs(s_const) <= 1e-10 * n);
    CHECK(std::abs(s_lin) <= 1e-10 * n * n);
    CHECK(ny == doctest::Approx(nf + nr).epsilon(1e-9));
    CHECK(idem <= 1e-12 * std::max(1.0, std::sqrt(nf)));
  }
}

TEST_CASE("value range") {
  CHECK(value_range({0, 1, 0}) == 1.0);
  CHECK(value_range({3, 3, 3, 3}) == 0.0);
  std::mt19937_64 eng(5);
  std::normal_distribution<double> N(0, 1);
  Sequence y(17);
  for (auto& v : y) v = N(eng);
  Sequence shifted = y;
  for (auto& v : shifted) v += 4.25;
  CHECK(value_range(y) == doctest::Approx(value_range(shifted)).epsilon(1e-12));
}

TEST_CASE("mode index") {
  CHECK(mode_index({0, 1, 0}) == 2);
  CHECK(mode_index({3, 2, 1}) == 1);
  CHECK(mode_index({1, 1, 0}) == 1);  // smallest tie wins
  CHECK_THROWS_AS(mode_index({0, 0, 1}), std::domain_error);
}

TEST_CASE("concave sequences split at the mode and absorb affine shifts") {
  std::mt19937_64 eng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + static_cast<int>(eng() % 30);
    const Sequence s = random_concave(eng, n);
    REQUIRE(is_member(s, ConeSpec::full_concave(), 1e-12));
    const int k = mode_index(s);
    // membership in the mode cone at the mode position (union property)
    CHECK(is_member(s, ConeSpec::mode_constrained(k), 1e-12));
    // prefix non-decreasing, suffix non-increasing
    for (int i = 1; i < k; ++i) CHECK(s[i - 1] <= s[i] + 1e-12);
    for (int i = k; i < n; ++i) CHECK(s[i] <= s[i - 1] + 1e-12);
    // affine shifts stay in the cone
    Sequence shifted = s;
    for (int i = 0; i < n; ++i) shifted[i] += -2.0 + 0.375 * (i + 1);
    CHECK(is_member(shifted, ConeSpec::full_concave(), 1e-9));
  }
}
