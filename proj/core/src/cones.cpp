#include "creg/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace creg {

void require_finite(const Sequence& x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

std::string ConeSpec::describe() const {
  switch (kind) {
    case Kind::FullConcave:
      return "concave";
    case Kind::ModeConstrained:
      return "mode:" + std::to_string(mode);
    case Kind::ThreeBlock: {
      std::string s =
          "three-block:" + std::to_string(m1) + "," + std::to_string(m2);
      if (bound > 0.0) s += ",B=" + std::to_string(bound);
      return s;
    }
    case Kind::ConcaveOrthoAffine:
      return "concave-ortho-affine";
    case Kind::BoundedConcave:
      return "bounded-concave:B=" + std::to_string(bound);
  }
  return "?";
}

void ConeSpec::validate(std::size_t n) const {
  if (n < 3)
    throw std::invalid_argument(
        "cone membership needs n >= 3, got n = " + std::to_string(n));
  switch (kind) {
    case Kind::FullConcave:
    case Kind::ConcaveOrthoAffine:
      break;
    case Kind::ModeConstrained:
      if (mode < 1 || static_cast<std::size_t>(mode) > n)
        throw std::invalid_argument("mode position out of range 1..n: " +
                                    std::to_string(mode));
      break;
    case Kind::ThreeBlock:
      if (m1 < 0 || m2 <= m1 || static_cast<std::size_t>(m2) > n + 1)
        throw std::invalid_argument(
            "three-block breakpoints need 0 <= m1 < m2 <= n+1, got m1=" +
            std::to_string(m1) + " m2=" + std::to_string(m2));
      if (bound < 0.0)
        throw std::invalid_argument("three-block bound must be >= 0");
      break;
    case Kind::BoundedConcave:
      if (!(bound > 0.0))
        throw std::invalid_argument("bounded-concave needs B > 0");
      break;
  }
}

Sequence second_differences(const Sequence& theta) {
  if (theta.size() < 3)
    throw std::invalid_argument("second_differences: need length >= 3, got " +
                                std::to_string(theta.size()));
  require_finite(theta, "second_differences");
  Sequence d(theta.size() - 2);
  for (std::size_t j = 0; j + 2 < theta.size(); ++j)
    d[j] = theta[j] - 2.0 * theta[j + 1] + theta[j + 2];
  return d;
}

namespace {

// Concavity of theta on the 0-based half-open index range [a, b).
bool concave_on_range(const Sequence& theta, std::size_t a, std::size_t b,
                      double tol) {
  if (b <= a || b - a < 3) return true;  // short blocks are vacuously concave
  for (std::size_t j = a; j + 2 < b; ++j) {
    if (theta[j] - 2.0 * theta[j + 1] + theta[j + 2] > tol) return false;
  }
  return true;
}

}  // namespace

bool is_member(const Sequence& theta, const ConeSpec& cone, double tol) {
  const std::size_t n = theta.size();
  cone.validate(n);
  require_finite(theta, "is_member");
  if (tol < 0.0) throw std::invalid_argument("is_member: tol must be >= 0");

  switch (cone.kind) {
    case ConeSpec::Kind::FullConcave:
      return concave_on_range(theta, 0, n, tol);
    case ConeSpec::Kind::ModeConstrained: {
      if (!concave_on_range(theta, 0, n, tol)) return false;
      const double peak = theta[static_cast<std::size_t>(cone.mode - 1)];
      for (double v : theta)
        if (v > peak + tol) return false;
      return true;
    }
    case ConeSpec::Kind::ThreeBlock: {
      const auto m1 = static_cast<std::size_t>(cone.m1);
      const auto m2 = static_cast<std::size_t>(cone.m2);
      if (!concave_on_range(theta, 0, m1, tol)) return false;
      if (m2 >= 2 && !concave_on_range(theta, m1, m2 - 1, tol)) return false;
      if (m2 <= n && !concave_on_range(theta, m2 - 1, n, tol)) return false;
      if (cone.bound > 0.0) {
        for (double v : theta)
          if (std::abs(v) > cone.bound + tol) return false;
      }
      return true;
    }
    case ConeSpec::Kind::ConcaveOrthoAffine: {
      if (!concave_on_range(theta, 0, n, tol)) return false;
      // Orthogonality to the affine subspace, scaled like the membership
      // tolerance on the unit basis of that subspace.
      double norm = 0.0;
      for (double v : theta) norm += v * v;
      norm = std::sqrt(norm);
      const double scale = std::max(1.0, norm);
      double s0 = 0.0, s1 = 0.0;
      const double nn = static_cast<double>(n);
      const double mean_i = (nn + 1.0) / 2.0;
      double sxx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s0 += theta[i];
        const double xi = static_cast<double>(i + 1) - mean_i;
        s1 += theta[i] * xi;
        sxx += xi * xi;
      }
      const double c0 = s0 / std::sqrt(nn);
      const double c1 = sxx > 0 ? s1 / std::sqrt(sxx) : 0.0;
      return std::abs(c0) <= tol * scale && std::abs(c1) <= tol * scale;
    }
    case ConeSpec::Kind::BoundedConcave: {
      if (!concave_on_range(theta, 0, n, tol)) return false;
      for (double v : theta)
        if (std::abs(v) > cone.bound + tol) return false;
      return true;
    }
  }
  return false;
}

Sequence project_affine(const Sequence& theta) {
  const std::size_t n = theta.size();
  if (n == 0) throw std::invalid_argument("project_affine: empty sequence");
  require_finite(theta, "project_affine");
  if (n <= 2) return theta;  // one or two points are fit exactly
  const double nn = static_cast<double>(n);
  const double mean_i = (nn + 1.0) / 2.0;
  double mean_y = 0.0;
  for (double v : theta) mean_y += v;
  mean_y /= nn;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i + 1) - mean_i;
    sxy += xi * (theta[i] - mean_y);
    sxx += xi * xi;
  }
  const double slope = sxy / sxx;
  Sequence fit(n);
  for (std::size_t i = 0; i < n; ++i)
    fit[i] = mean_y + slope * (static_cast<double>(i + 1) - mean_i);
  return fit;
}

Sequence remove_affine(const Sequence& theta) {
  Sequence fit = project_affine(theta);
  Sequence out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - fit[i];
  return out;
}

double value_range(const Sequence& theta) {
  if (theta.empty()) throw std::invalid_argument("value_range: empty sequence");
  require_finite(theta, "value_range");
  const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
  return *hi - *lo;
}

int mode_index(const Sequence& theta, double tol) {
  if (!is_member(theta, ConeSpec::full_concave(), tol))
    throw std::domain_error("mode_index: sequence is not concave within tol");
  std::size_t best = 0;
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (theta[i] > theta[best]) best = i;  // strict: keeps the smallest tie
  return static_cast<int>(best + 1);
}

}  // namespace creg
