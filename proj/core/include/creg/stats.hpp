#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace creg {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;   // standard error of the mean, ddof = 1
  std::size_t count = 0;
};

inline MeanStderr summarize(const std::vector<double>& xs) {
  MeanStderr out;
  out.count = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) {
      const double d = x - out.mean;
      ss += d * d;
    }
    const double var = ss / static_cast<double>(xs.size() - 1);
    out.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return out;
}

/// Empirical order statistic, no interpolation: the ceil(p*N)-th smallest.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p <= 0.0) return sorted.front();
  const auto n = sorted.size();
  std::size_t k = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(n)));
  if (k == 0) k = 1;
  if (k > n) k = n;
  return sorted[k - 1];
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Weighted least squares line through (x_i, y_i); w_i >= 0.
inline LineFit fit_line_weighted(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size())
    throw std::invalid_argument("fit_line_weighted: size mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("fit_line_weighted: need at least 2 points");
  double sw = 0, swx = 0, swy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  if (!(sw > 0)) throw std::invalid_argument("fit_line_weighted: zero weight");
  const double mx = swx / sw, my = swy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0))
    throw std::invalid_argument("fit_line_weighted: degenerate x spread");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += w[i] * e * e;
    ss_tot += w[i] * (y[i] - my) * (y[i] - my);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  return fit_line_weighted(x, y, std::vector<double>(x.size(), 1.0));
}

}  // namespace creg
