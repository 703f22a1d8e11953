#include "creg/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "creg/parallel.hpp"
#include "creg/projection.hpp"
#include "creg/rng.hpp"

namespace creg {

SignalSpec SignalSpec::affine(int n, double a, double b) {
  SignalSpec s;
  s.family = Family::Affine;
  s.n = n;
  s.a = a;
  s.b = b;
  return s;
}

SignalSpec SignalSpec::quadratic(int n, double scale) {
  SignalSpec s;
  s.family = Family::QuadraticConcave;
  s.n = n;
  s.scale = scale;
  return s;
}

SignalSpec SignalSpec::piecewise_linear(int n, int pieces) {
  SignalSpec s;
  s.family = Family::PiecewiseLinearConcave;
  s.n = n;
  s.pieces = pieces;
  return s;
}

SignalSpec SignalSpec::misspecified_convex(int n, double scale) {
  SignalSpec s;
  s.family = Family::MisspecifiedConvex;
  s.n = n;
  s.scale = scale;
  return s;
}

SignalSpec SignalSpec::custom_signal(Sequence values) {
  SignalSpec s;
  s.family = Family::Custom;
  s.n = static_cast<int>(values.size());
  s.custom = std::move(values);
  return s;
}

std::string SignalSpec::describe() const {
  switch (family) {
    case Family::Affine:
      return "affine(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
    case Family::QuadraticConcave:
      return "quadratic(scale=" + std::to_string(scale) + ")";
    case Family::PiecewiseLinearConcave:
      return "piecewise-linear(pieces=" + std::to_string(pieces) + ")";
    case Family::MisspecifiedConvex:
      return "misspec-convex(scale=" + std::to_string(scale) + ")";
    case Family::Custom:
      return "custom(n=" + std::to_string(n) + ")";
  }
  return "?";
}

Sequence make_signal(const SignalSpec& spec) {
  if (spec.family == SignalSpec::Family::Custom) {
    require_finite(spec.custom, "make_signal");
    return spec.custom;
  }
  if (spec.n < 1) throw std::invalid_argument("make_signal: n >= 1 required");
  const int n = spec.n;
  Sequence s(n);
  switch (spec.family) {
    case SignalSpec::Family::Affine:
      for (int i = 0; i < n; ++i) s[i] = spec.a + spec.b * (i + 1);
      break;
    case SignalSpec::Family::QuadraticConcave:
      for (int i = 0; i < n; ++i) {
        const double x = n > 1 ? 2.0 * i / (n - 1.0) - 1.0 : 0.0;
        s[i] = spec.scale * (1.0 - x * x);
      }
      break;
    case SignalSpec::Family::PiecewiseLinearConcave: {
      const int k = std::max(1, spec.pieces);
      // k pieces with linearly decreasing slopes, range normalized to scale
      const int len = std::max(1, n / k);
      double value = 0.0;
      int piece = 0;
      for (int i = 0; i < n; ++i) {
        piece = std::min(k - 1, i / len);
        const double slope =
            k > 1 ? 1.0 - 2.0 * piece / (k - 1.0) : 0.5;
        if (i > 0) value += slope;
        s[i] = value;
      }
      const double range = *std::max_element(s.begin(), s.end()) -
                           *std::min_element(s.begin(), s.end());
      if (range > 0)
        for (double& v : s) v *= spec.scale / range;
      break;
    }
    case SignalSpec::Family::MisspecifiedConvex: {
      double peak = 0.0;
      for (int i = 0; i < n; ++i) {
        const double u = (i + 1) - n / 2.0;
        s[i] = u * u;
        peak = std::max(peak, s[i]);
      }
      if (peak > 0)
        for (double& v : s) v *= spec.scale / peak;
      break;
    }
    case SignalSpec::Family::Custom:
      break;
  }
  return s;
}

namespace {

double norm2sq(const Sequence& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::vector<std::pair<double, double>> loss_quantiles(
    std::vector<double> losses) {
  std::sort(losses.begin(), losses.end());
  std::vector<std::pair<double, double>> qs;
  for (double p : {0.5, 0.9, 0.99})
    qs.emplace_back(p, quantile_sorted(losses, p));
  return qs;
}

RiskReport run_core(const SignalSpec& signal, double sigma, int reps,
                    std::uint64_t seed, int threads, double tol,
                    bool with_regret) {
  if (reps < 2) throw std::domain_error("risk run: reps must be >= 2");
  if (sigma < 0.0) throw std::invalid_argument("risk run: sigma >= 0");
  const Sequence truth = make_signal(signal);
  const std::size_t n = truth.size();
  if (n < 3) throw std::invalid_argument("risk run: n >= 3 required");

  RiskReport report;
  report.signal = signal;
  report.sigma = sigma;
  report.reps = reps;
  report.seed = seed;

  double offset = 0.0;
  if (with_regret) {
    const Sequence mu = remove_affine(truth);
    const ProjectionResult po = project_ortho_affine(mu, tol);
    Sequence diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = po.point[i] - mu[i];
    offset = norm2sq(diff) / static_cast<double>(n);
    report.offset = offset;
    report.range_term = value_range(project(mu, ConeSpec::full_concave(), tol).point);
  }

  std::vector<double> losses(reps,
                             std::numeric_limits<double>::quiet_NaN());
  std::vector<char> failed(reps, 0);
  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    Sequence y = gaussian_vector(eng, n, sigma > 0 ? sigma : 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] += truth[i];
    try {
      const ProjectionResult pr = project(y, ConeSpec::full_concave(), tol);
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = pr.point[i] - truth[i];
        loss += d * d;
      }
      losses[r] = loss / static_cast<double>(n);
    } catch (const SolverError&) {
      failed[r] = 1;
    }
  });

  std::vector<double> kept;
  kept.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    if (failed[r])
      ++report.failures;
    else
      kept.push_back(losses[r]);
  }
  if (report.failures * 100 > reps)
    throw SolverError("risk run: more than 1% of replications failed",
                      truth, 0.0, report.failures);

  const MeanStderr s = summarize(kept);
  report.mean_loss = s.mean;
  report.stderr_ = s.stderr_;
  report.quantiles = loss_quantiles(kept);
  report.losses = kept;
  if (with_regret) {
    std::vector<double> regrets(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) regrets[i] = kept[i] - offset;
    const MeanStderr rg = summarize(regrets);
    report.regret_mean = rg.mean;
    report.regret_stderr = rg.stderr_;
  }
  return report;
}

}  // namespace

RiskReport run_risk(const SignalSpec& signal, double sigma, int reps,
                    std::uint64_t seed, int threads, double tol) {
  return run_core(signal, sigma, reps, seed, threads, tol, false);
}

RiskReport run_regret(const SignalSpec& signal, double sigma, int reps,
                      std::uint64_t seed, int threads, double tol) {
  return run_core(signal, sigma, reps, seed, threads, tol, true);
}

RateFit fit_rate(const std::vector<RiskReport>& reports, bool use_regret) {
  if (reports.size() < 4)
    throw std::invalid_argument("fit_rate: need >= 4 report cells");
  std::vector<double> x, y, w;
  for (const auto& r : reports) {
    const double value =
        use_regret ? r.regret_mean.value_or(r.mean_loss) : r.mean_loss;
    const double se =
        use_regret ? r.regret_stderr.value_or(r.stderr_) : r.stderr_;
    if (!(value > 0))
      throw std::invalid_argument("fit_rate: non-positive mean in a cell");
    x.push_back(std::log(static_cast<double>(r.signal.n)));
    y.push_back(std::log(value));
    w.push_back(se > 0 ? 1.0 / (se * se) : 1.0);
  }
  const LineFit fit = fit_line_weighted(x, y, w);
  return {fit.slope, fit.intercept, fit.r_squared};
}

double decomposition_audit(const SignalSpec& signal, double sigma, int reps,
                           std::uint64_t seed, int threads) {
  if (reps < 1) throw std::domain_error("decomposition_audit: reps >= 1");
  const Sequence truth = make_signal(signal);
  const std::size_t n = truth.size();
  if (!is_member(truth, ConeSpec::full_concave(), 1e-7))
    throw std::invalid_argument("decomposition_audit: signal must be concave");
  const Sequence mu = remove_affine(truth);

  std::vector<double> residuals(reps, 0.0);
  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    const Sequence z = gaussian_vector(eng, n, sigma);
    Sequence y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = truth[i] + z[i];

    // route 1: direct full-cone projection
    const Sequence direct = project(y, ConeSpec::full_concave()).point;
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = direct[i] - truth[i];
      lhs += d * d;
    }

    // route 2: affine part plus ortho-affine projection of mu + z
    Sequence muz(n);
    for (std::size_t i = 0; i < n; ++i) muz[i] = mu[i] + z[i];
    const Sequence ortho = project_ortho_affine(muz).point;
    const Sequence affine_noise = project_affine(z);
    double part = 0.0, affine_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ortho[i] - mu[i];
      part += d * d;
      affine_sq += affine_noise[i] * affine_noise[i];
    }
    const double rhs = part + affine_sq;

    double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));

    // vector identity: direct = ortho + affine fit of y
    const Sequence affine_y = project_affine(y);
    double scale = 0.0, vec = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      scale = std::max(scale, std::abs(direct[i]));
    for (std::size_t i = 0; i < n; ++i)
      vec = std::max(vec, std::abs(direct[i] - (ortho[i] + affine_y[i])));
    rel = std::max(rel, vec / std::max(1.0, scale));
    residuals[r] = rel;
  });
  return *std::max_element(residuals.begin(), residuals.end());
}

MeanStderr affine_chisq_audit(int n, double sigma, int reps,
                              std::uint64_t seed, int threads) {
  if (reps < 2) throw std::domain_error("affine_chisq_audit: reps >= 2");
  if (!(sigma > 0)) throw std::invalid_argument("affine_chisq_audit: sigma > 0");
  std::vector<double> stats(reps);
  parallel_for_index(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    auto eng = replication_engine(seed, r);
    const Sequence z = gaussian_vector(eng, static_cast<std::size_t>(n), sigma);
    const Sequence pz = project_affine(z);
    stats[r] = norm2sq(pz) / (sigma * sigma);
  });
  return summarize(stats);
}

std::vector<TailAuditRow> loss_tail_audit(const SignalSpec& signal,
                                          double sigma, int reps,
                                          const std::vector<double>& x_grid,
                                          std::uint64_t seed, int threads) {
  RiskReport report = run_risk(signal, sigma, reps, seed, threads);
  const Sequence truth = make_signal(signal);
  const double n = static_cast<double>(truth.size());

  // calibrate the structural term at the median loss
  std::vector<double> sorted = report.losses;
  std::sort(sorted.begin(), sorted.end());
  const double structural = quantile_sorted(sorted, 0.5);

  std::vector<TailAuditRow> rows;
  for (double x : x_grid) {
    TailAuditRow row;
    row.x = x;
    row.threshold = sigma * sigma * (2.0 + 17.0 * x) / n + structural;
    long exceed = 0;
    for (double loss : report.losses)
      if (loss > row.threshold) ++exceed;
    const double frac =
        static_cast<double>(exceed) / static_cast<double>(report.losses.size());
    row.exceed_fraction = frac;
    row.probability_bound = std::exp(-x) + std::exp(-x * x / 16.0);
    row.binom_stderr = std::sqrt(std::max(frac * (1.0 - frac), 1e-12) /
                                 static_cast<double>(report.losses.size()));
    row.pass = frac <= std::min(1.0, row.probability_bound) +
                           3.0 * row.binom_stderr ||
               row.probability_bound >= 1.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace creg
