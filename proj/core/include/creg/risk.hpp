#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "creg/cones.hpp"
#include "creg/stats.hpp"
#include "creg/types.hpp"

namespace creg {

/// Deterministic signal generator. QuadraticConcave is the bounded-range
/// default target; MisspecifiedConvex is its convex counterpart and lies
/// outside the concave cone for every n >= 3.
struct SignalSpec {
  enum class Family {
    Affine,
    QuadraticConcave,
    PiecewiseLinearConcave,
    MisspecifiedConvex,
    Custom,
  };
  Family family = Family::QuadraticConcave;
  int n = 0;
  double a = 0.0, b = 0.0;  // Affine: a + b*i
  double scale = 1.0;       // QuadraticConcave / MisspecifiedConvex
  int pieces = 2;           // PiecewiseLinearConcave
  Sequence custom;

  static SignalSpec affine(int n, double a, double b);
  static SignalSpec quadratic(int n, double scale = 1.0);
  static SignalSpec piecewise_linear(int n, int pieces);
  static SignalSpec misspecified_convex(int n, double scale = 1.0);
  static SignalSpec custom_signal(Sequence values);

  std::string describe() const;
};

Sequence make_signal(const SignalSpec& spec);

/// Monte-Carlo loss summary for one (signal, n, sigma) cell.
struct RiskReport {
  SignalSpec signal;
  double sigma = 1.0;
  int reps = 0;
  std::uint64_t seed = 0;
  double mean_loss = 0.0;  // (1/n) E||estimate - signal||^2
  double stderr_ = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (p, value)
  int failures = 0;  // replications excluded for solver failure
  // misspecified runs only:
  std::optional<double> regret_mean;
  std::optional<double> regret_stderr;
  std::optional<double> offset;     // (1/n) dist^2(signal, cone)
  std::optional<double> range_term; // V of the cone projection of mu*
  std::vector<double> losses;       // per-replication losses (kept for audits)
};

RiskReport run_risk(const SignalSpec& signal, double sigma, int reps,
                    std::uint64_t seed, int threads = 1,
                    double tol = 1e-8);

/// Risk run plus the regret decomposition: regret = loss - offset where
/// offset is the squared distance (per point) from the signal to the cone.
RiskReport run_regret(const SignalSpec& signal, double sigma, int reps,
                      std::uint64_t seed, int threads = 1,
                      double tol = 1e-8);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Weighted log-log fit of mean loss (or regret when present) against n,
/// with weights 1/stderr^2. Needs >= 4 report cells.
RateFit fit_rate(const std::vector<RiskReport>& reports,
                 bool use_regret = false);

/// Per-replication verification of the two-route loss decomposition:
/// full-cone projection of signal+noise versus affine part plus the
/// ortho-affine projection. Returns the largest relative residual across
/// the scalar identity and the vector identity.
double decomposition_audit(const SignalSpec& signal, double sigma, int reps,
                           std::uint64_t seed, int threads = 1);

/// Mean of ||affine part of noise||^2 / sigma^2 (distributed chi^2 with 2
/// degrees of freedom).
MeanStderr affine_chisq_audit(int n, double sigma, int reps,
                              std::uint64_t seed, int threads = 1);

struct TailAuditRow {
  double x = 0.0;
  double threshold = 0.0;
  double exceed_fraction = 0.0;
  double probability_bound = 0.0;  // exp(-x) + exp(-x^2/16)
  double binom_stderr = 0.0;
  bool pass = false;
};

/// High-probability audit: the fraction of replications whose loss exceeds
/// sigma^2 (2 + 17 x)/n plus a median-calibrated n^{-4/5} term must stay
/// below exp(-x) + exp(-x^2/16) (plus 3 binomial standard errors).
std::vector<TailAuditRow> loss_tail_audit(const SignalSpec& signal,
                                          double sigma, int reps,
                                          const std::vector<double>& x_grid,
                                          std::uint64_t seed, int threads = 1);

}  // namespace creg
