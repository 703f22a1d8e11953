#pragma once

// Test-only reference solvers, kept independent of the production
// active-set path: a dense exhaustive active-subset oracle for tiny
// problems and a Dykstra alternating-projection solver for mid-size
// cross-checks.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "creg/cones.hpp"
#include "creg/projection.hpp"

namespace creg::testing {

/// Enumerates every subset of the cone's constraint rows, solves the
/// equality-constrained least squares for each, and keeps the KKT-valid
/// candidate with the smallest objective. Exponential in the number of
/// rows; use only for small n.
inline std::optional<Sequence> subset_oracle(const Sequence& y,
                                             const ConeSpec& cone) {
  const auto cons = cone_constraints(y.size(), cone);
  const int m = static_cast<int>(cons.size());
  const int n = static_cast<int>(y.size());
  if (m > 24) return std::nullopt;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd rhs(m), yv(n);
  for (int j = 0; j < m; ++j) {
    for (int t = 0; t < cons[j].len; ++t)
      A(j, cons[j].start + t) = cons[j].coef[t];
    rhs(j) = cons[j].rhs;
  }
  for (int i = 0; i < n; ++i) yv(i) = y[i];

  double best_obj = std::numeric_limits<double>::infinity();
  std::optional<Sequence> best;
  for (long mask = 0; mask < (1L << m); ++mask) {
    std::vector<int> S;
    for (int j = 0; j < m; ++j)
      if (mask & (1L << j)) S.push_back(j);
    const int k = static_cast<int>(S.size());
    Eigen::MatrixXd As(k, n);
    Eigen::VectorXd bs(k);
    for (int p = 0; p < k; ++p) {
      As.row(p) = A.row(S[p]);
      bs(p) = rhs(S[p]);
    }
    Eigen::MatrixXd G = As * As.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (k > 0 && lu.rank() < k) continue;
    Eigen::VectorXd lam =
        k > 0 ? lu.solve((As * yv - bs).eval()) : Eigen::VectorXd(0);
    if (k > 0 && lam.minCoeff() < -1e-10) continue;
    Eigen::VectorXd theta = yv - (k > 0 ? (As.transpose() * lam).eval()
                                        : Eigen::VectorXd::Zero(n).eval());
    Eigen::VectorXd slack = A * theta - rhs;
    if (m > 0 && slack.maxCoeff() > 1e-9) continue;
    const double obj = (theta - yv).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = Sequence(theta.data(), theta.data() + n);
    }
  }
  return best;
}

/// Path-following primal-dual interior-point solve of
///   min 0.5||theta - y||^2  s.t.  A theta <= rhs,
/// independent of the active-set code path. The Newton systems
/// (I + A^T D A) are banded with bandwidth 2 and are solved densely here
/// (test-only code, mid-size n).
inline Sequence interior_point_projection(const Sequence& y,
                                          const ConeSpec& cone,
                                          int max_iters = 200) {
  const auto cons = cone_constraints(y.size(), cone);
  const int n = static_cast<int>(y.size());
  const int m = static_cast<int>(cons.size());
  if (m == 0) return y;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd rhs(m), yv(n);
  for (int j = 0; j < m; ++j) {
    for (int t = 0; t < cons[j].len; ++t)
      A(j, cons[j].start + t) = cons[j].coef[t];
    rhs(j) = cons[j].rhs;
  }
  for (int i = 0; i < n; ++i) yv(i) = y[i];

  // strictly feasible start: a strongly concave bump plus slack margin
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    const double x = n > 1 ? 2.0 * i / (n - 1.0) - 1.0 : 0.0;
    theta(i) = 1.0 - x * x;
  }
  Eigen::VectorXd s = rhs - A * theta;
  if (s.minCoeff() <= 0) {
    const double shift = 1.0 - s.minCoeff();
    s.array() += shift;  // relax: start infeasible-primal, IPM handles it
  }
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(m);

  double scale = std::max(1.0, yv.cwiseAbs().maxCoeff());
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd r_dual = theta - yv + A.transpose() * lam;
    const Eigen::VectorXd r_prim = A * theta + s - rhs;
    const double mu = s.dot(lam) / m;
    if (mu < 1e-14 * scale * scale &&
        r_dual.cwiseAbs().maxCoeff() < 1e-11 * scale &&
        r_prim.cwiseAbs().maxCoeff() < 1e-11 * scale)
      break;
    const double sigma = 0.2;
    const Eigen::VectorXd d = lam.cwiseQuotient(s);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    H += A.transpose() * d.asDiagonal() * A;
    const Eigen::VectorXd comp = sigma * mu * s.cwiseInverse() - lam;
    // (I + A^T D A) dtheta = -r_dual - A^T (comp + D r_prim)
    const Eigen::VectorXd b =
        -r_dual - A.transpose() * (comp + d.cwiseProduct(r_prim));
    const Eigen::VectorXd dtheta = H.ldlt().solve(b);
    const Eigen::VectorXd ds = -r_prim - A * dtheta;
    const Eigen::VectorXd dlam =
        comp - d.cwiseProduct(ds);
    double alpha = 1.0;
    for (int j = 0; j < m; ++j) {
      if (ds(j) < 0) alpha = std::min(alpha, -0.95 * s(j) / ds(j));
      if (dlam(j) < 0) alpha = std::min(alpha, -0.95 * lam(j) / dlam(j));
    }
    theta += alpha * dtheta;
    s += alpha * ds;
    lam += alpha * dlam;
  }
  return Sequence(theta.data(), theta.data() + n);
}

/// Dykstra's alternating projections over the halfspace rows. Converges to
/// the exact projection onto the intersection; an independent route used
/// to cross-check small solves (its crawl rate on thin cones makes it a
/// small-n tool only).
inline Sequence dykstra_projection(const Sequence& y, const ConeSpec& cone,
                                   int max_sweeps = 40000, double tol = 1e-11) {
  const auto cons = cone_constraints(y.size(), cone);
  const std::size_t n = y.size();
  const std::size_t m = cons.size();
  Sequence x = y;
  std::vector<Sequence> memory(m, Sequence(3, 0.0));
  double scale = 1.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& c = cons[j];
      double norm2 = 0.0;
      for (int t = 0; t < c.len; ++t) norm2 += c.coef[t] * c.coef[t];
      // w = x + p_j restricted to the row support
      double val = -c.rhs;
      for (int t = 0; t < c.len; ++t)
        val += c.coef[t] * (x[c.start + t] + memory[j][t]);
      const double step = val > 0.0 ? val / norm2 : 0.0;
      for (int t = 0; t < c.len; ++t) {
        const double w = x[c.start + t] + memory[j][t];
        const double nx = w - step * c.coef[t];
        memory[j][t] = w - nx;
        moved = std::max(moved, std::abs(nx - x[c.start + t]));
        x[c.start + t] = nx;
      }
    }
    if (moved <= tol * scale) break;
  }
  return x;
}

}  // namespace creg::testing
