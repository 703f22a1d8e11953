#include "creg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace creg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

LinearConstraint second_diff_row(int j) {
  // theta_j - 2 theta_{j+1} + theta_{j+2} <= 0, 0-based start j
  LinearConstraint c;
  c.start = j;
  c.len = 3;
  c.coef[0] = 1.0;
  c.coef[1] = -2.0;
  c.coef[2] = 1.0;
  return c;
}

LinearConstraint step_up_row(int i) {
  // theta_i - theta_{i+1} <= 0
  LinearConstraint c;
  c.start = i;
  c.len = 2;
  c.coef[0] = 1.0;
  c.coef[1] = -1.0;
  return c;
}

LinearConstraint step_down_row(int i) {
  // theta_{i+1} - theta_i <= 0
  LinearConstraint c;
  c.start = i;
  c.len = 2;
  c.coef[0] = -1.0;
  c.coef[1] = 1.0;
  return c;
}

LinearConstraint bound_row(int i, double sign, double bound) {
  // sign * theta_i <= bound
  LinearConstraint c;
  c.start = i;
  c.len = 1;
  c.coef[0] = sign;
  c.rhs = bound;
  return c;
}

void append_block_rows(std::vector<LinearConstraint>& rows, int a, int b) {
  // second differences of the 0-based half-open block [a, b)
  for (int j = a; j + 2 < b; ++j) rows.push_back(second_diff_row(j));
}

double row_value(const LinearConstraint& c, const Sequence& x) {
  double v = 0.0;
  for (int t = 0; t < c.len; ++t) v += c.coef[t] * x[c.start + t];
  return v;
}

double row_dot(const LinearConstraint& a, const LinearConstraint& b) {
  const int lo = std::max(a.start, b.start);
  const int hi = std::min(a.start + a.len, b.start + b.len);
  double v = 0.0;
  for (int i = lo; i < hi; ++i) v += a.coef[i - a.start] * b.coef[i - b.start];
  return v;
}

// Symmetric positive definite band matrix, lower storage; row p keeps
// entries for columns p-bw .. p.
class BandMatrix {
 public:
  void reset(int size, int bandwidth) {
    size_ = size;
    bw_ = bandwidth;
    a_.assign(static_cast<std::size_t>(size) * (bandwidth + 1), 0.0);
  }

  double& at(int p, int q) { return a_[static_cast<std::size_t>(p) * (bw_ + 1) + (p - q)]; }
  double at(int p, int q) const {
    return a_[static_cast<std::size_t>(p) * (bw_ + 1) + (p - q)];
  }
  int size() const { return size_; }
  int bandwidth() const { return bw_; }

  /// In-place LL^T. Returns false on a non-positive pivot (dependent rows).
  bool factor() {
    for (int p = 0; p < size_; ++p) {
      const int q0 = std::max(0, p - bw_);
      for (int q = q0; q <= p; ++q) {
        double s = at(p, q);
        const int r0 = std::max(q0, q - bw_);
        for (int r = r0; r < q; ++r) s -= at(p, r) * at(q, r);
        if (q == p) {
          if (!(s > 0.0)) return false;
          at(p, p) = std::sqrt(s);
        } else {
          at(p, q) = s / at(q, q);
        }
      }
    }
    return true;
  }

  void solve(std::vector<double>& x) const {
    for (int p = 0; p < size_; ++p) {
      double s = x[p];
      for (int q = std::max(0, p - bw_); q < p; ++q) s -= at(p, q) * x[q];
      x[p] = s / at(p, p);
    }
    for (int p = size_ - 1; p >= 0; --p) {
      double s = x[p];
      const int qhi = std::min(size_ - 1, p + bw_);
      for (int q = p + 1; q <= qhi; ++q) s -= at(q, p) * x[q];
      x[p] = s / at(p, p);
    }
  }

  void multiply(const std::vector<double>& x, std::vector<double>& r) const {
    for (int p = 0; p < size_; ++p) {
      double s = 0.0;
      for (int q = std::max(0, p - bw_); q <= p; ++q) s += at(p, q) * x[q];
      const int qhi = std::min(size_ - 1, p + bw_);
      for (int q = p + 1; q <= qhi; ++q) s += at(q, p) * x[q];
      r[p] = s;
    }
  }

 private:
  int size_ = 0, bw_ = 0;
  std::vector<double> a_;
};

struct ActiveSetOutcome {
  Sequence point;
  std::vector<double> duals;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Dual active-set solve of min 0.5||theta - y||^2 s.t. A theta <= rhs,
/// working on the nonnegative dual: theta = y - A^T lambda (Lawson-Hanson
/// pivoting). Subproblems factor the active Gram matrix, which is banded
/// because rows touch at most three consecutive coordinates and the active
/// set is kept sorted by leftmost coordinate. Stopping comparisons are
/// relative to the input magnitude, so the pivot path is invariant under
/// power-of-two scalings of (y, rhs).
ActiveSetOutcome solve_projection(const Sequence& y,
                                  const std::vector<LinearConstraint>& cons,
                                  int max_pivots) {
  const std::size_t n = y.size();
  const int m = static_cast<int>(cons.size());

  ActiveSetOutcome out;
  out.duals.assign(cons.size(), 0.0);
  if (m == 0) {
    out.point = y;
    out.converged = true;
    return out;
  }

  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  for (const auto& c : cons) scale = std::max(scale, std::abs(c.rhs));
  if (scale == 0.0) {
    out.point.assign(n, 0.0);
    out.converged = true;
    return out;
  }

  std::vector<double> c_all(m);
  for (int j = 0; j < m; ++j) c_all[j] = row_value(cons[j], y) - cons[j].rhs;

  std::vector<int> passive;  // constraint ids, sorted by (start, id)
  std::vector<double> lam;   // aligned with passive
  std::vector<char> in_passive(m, 0);
  std::vector<char> blocked(m, 0);
  bool any_blocked = false;

  Sequence theta = y;
  std::vector<double> w(m);
  std::vector<double> lam_hat, rhs_p, resid;
  BandMatrix gram, chol;

  auto rebuild_theta = [&]() {
    theta = y;
    for (std::size_t p = 0; p < passive.size(); ++p) {
      const auto& c = cons[passive[p]];
      for (int t = 0; t < c.len; ++t) theta[c.start + t] -= lam[p] * c.coef[t];
    }
  };

  // Banded Gram solve over an id list with two refinement passes. Returns
  // false on a non-positive pivot (linearly dependent rows).
  auto solve_gram = [&](const std::vector<int>& ids,
                        const std::vector<double>& rhs_vec,
                        std::vector<double>& sol) -> bool {
    const int k = static_cast<int>(ids.size());
    int bw = 0;
    for (int p = 1; p < k; ++p) {
      // rows span at most 3 coordinates, so only rows starting within 2
      // positions can overlap
      int q = p - 1;
      while (q >= 0 && cons[ids[q]].start >= cons[ids[p]].start - 2) --q;
      bw = std::max(bw, p - q - 1);
    }
    gram.reset(k, bw);
    for (int p = 0; p < k; ++p)
      for (int q = std::max(0, p - bw); q <= p; ++q)
        gram.at(p, q) = row_dot(cons[ids[p]], cons[ids[q]]);
    chol = gram;
    if (!chol.factor()) return false;
    sol = rhs_vec;
    chol.solve(sol);
    resid.resize(k);
    for (int pass = 0; pass < 2; ++pass) {
      gram.multiply(sol, resid);
      for (int p = 0; p < k; ++p) resid[p] = rhs_vec[p] - resid[p];
      chol.solve(resid);
      for (int p = 0; p < k; ++p) sol[p] += resid[p];
    }
    return true;
  };

  auto solve_passive = [&](std::vector<double>& sol) -> bool {
    rhs_p.resize(passive.size());
    for (std::size_t p = 0; p < passive.size(); ++p)
      rhs_p[p] = c_all[passive[p]];
    return solve_gram(passive, rhs_p, sol);
  };

  // Degenerate admit: the candidate row is a combination of the rows
  // already active, so its violation can only be cleared by exchanging it
  // against one of them. Moves lambda along the dependency direction until
  // a participating dual hits zero, drops that row, and keeps the
  // candidate. Returns false when no exchange direction exists.
  auto exchange_pivot = [&](int j_new, std::size_t at) -> bool {
    std::vector<int> rest;
    std::vector<double> lam_rest;
    rest.reserve(passive.size() - 1);
    for (std::size_t p = 0; p < passive.size(); ++p) {
      if (p == at) continue;
      rest.push_back(passive[p]);
      lam_rest.push_back(lam[p]);
    }
    std::vector<double> dep_rhs(rest.size());
    for (std::size_t p = 0; p < rest.size(); ++p)
      dep_rhs[p] = row_dot(cons[rest[p]], cons[j_new]);
    std::vector<double> coef;
    if (!solve_gram(rest, dep_rhs, coef)) return false;

    double tau = std::numeric_limits<double>::infinity();
    std::size_t pinch = rest.size();
    for (std::size_t p = 0; p < rest.size(); ++p) {
      if (coef[p] > 1e-10) {
        const double ratio = lam_rest[p] / coef[p];
        if (ratio < tau) {
          tau = ratio;
          pinch = p;
        }
      }
    }
    if (pinch == rest.size()) return false;

    for (std::size_t p = 0; p < rest.size(); ++p)
      lam_rest[p] -= tau * coef[p];
    lam_rest[pinch] = 0.0;

    // rebuild passive/lam: rest minus the pinch, plus j_new at tau
    std::vector<int> next_ids;
    std::vector<double> next_lam;
    for (std::size_t p = 0; p < rest.size(); ++p) {
      if (p == pinch) {
        in_passive[rest[p]] = 0;
        continue;
      }
      next_ids.push_back(rest[p]);
      next_lam.push_back(std::max(0.0, lam_rest[p]));
    }
    // insert j_new in start order
    std::size_t ins = 0;
    while (ins < next_ids.size() &&
           (cons[next_ids[ins]].start < cons[j_new].start ||
            (cons[next_ids[ins]].start == cons[j_new].start &&
             next_ids[ins] < j_new)))
      ++ins;
    next_ids.insert(next_ids.begin() + ins, j_new);
    next_lam.insert(next_lam.begin() + ins, tau);
    passive = std::move(next_ids);
    lam = std::move(next_lam);
    ++out.iterations;
    return true;
  };

  auto erase_passive = [&](std::size_t at) {
    in_passive[passive[at]] = 0;
    passive.erase(passive.begin() + at);
    lam.erase(lam.begin() + at);
  };

  double lam_max = 0.0;

  while (true) {
    rebuild_theta();
    double viol = -std::numeric_limits<double>::infinity();
    int j_star = -1;
    for (int j = 0; j < m; ++j) {
      w[j] = row_value(cons[j], theta) - cons[j].rhs;
      if (!in_passive[j] && !blocked[j] && w[j] > viol) {
        viol = w[j];
        j_star = j;
      }
    }

    const double floor =
        std::max(1e-12 * scale, 16.0 * kEps * std::max(scale, lam_max));
    if (j_star < 0 || viol <= floor) {
      out.converged = true;
      break;
    }
    if (out.iterations >= max_pivots) break;

    // admit the most violated constraint, keeping the start-order
    auto pos = std::upper_bound(passive.begin(), passive.end(), j_star,
                                [&](int a, int b) {
                                  if (cons[a].start != cons[b].start)
                                    return cons[a].start < cons[b].start;
                                  return a < b;
                                });
    const std::size_t at = static_cast<std::size_t>(pos - passive.begin());
    passive.insert(pos, j_star);
    lam.insert(lam.begin() + at, 0.0);
    in_passive[j_star] = 1;
    ++out.iterations;

    bool admitted = true;
    while (!passive.empty()) {
      if (!solve_passive(lam_hat)) {
        // dependent rows: try the degenerate exchange against the rows
        // that express the candidate; block the candidate only when no
        // exchange direction exists
        const auto it = std::find(passive.begin(), passive.end(), j_star);
        if (it == passive.end()) break;  // defensive: candidate already gone
        const std::size_t at = static_cast<std::size_t>(it - passive.begin());
        if (exchange_pivot(j_star, at)) continue;
        erase_passive(at);
        blocked[j_star] = 1;
        any_blocked = true;
        admitted = false;
        break;
      }
      double min_hat = std::numeric_limits<double>::infinity();
      for (double v : lam_hat) min_hat = std::min(min_hat, v);
      if (min_hat > 0.0) {
        lam = lam_hat;
        break;
      }
      // move toward lam_hat until the first component reaches zero
      double alpha = std::numeric_limits<double>::infinity();
      std::size_t pinch = passive.size();
      for (std::size_t p = 0; p < lam.size(); ++p) {
        if (lam_hat[p] <= 0.0) {
          const double denom = lam[p] - lam_hat[p];
          const double a = denom > 0.0 ? lam[p] / denom : 0.0;
          if (a < alpha) {
            alpha = a;
            pinch = p;
          }
        }
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      for (std::size_t p = 0; p < lam.size(); ++p)
        lam[p] += alpha * (lam_hat[p] - lam[p]);
      double lam_scale = 0.0;
      for (double v : lam) lam_scale = std::max(lam_scale, v);
      const double drop_tol = 1e-12 * lam_scale;
      bool dropped = false;
      std::size_t p = 0;
      while (p < lam.size()) {
        if (lam_hat[p] <= 0.0 && lam[p] <= drop_tol) {
          erase_passive(p);
          lam_hat.erase(lam_hat.begin() + p);
          if (p < pinch) --pinch;
          dropped = true;
          ++out.iterations;
        } else {
          ++p;
        }
      }
      if (!dropped && pinch < lam.size()) {
        lam_hat.erase(lam_hat.begin() + pinch);
        erase_passive(pinch);
        ++out.iterations;
      }
      if (out.iterations >= max_pivots) break;
    }

    if (admitted && any_blocked) {
      std::fill(blocked.begin(), blocked.end(), 0);
      any_blocked = false;
    }
    lam_max = 0.0;
    for (double v : lam) lam_max = std::max(lam_max, v);
  }

  rebuild_theta();
  out.point = theta;
  for (std::size_t p = 0; p < passive.size(); ++p)
    out.duals[passive[p]] = lam[p];

  // Residual over the KKT conditions: feasibility on every row and
  // tightness on rows with positive duals. Stationarity holds by
  // construction (theta is assembled as y - A^T lambda).
  double feas = 0.0, comp = 0.0;
  for (int j = 0; j < m; ++j) {
    const double wj = row_value(cons[j], theta) - cons[j].rhs;
    feas = std::max(feas, wj);
    if (out.duals[j] > 0.0) comp = std::max(comp, std::abs(wj));
  }
  out.kkt_residual = std::max(feas, comp);
  return out;
}

double norm2(const Sequence& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(const Sequence& a, const Sequence& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_zero(const Sequence& x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

std::vector<LinearConstraint> cone_constraints(std::size_t n,
                                               const ConeSpec& cone) {
  cone.validate(n);
  const int ni = static_cast<int>(n);
  std::vector<LinearConstraint> rows;
  switch (cone.kind) {
    case ConeSpec::Kind::FullConcave:
    case ConeSpec::Kind::ConcaveOrthoAffine:
      append_block_rows(rows, 0, ni);
      break;
    case ConeSpec::Kind::ModeConstrained: {
      const int k = cone.mode - 1;  // 0-based mode
      for (int j = 0; j + 2 < ni; ++j) {
        if (j == k - 1) continue;  // implied by the two mode rows below
        rows.push_back(second_diff_row(j));
      }
      if (k >= 1) rows.push_back(step_up_row(k - 1));
      if (k + 1 < ni) rows.push_back(step_down_row(k));
      break;
    }
    case ConeSpec::Kind::ThreeBlock: {
      append_block_rows(rows, 0, cone.m1);
      append_block_rows(rows, cone.m1, cone.m2 - 1);
      append_block_rows(rows, cone.m2 - 1, ni);
      if (cone.bound > 0.0) {
        for (int i = 0; i < ni; ++i) {
          rows.push_back(bound_row(i, 1.0, cone.bound));
          rows.push_back(bound_row(i, -1.0, cone.bound));
        }
      }
      break;
    }
    case ConeSpec::Kind::BoundedConcave: {
      append_block_rows(rows, 0, ni);
      for (int i = 0; i < ni; ++i) {
        rows.push_back(bound_row(i, 1.0, cone.bound));
        rows.push_back(bound_row(i, -1.0, cone.bound));
      }
      break;
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const LinearConstraint& a, const LinearConstraint& b) {
                     return a.start < b.start;
                   });
  return rows;
}

ProjectionResult project(const Sequence& y, const ConeSpec& cone, double tol) {
  require_finite(y, "project");
  cone.validate(y.size());
  if (!(tol > 0.0)) throw std::invalid_argument("project: tol must be > 0");

  const bool ortho = cone.kind == ConeSpec::Kind::ConcaveOrthoAffine;
  const Sequence input = ortho ? remove_affine(y) : y;
  const auto cons = cone_constraints(y.size(), cone);
  const int cap = 10 * static_cast<int>(y.size()) + 100;

  ActiveSetOutcome got = solve_projection(input, cons, cap);

  ProjectionResult result;
  result.point = std::move(got.point);
  result.duals = std::move(got.duals);
  result.iterations = got.iterations;
  result.kkt_residual = got.kkt_residual;

  if (ortho) {
    // the point must stay orthogonal to the affine subspace
    Sequence affine_part = project_affine(result.point);
    double excess = 0.0;
    for (double v : affine_part) excess = std::max(excess, std::abs(v));
    result.kkt_residual = std::max(
        result.kkt_residual, excess / std::max(1.0, norm2(result.point)));
  }

  double scale = 1.0;
  for (double v : input) scale = std::max(scale, std::abs(v));
  if (!got.converged || result.kkt_residual > tol * scale) {
    throw SolverError("projection did not reach the requested tolerance",
                      result.point, result.kkt_residual, result.iterations);
  }
  return result;
}

ProjectionResult project_ortho_affine(const Sequence& y, double tol) {
  return project(y, ConeSpec::concave_ortho_affine(), tol);
}

BallMaxResult ball_supremum(const Sequence& z, const Sequence& center,
                            double t, const ConeSpec& cone, double tol) {
  require_finite(z, "ball_supremum");
  require_finite(center, "ball_supremum");
  if (z.size() != center.size())
    throw std::invalid_argument("ball_supremum: z and center sizes differ");
  cone.validate(z.size());
  if (t < 0.0) throw std::domain_error("ball_supremum: radius t must be >= 0");
  if (!(tol > 0.0))
    throw std::invalid_argument("ball_supremum: tol must be > 0");

  const std::size_t n = z.size();
  BallMaxResult res;
  res.argmax = center;

  // anchor: the cone point closest to the center (equals the center when
  // the center is feasible)
  ProjectionResult anchor = project(center, cone, tol);
  const Sequence& p0 = anchor.point;
  Sequence u0(n);
  for (std::size_t i = 0; i < n; ++i) u0[i] = p0[i] - center[i];
  const double d0 = norm2(u0);

  if (d0 > t * (1.0 + 1e-12) + 1e-13 * (1.0 + norm2(center))) {
    res.feasible = false;
    res.value = -std::numeric_limits<double>::infinity();
    return res;
  }
  if (t == 0.0 || all_zero(z)) {
    res.argmax = p0;
    res.value = dot(z, u0);
    return res;
  }

  // exact cone identity at the apex: sup = t * ||proj(z)||
  if (cone.is_cone() && all_zero(center)) {
    ProjectionResult pr = project(z, cone, tol);
    const double pn = norm2(pr.point);
    res.iterations = pr.iterations;
    if (pn == 0.0) {
      res.value = 0.0;
      res.argmax.assign(n, 0.0);
      return res;
    }
    res.value = t * pn;
    res.argmax.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.argmax[i] = t * pr.point[i] / pn;
    res.certificate = 0.0;
    return res;
  }

  const double zn = norm2(z);
  const double lam0 = zn / t;

  double best_lower = dot(z, u0);
  Sequence best_arg = p0;
  double best_upper = std::numeric_limits<double>::infinity();

  auto evaluate = [&](double lam) -> double {
    Sequence arg(n);
    for (std::size_t i = 0; i < n; ++i) arg[i] = center[i] + z[i] / lam;
    ProjectionResult pr = project(arg, cone, tol);
    Sequence u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = pr.point[i] - center[i];
    const double radius = norm2(u);
    const double raw = dot(z, u);
    if (radius <= t) {
      best_upper = std::min(best_upper, raw + 0.5 * lam * (t * t - radius * radius));
      if (raw > best_lower) {
        best_lower = raw;
        best_arg = std::move(pr.point);
      }
    } else {
      // pull back onto the ball along the segment toward the anchor
      // (stays inside the cone by convexity)
      double a_lo = 0.0, a_hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double a = 0.5 * (a_lo + a_hi);
        double rr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double ui = (1.0 - a) * u0[i] + a * u[i];
          rr += ui * ui;
        }
        if (rr <= t * t)
          a_lo = a;
        else
          a_hi = a;
      }
      double val = 0.0;
      Sequence arg2(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ui = (1.0 - a_lo) * u0[i] + a_lo * u[i];
        arg2[i] = center[i] + ui;
        val += z[i] * ui;
      }
      if (val > best_lower) {
        best_lower = val;
        best_arg = std::move(arg2);
      }
    }
    ++res.iterations;
    return radius;
  };

  auto gap_small = [&]() {
    return std::isfinite(best_upper) &&
           best_upper - best_lower <= tol * (std::abs(best_lower) + 1.0);
  };

  // radius(lambda) is non-increasing; find lam_hi with radius <= t
  double lam_hi = lam0;
  double r_hi = evaluate(lam_hi);
  int guard = 0;
  while (r_hi > t && guard++ < 60) {
    lam_hi *= 8.0;
    r_hi = evaluate(lam_hi);
  }
  if (r_hi > t)
    throw SolverError("ball_supremum: radius would not shrink to t", best_arg,
                      r_hi - t, res.iterations);

  // find lam_lo with radius > t, or certify an interior optimum
  double lam_lo = lam_hi;
  double r_lo = r_hi;
  guard = 0;
  while (r_lo <= t && !gap_small() && lam_lo > lam0 * 1e-12 && guard++ < 60) {
    lam_lo /= 8.0;
    r_lo = evaluate(lam_lo);
  }

  if (r_lo > t) {
    for (int it = 0; it < 200 && !gap_small(); ++it) {
      const double lam = std::sqrt(lam_lo * lam_hi);
      const double r = evaluate(lam);
      if (r > t)
        lam_lo = lam;
      else
        lam_hi = lam;
    }
  }

  res.value = best_lower;
  res.argmax = best_arg;
  res.certificate =
      std::isfinite(best_upper) ? std::max(0.0, best_upper - best_lower) : 0.0;
  if (!gap_small() &&
      res.certificate > 1e-6 * (std::abs(res.value) + 1.0)) {
    throw SolverError("ball_supremum: bisection failed to certify the value",
                      res.argmax, res.certificate, res.iterations);
  }
  return res;
}

BallMaxResult max_linear_over_ball(const Sequence& z, const Sequence& center,
                                   double t, const ConeSpec& cone,
                                   double tol) {
  if (t < 0.0)
    throw std::domain_error("max_linear_over_ball: radius t must be >= 0");
  if (!is_member(center, cone, 1e-7))
    throw std::invalid_argument(
        "max_linear_over_ball: center must belong to the cone");
  BallMaxResult res = ball_supremum(z, center, t, cone, tol);
  if (res.value < 0.0) {
    // the center itself is feasible, so the supremum is at least zero
    res.value = 0.0;
    res.argmax = center;
  }
  return res;
}

}  // namespace creg
