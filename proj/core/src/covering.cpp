#include "creg/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "creg/projection.hpp"
#include "creg/rng.hpp"
#include "creg/stats.hpp"

namespace creg {

namespace {

double dist2(const Sequence& a, const Sequence& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// deterministic shape library scaled to sup-norm B
std::vector<Sequence> extremal_shapes(int n, double B) {
  std::vector<Sequence> out;
  auto add = [&](Sequence s) {
    double m = 0.0;
    for (double v : s) m = std::max(m, std::abs(v));
    if (m > 0)
      for (double& v : s) v *= B / m;
    out.push_back(std::move(s));
  };
  Sequence ramp(n), tri(n), para(n), flat_hi(n, 1.0), flat_lo(n, -1.0);
  for (int i = 0; i < n; ++i) {
    const double x = n > 1 ? 2.0 * i / (n - 1.0) - 1.0 : 0.0;
    ramp[i] = x;
    para[i] = 1.0 - x * x;
    tri[i] = 1.0 - std::abs(x);
  }
  add(ramp);
  Sequence neg = ramp;
  for (double& v : neg) v = -v;
  add(neg);
  add(para);
  add(tri);
  out.push_back(flat_hi);
  for (double& v : flat_hi) v = -v;
  out.push_back(flat_lo);
  // off-centre triangles
  for (int frac = 1; frac <= 3; ++frac) {
    Sequence t(n);
    const double peak = 1 + (n - 1) * frac / 4.0;
    for (int i = 0; i < n; ++i)
      t[i] = 1.0 - std::abs(i + 1 - peak) / std::max(1.0, n - 1.0);
    add(t);
  }
  return out;
}

}  // namespace

BoundedConeSampler::BoundedConeSampler(int n, double B, bool three_block,
                                       std::uint64_t seed)
    : n_(n), B_(B), three_block_(three_block), seed_(seed) {
  if (n < 3) throw std::invalid_argument("sampler: n >= 3 required");
  if (!(B > 0)) throw std::invalid_argument("sampler: B > 0 required");
  extremals_ = extremal_shapes(n, B);
}

Sequence BoundedConeSampler::operator()(long k) {
  auto eng = replication_engine(seed_, static_cast<std::uint64_t>(k));
  ConeSpec cone = ConeSpec::bounded_concave(B_);
  if (three_block_) {
    // uniform breakpoints 0 <= m1 < m2 <= n+1
    const int m1 = static_cast<int>(eng() % static_cast<std::uint64_t>(n_ + 1));
    const int span = n_ + 1 - m1;
    const int m2 = m1 + 1 + static_cast<int>(eng() % static_cast<std::uint64_t>(span));
    cone = ConeSpec::three_block(m1, m2, B_);
  }
  Sequence probe;
  if (k < static_cast<long>(extremals_.size())) {
    probe = extremals_[static_cast<std::size_t>(k)];
  } else {
    // Gaussian probes at geometrically varied scale
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = B_ * std::pow(2.0, static_cast<double>(k % 5) - 2.0);
    probe.resize(n_);
    for (int i = 0; i < n_; ++i) probe[i] = scale * normal(eng);
  }
  return project(probe, cone).point;
}

EntropyEstimate greedy_packing(int n, double B, double epsilon,
                               bool three_block, long budget,
                               std::uint64_t seed) {
  if (!(epsilon > 0))
    throw std::invalid_argument("greedy_packing: epsilon > 0 required");
  if (budget < 1)
    throw std::invalid_argument("greedy_packing: budget >= 1 required");
  BoundedConeSampler sampler(n, B, three_block, seed);

  std::vector<Sequence> accepted;
  accepted.emplace_back(n, 0.0);  // the origin belongs to every variant

  const double eps2 = epsilon * epsilon;
  long since_accept = 0;
  for (long k = 0; since_accept < budget; ++k) {
    const Sequence p = sampler(k);
    bool separated = true;
    for (const auto& q : accepted) {
      if (dist2(p, q) <= eps2) {
        separated = false;
        break;
      }
    }
    if (separated) {
      accepted.push_back(p);
      since_accept = 0;
    } else {
      ++since_accept;
    }
  }

  EntropyEstimate est;
  est.n = n;
  est.B = B;
  est.epsilon = epsilon;
  est.packing_count = static_cast<long>(accepted.size());
  est.log_packing = std::log(static_cast<double>(est.packing_count));
  return est;
}

NetSpec make_net_spec(int n, double B, double epsilon) {
  if (n < 3) throw std::invalid_argument("make_net_spec: n >= 3 required");
  if (!(B > 0) || !(epsilon > 0))
    throw std::invalid_argument("make_net_spec: B, epsilon > 0 required");
  NetSpec spec;
  spec.n = n;
  spec.B = B;
  spec.epsilon = epsilon;
  // knot budget ~ n^{1/4} sqrt(B/eps); always keep the endpoints
  const double raw = 2.0 * std::pow(static_cast<double>(n), 0.25) *
                     std::sqrt(B / epsilon);
  const int interior =
      std::clamp(static_cast<int>(std::ceil(raw)), 0, std::max(0, n - 2));
  const int m = interior + 2;
  spec.knots.reserve(m);
  for (int j = 0; j < m; ++j) {
    const int idx =
        1 + static_cast<int>(std::llround((static_cast<double>(j) * (n - 1)) /
                                          (m - 1)));
    if (spec.knots.empty() || idx > spec.knots.back())
      spec.knots.push_back(idx);
  }
  if (spec.knots.back() != n) spec.knots.push_back(n);
  spec.step = 0.9 * epsilon / std::sqrt(static_cast<double>(n));
  spec.grid_bound = std::floor(B / spec.step) * spec.step;
  return spec;
}

Sequence canonical_net_point(const Sequence& theta, const NetSpec& spec) {
  if (static_cast<int>(theta.size()) != spec.n)
    throw std::invalid_argument("canonical_net_point: size mismatch");
  const auto& ks = spec.knots;
  const std::size_t m = ks.size();
  std::vector<double> v(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double raw = theta[ks[j] - 1];
    double snapped = std::round(raw / spec.step) * spec.step;
    snapped = std::clamp(snapped, -spec.grid_bound, spec.grid_bound);
    v[j] = snapped;
  }
  // least concave majorant over the knot abscissae (upper hull)
  std::vector<std::size_t> hull;
  for (std::size_t j = 0; j < m; ++j) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double xa = ks[a], xb = ks[b], xc = ks[j];
      // keep the hull concave: slope(a,b) >= slope(b,c)
      if ((v[b] - v[a]) * (xc - xb) < (v[j] - v[b]) * (xb - xa))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(j);
  }
  Sequence out(spec.n, 0.0);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t a = hull[h], b = hull[h + 1];
    const int xa = ks[a], xb = ks[b];
    for (int x = xa; x <= xb; ++x) {
      const double w = xb > xa ? static_cast<double>(x - xa) / (xb - xa) : 0.0;
      out[x - 1] = (1.0 - w) * v[a] + w * v[b];
    }
  }
  if (hull.size() == 1) out.assign(spec.n, v[hull[0]]);
  return out;
}

NetCount interpolation_net(int n, double B, double epsilon, long sample_budget,
                           std::uint64_t seed) {
  const NetSpec spec = make_net_spec(n, B, epsilon);
  // memory guard: a net point is n doubles; cap the distinct set
  const long hard_cap = 4'000'000 / std::max(1, n);
  BoundedConeSampler sampler(n, B, /*three_block=*/false, seed);

  std::unordered_set<std::string> seen;
  NetCount out;
  long fresh_in_batch = 0;
  const long batch = 2000;
  for (long k = 0; k < sample_budget; ++k) {
    const Sequence member = sampler(k);
    const Sequence img = canonical_net_point(member, spec);
    out.max_distance =
        std::max(out.max_distance, std::sqrt(dist2(member, img)));
    std::string key(reinterpret_cast<const char*>(img.data()),
                    img.size() * sizeof(double));
    if (seen.insert(std::move(key)).second) ++fresh_in_batch;
    ++out.samples;
    if (static_cast<long>(seen.size()) >= hard_cap) break;
    if (k > 0 && k % batch == 0) {
      if (fresh_in_batch == 0) break;  // plateau: nothing new in a batch
      fresh_in_batch = 0;
    }
  }
  out.count = static_cast<long>(seen.size());
  return out;
}

EntropySlopes fit_entropy_exponents(const std::vector<EntropyEstimate>& rows) {
  EntropySlopes slopes;

  auto try_fit = [](const std::vector<double>& x, const std::vector<double>& y)
      -> std::optional<double> {
    if (x.size() < 4) return std::nullopt;
    return fit_line(x, y).slope;
  };

  // group by (n, B) and fit against log(1/eps)
  {
    std::map<std::pair<int, double>, std::vector<const EntropyEstimate*>> groups;
    for (const auto& r : rows) groups[{r.n, r.B}].push_back(&r);
    std::size_t best = 0;
    std::vector<double> x, y;
    for (const auto& [key, g] : groups) {
      if (g.size() <= best) continue;
      std::vector<double> gx, gy;
      for (const auto* r : g) {
        if (r->packing_count < 2) continue;
        gx.push_back(std::log(1.0 / r->epsilon));
        gy.push_back(std::log(std::log(static_cast<double>(r->packing_count))));
      }
      if (gx.size() > best) {
        best = gx.size();
        x = gx;
        y = gy;
      }
    }
    slopes.epsilon_slope = try_fit(x, y);
  }

  // group by (B, eps) and fit against log n
  {
    std::map<std::pair<double, double>, std::vector<const EntropyEstimate*>>
        groups;
    for (const auto& r : rows) groups[{r.B, r.epsilon}].push_back(&r);
    std::size_t best = 0;
    std::vector<double> x, y;
    for (const auto& [key, g] : groups) {
      std::vector<double> gx, gy;
      for (const auto* r : g) {
        if (r->packing_count < 2) continue;
        gx.push_back(std::log(static_cast<double>(r->n)));
        gy.push_back(std::log(std::log(static_cast<double>(r->packing_count))));
      }
      if (gx.size() > best) {
        best = gx.size();
        x = gx;
        y = gy;
      }
    }
    slopes.n_slope = try_fit(x, y);
  }

  if (!slopes.epsilon_slope && !slopes.n_slope)
    throw std::invalid_argument(
        "fit_entropy_exponents: need >= 4 points with packing_count >= 2 "
        "varying one of epsilon or n");
  return slopes;
}

}  // namespace creg
