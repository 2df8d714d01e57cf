#pragma once

#include <lichmp/coefficients.hpp>
#include <lichmp/functional.hpp>
#include <lichmp/mountain_pass.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <vector>

namespace lichmp::testing {

/// Positive smooth field: a constant floor plus a few random bumps.
inline Field random_positive_field(const DomainPtr& d, std::mt19937_64& rng, double floor = 0.1) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int dim = d->kind() == DomainKind::RadialEuclidean ? 1 : d->dimension();
  std::vector<std::vector<double>> centers(3, std::vector<double>(static_cast<std::size_t>(dim)));
  std::vector<double> amp(3), width(3);
  for (int k = 0; k < 3; ++k) {
    for (double& x : centers[static_cast<std::size_t>(k)]) x = U(rng) * d->extent();
    amp[static_cast<std::size_t>(k)] = 0.5 + U(rng);
    width[static_cast<std::size_t>(k)] = (0.1 + 0.2 * U(rng)) * d->extent();
  }
  Field u(d, floor);
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const double z = d->distance(i, centers[static_cast<std::size_t>(k)]) / width[static_cast<std::size_t>(k)];
      u[i] += amp[static_cast<std::size_t>(k)] * std::exp(-z * z);
    }
  }
  if (d->kind() == DomainKind::RadialEuclidean) {
    // Vanish smoothly towards the Dirichlet face.
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double s = d->radii()[i] / d->extent();
      u[i] *= 1.0 - s * s;
    }
  }
  return u;
}

inline Field random_field(const DomainPtr& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field v(d);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = U(rng);
  return v;
}

struct FdResult {
  double fd = 0.0;
  double exact = 0.0;
  double scale = 0.0;
  double rel_error() const { return std::fabs(fd - exact) / scale; }
};

/// Central difference of I_ε along v against the assembled gradient.
inline FdResult fd_check(const CoefficientSet& c, const Field& u, const Field& v, double eps,
                         double h = 1e-6) {
  Field up = u, um = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += h * v[i];
    um[i] -= h * v[i];
  }
  FdResult r;
  r.fd = (energy_value(c, up.values(), eps) - energy_value(c, um.values(), eps)) / (2.0 * h);
  const Field g = gradient(c, u, eps);
  r.exact = directional_derivative(g, v);
  for (std::size_t i = 0; i < u.size(); ++i) r.scale += std::fabs(g[i] * v[i]);
  // Cancellation floor of the energy difference itself.
  r.scale = std::max(r.scale, 1e-300);
  return r;
}

/// Minimum over grid paths from `start` to `goal` of the maximum energy along
/// the path (8-neighbour moves), by a bottleneck variant of Dijkstra.
inline double grid_minimax(const std::function<double(double, double)>& E, double x0, double x1,
                           double y0, double y1, int n, std::pair<double, double> start,
                           std::pair<double, double> goal) {
  auto xi = [&](int i) { return x0 + (x1 - x0) * i / (n - 1); };
  auto yj = [&](int j) { return y0 + (y1 - y0) * j / (n - 1); };
  auto nearest = [&](std::pair<double, double> p) {
    const int i = static_cast<int>(std::lround((p.first - x0) / (x1 - x0) * (n - 1)));
    const int j = static_cast<int>(std::lround((p.second - y0) / (y1 - y0) * (n - 1)));
    return std::clamp(i, 0, n - 1) * n + std::clamp(j, 0, n - 1);
  };
  std::vector<double> e(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(i * n + j)] = E(xi(i), yj(j));
  }
  std::vector<double> best(e.size(), std::numeric_limits<double>::infinity());
  const int s = nearest(start);
  const int g = nearest(goal);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  best[static_cast<std::size_t>(s)] = e[static_cast<std::size_t>(s)];
  q.push({best[static_cast<std::size_t>(s)], s});
  while (!q.empty()) {
    const auto [v, k] = q.top();
    q.pop();
    if (v > best[static_cast<std::size_t>(k)]) continue;
    if (k == g) return v;
    const int i = k / n;
    const int j = k % n;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int ii = i + di;
        const int jj = j + dj;
        if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
        const int kk = ii * n + jj;
        const double nv = std::max(v, e[static_cast<std::size_t>(kk)]);
        if (nv < best[static_cast<std::size_t>(kk)]) {
          best[static_cast<std::size_t>(kk)] = nv;
          q.push({nv, kk});
        }
      }
    }
  }
  return best[static_cast<std::size_t>(g)];
}

}  // namespace lichmp::testing
