#include <lichmp/admissibility.hpp>
#include <lichmp/error.hpp>
#include <lichmp/functional.hpp>
#include <lichmp/verify.hpp>

#include "sparse_ops.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lichmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_nonnegative(const Field& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0) {
      throw Error(ErrorKind::Precondition, "u is negative at node " + std::to_string(i));
    }
  }
}

std::vector<double> operator_values(const Domain& d, const Field& u) {
  std::vector<double> ku(u.size());
  apply_stiffness(d, u.values(), ku);
  const auto w = d.weights();
  for (std::size_t i = 0; i < ku.size(); ++i) ku[i] /= w[i];
  return ku;
}

std::vector<double> random_point(const Domain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (d.kind() == DomainKind::RadialEuclidean) return {unit(rng) * d.extent()};
  std::vector<double> x(static_cast<std::size_t>(d.dimension()));
  for (double& v : x) v = unit(rng) * d.extent();
  return x;
}

std::size_t nearest_node(const Domain& d, std::span<const double> point) {
  std::size_t best = 0;
  double best_dist = kInf;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dist = d.distance(i, point);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

}  // namespace

SupersolutionResult supersolution_test(const CoefficientSet& c, const Field& u,
                                       const std::vector<Field>& extra, double eps) {
  require_same_domain(c.domain(), u);
  require_nonnegative(u);
  if (eps < 0.0) throw Error(ErrorKind::Parameter, "epsilon must be nonnegative");
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  const std::vector<double> ku = operator_values(d, u);

  SupersolutionResult res;
  std::vector<double> rho(u.size());
  std::size_t first_bad = u.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lin = ku[i] + c.V[i] * u[i];
    const double crit = c.B[i] * std::pow(u[i], p - 1.0);
    double sing = 0.0;
    if (c.supp_A[i]) {
      if (eps > 0.0) {
        sing = c.A[i] * u[i] / std::pow(eps + u[i] * u[i], 0.5 * p + 1.0);
      } else if (u[i] < kPositivityFloor) {
        sing = kInf;
        if (first_bad == u.size()) first_bad = i;
      } else {
        sing = c.A[i] / std::pow(u[i], p + 1.0);
      }
    }
    rho[i] = lin - crit - sing;
    double mag = std::fabs(ku[i]) + std::fabs(c.V[i] * u[i]) + std::fabs(crit);
    if (std::isfinite(sing)) mag += std::fabs(sing);
    res.scale = std::max(res.scale, mag);
  }
  res.integrable = first_bad == u.size();
  if (!res.integrable) {
    res.diagnosis = "u vanishes at node " + std::to_string(first_bad) +
                    " of supp A: the singular integral is not finite";
  }

  res.per_test = rho;
  for (const Field& phi : extra) {
    require_same_domain(d, phi);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (phi[i] < 0.0) throw Error(ErrorKind::Precondition, "test function must be nonnegative");
      if (phi[i] == 0.0) continue;
      num += w[i] * phi[i] * rho[i];
      den += w[i] * phi[i];
    }
    res.per_test.push_back(den > 0.0 ? num / den : 0.0);
  }
  res.worst = static_cast<std::size_t>(
      std::min_element(res.per_test.begin(), res.per_test.end()) - res.per_test.begin());
  res.margin = res.per_test[res.worst];
  res.tolerance = 1e-6 * res.scale;
  res.pass = res.integrable && res.margin >= -res.tolerance;
  if (res.integrable && !res.pass) {
    const bool hat = res.worst < u.size();
    res.diagnosis = std::string(hat ? "hat at node " : "test function ") +
                    std::to_string(hat ? res.worst : res.worst - u.size()) + " has margin " +
                    std::to_string(res.margin) + " below -" + std::to_string(res.tolerance);
  }
  return res;
}

std::vector<Field> random_bumps(const DomainPtr& d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rmin = 4.0 * d->spacing();
  const double rmax = std::max(rmin, 0.25 * d->extent());
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    const std::vector<double> center = random_point(*d, rng);
    const double radius = rmin + unit(rng) * (rmax - rmin);
    Field phi(d);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double z = d->distance(i, center) / radius;
      if (z < 1.0) phi[i] = (1.0 - z * z) * (1.0 - z * z);
    }
    if (phi.max() <= 0.0) phi[nearest_node(*d, center)] = 1.0;
    out.push_back(std::move(phi));
  }
  return out;
}

double solution_residual(const CoefficientSet& c, const Field& u) {
  require_same_domain(c.domain(), u);
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (c.supp_A[i] && !(u[i] > 0.0)) {
      throw Error(ErrorKind::Precondition, "u must be positive on supp A");
    }
  }
  const std::vector<double> ku = operator_values(d, u);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double r = ku[i] + c.V[i] * u[i] - c.B[i] * std::pow(std::fabs(u[i]), p - 2.0) * u[i];
    if (c.supp_A[i]) r -= c.A[i] / std::pow(u[i], p + 1.0);
    s += w[i] * r * r;
  }
  return std::sqrt(s);
}

Ball make_ball(const Domain& d, std::vector<double> center, double radius) {
  Ball b{std::move(center), radius, NodeMask(d.size(), 0)};
  bool any = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.distance(i, b.center) <= radius) {
      b.mask[i] = 1;
      any = true;
    }
  }
  if (!any) b.mask[nearest_node(d, b.center)] = 1;
  return b;
}

std::vector<Ball> default_balls(const Domain& d) {
  const double L = d.extent();
  std::vector<Ball> balls;
  if (d.kind() == DomainKind::RadialEuclidean) {
    for (int k = 0; k <= 16; ++k) balls.push_back(make_ball(d, {k * L / 16.0}, L / 8.0));
    return balls;
  }
  const int n = d.dimension();
  const int per_axis = n <= 3 ? 8 : 4;
  const double step = L / per_axis;
  const double radius = std::max(L / 8.0, 0.5 * std::sqrt(static_cast<double>(n)) * step * 1.001);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> center(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) center[static_cast<std::size_t>(a)] = (idx[static_cast<std::size_t>(a)] + 0.5) * step;
    balls.push_back(make_ball(d, std::move(center), radius));
    int a = 0;
    while (a < n && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n) break;
  }
  return balls;
}

PositivityReport positivity_check(const Field& u, const std::vector<Ball>& balls) {
  PositivityReport rep;
  rep.min_value = u.min();
  rep.pass = true;
  for (std::size_t b = 0; b < balls.size(); ++b) {
    double m = kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (balls[b].mask[i]) m = std::min(m, u[i]);
    }
    rep.per_ball_min.push_back(m);
    if (!(m > kPositivityFloor)) {
      rep.pass = false;
      if (!rep.offending) rep.offending = b;
    }
  }
  return rep;
}

FiniteEnergy finite_energy(const CoefficientSet& c, const Field& u) {
  require_same_domain(c.domain(), u);
  const double p = two_star(c.domain().dimension());
  const auto w = c.domain().weights();
  FiniteEnergy fe;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::fabs(u[i]);
    fe.critical_part += w[i] * std::fabs(c.B[i]) * std::pow(a, p);
    if (c.supp_A[i]) {
      fe.singular_part += a < kPositivityFloor ? kInf : w[i] * c.A[i] / std::pow(a, p);
    }
  }
  fe.both_finite = std::isfinite(fe.critical_part) && std::isfinite(fe.singular_part);
  return fe;
}

HarnackResult harnack_probe(const Field& u, double d_coef, const std::vector<double>& center,
                            double R, double q) {
  if (!(R > 0.0) || !(q > 0.0)) throw Error(ErrorKind::Parameter, "need R > 0 and q > 0");
  const Domain& d = u.domain();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0) throw Error(ErrorKind::Hypothesis, "u must be nonnegative");
  }
  const Ball big = make_ball(d, center, R);
  const Ball mid = make_ball(d, center, R / 8.0);
  const Ball small = make_ball(d, center, R / 16.0);
  const std::vector<double> ku = operator_values(d, u);

  HarnackResult res;
  res.q = q;
  res.hypothesis_margin = kInf;
  double scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!big.mask[i]) continue;
    res.hypothesis_margin = std::min(res.hypothesis_margin, ku[i] + d_coef * u[i]);
    scale = std::max(scale, std::fabs(ku[i]) + std::fabs(d_coef * u[i]));
  }
  if (res.hypothesis_margin < -1e-9 * scale) {
    throw Error(ErrorKind::Hypothesis, "-Δu + d u >= 0 fails on B(R), margin " +
                                           std::to_string(res.hypothesis_margin));
  }
  const auto w = d.weights();
  double integral = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mid.mask[i]) integral += w[i] * std::pow(u[i], q);
  }
  res.lhs = std::pow(integral, 1.0 / q);
  res.rhs_inf = kInf;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (small.mask[i]) res.rhs_inf = std::min(res.rhs_inf, u[i]);
  }
  if (res.rhs_inf > kPositivityFloor) {
    res.ratio = res.lhs / res.rhs_inf;
  } else {
    res.ratio = kInf;
    // A vanishing infimum is only consistent with the minimum principle when
    // u vanishes on the whole ball.
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (big.mask[i] && u[i] > kPositivityFloor) res.smp_consistent = false;
    }
  }
  return res;
}

std::vector<Field> supersolution_family(const DomainPtr& d, double d_coef, int count,
                                        std::uint64_t seed) {
  if (!(d_coef > 0.0)) throw Error(ErrorKind::Parameter, "family needs d > 0");
  const auto w = d->weights();
  std::vector<double> diag(d->size());
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = d_coef * w[i];
  Eigen::ConjugateGradient<detail::SparseMatrix, Eigen::Lower | Eigen::Upper> solver;
  solver.setTolerance(1e-13);
  solver.setMaxIterations(20 * static_cast<Eigen::Index>(d->size()));
  const detail::SparseMatrix op = detail::assemble_operator(*d, diag);
  solver.compute(op);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Field> out;
  for (int k = 0; k < count; ++k) {
    struct Source {
      std::vector<double> center;
      double amplitude;
      double width;
    };
    std::vector<Source> sources;
    for (int s = 0; s < 3; ++s) {
      std::vector<double> c = random_point(*d, rng);
      const double amp = 0.5 + 1.5 * unit(rng);
      const double width = (0.05 + 0.15 * unit(rng)) * d->extent();
      sources.push_back({std::move(c), amp, width});
    }
    detail::Vector rhs(static_cast<Eigen::Index>(d->size()));
    for (std::size_t i = 0; i < d->size(); ++i) {
      double f = 0.0;
      for (const auto& s : sources) {
        const double z = d->distance(i, s.center) / s.width;
        f += s.amplitude * std::exp(-z * z);
      }
      rhs[static_cast<Eigen::Index>(i)] = w[i] * f;
    }
    const detail::Vector sol = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::Coercivity, "family solve did not converge");
    out.emplace_back(d, std::vector<double>(sol.data(), sol.data() + sol.size()));
  }
  return out;
}

HarnackBench harnack_bench(const DomainPtr& d, double d_coef, int count, std::uint64_t seed,
                           const std::vector<double>& center, double R, double q) {
  HarnackBench bench;
  for (const Field& u : supersolution_family(d, d_coef, count, seed)) {
    const HarnackResult r = harnack_probe(u, d_coef, center, R, q);
    bench.ratios.push_back(r.ratio);
    bench.all_finite = bench.all_finite && std::isfinite(r.ratio);
    bench.constant_estimate = std::max(bench.constant_estimate, r.ratio);
  }
  return bench;
}

VerificationReport verify_field(const CoefficientSet& c, const Field& u, const VerifyOptions& opt) {
  require_same_domain(c.domain(), u);
  const Domain& d = c.domain();
  VerificationReport rep;
  rep.eps = opt.eps;
  const std::vector<Field> bumps = random_bumps(c.domain_ptr(), opt.random_tests, opt.seed);

  const SupersolutionResult sup = supersolution_test(c, u, bumps, 0.0);
  rep.supersolution_margin = sup.margin;
  rep.verdicts.supersolution = sup.pass;
  if (!sup.diagnosis.empty()) rep.diagnosis = "unregularized: " + sup.diagnosis;
  if (opt.eps > 0.0) {
    const SupersolutionResult se = supersolution_test(c, u, bumps, opt.eps);
    rep.supersolution_margin_eps = se.margin;
    rep.verdicts.supersolution_eps = se.pass;
    if (!se.diagnosis.empty()) {
      if (!rep.diagnosis.empty()) rep.diagnosis += "; ";
      rep.diagnosis += "regularized: " + se.diagnosis;
    }
  } else {
    rep.supersolution_margin_eps = kNaN;
  }

  bool positive_on_A = true;
  for (std::size_t i = 0; i < u.size(); ++i) positive_on_A = positive_on_A && (!c.supp_A[i] || u[i] > 0.0);
  rep.residual_norm = positive_on_A ? solution_residual(c, u) : kNaN;

  rep.finite_energy = finite_energy(c, u);
  rep.verdicts.finite_energy = rep.finite_energy.both_finite;
  rep.positivity = positivity_check(u, default_balls(d));
  rep.verdicts.positivity = rep.positivity.pass;

  std::vector<double> center;
  double R = d.extent();
  if (d.kind() == DomainKind::RadialEuclidean) {
    center = {0.0};
    R = 0.5 * d.extent();
  } else {
    center.assign(static_cast<std::size_t>(d.dimension()), 0.5 * d.extent());
  }
  const double dval = std::max(opt.harnack_d, c.V.max());
  try {
    rep.harnack = harnack_probe(u, dval, center, R, opt.q);
    rep.verdicts.harnack = std::isfinite(rep.harnack.ratio);
  } catch (const Error& e) {
    rep.harnack.q = opt.q;
    rep.harnack.ratio = kNaN;
    rep.verdicts.harnack = false;
    if (!rep.diagnosis.empty()) rep.diagnosis += "; ";
    rep.diagnosis += e.what();
  }
  rep.harnack_constant_estimate = rep.harnack.ratio;
  return rep;
}

}  // namespace lichmp
