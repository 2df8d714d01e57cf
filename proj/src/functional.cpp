#include <lichmp/admissibility.hpp>
#include <lichmp/error.hpp>
#include <lichmp/functional.hpp>

#include "functional_detail.hpp"
#include "sparse_ops.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lichmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double quadratic_form(const CoefficientSet& c, std::span<const double> u,
                      std::span<const double> v) {
  const Domain& d = c.domain();
  const auto w = d.weights();
  const auto bnd = d.boundary_conductance();
  double s = 0.0;
  for (const auto& e : d.couplings()) s += e.conductance * (u[e.i] - u[e.j]) * (v[e.i] - v[e.j]);
  for (std::size_t i = 0; i < u.size(); ++i) s += (bnd[i] + w[i] * c.V[i]) * u[i] * v[i];
  return s;
}

}  // namespace

double nonlinearity(double a, double b, double s, double eps, double p) {
  const double as = std::fabs(s);
  double f = b * std::pow(as, p - 2.0) * s;
  if (a != 0.0) f += a * s / std::pow(eps + s * s, 0.5 * p + 1.0);
  return f;
}

double nonlinearity_slope(double a, double b, double s, double eps, double p) {
  double df = (p - 1.0) * b * std::pow(std::fabs(s), p - 2.0);
  if (a != 0.0) {
    const double q = eps + s * s;
    df += a * (q - (p + 2.0) * s * s) / std::pow(q, 0.5 * p + 2.0);
  }
  return df;
}

double inner_product(const CoefficientSet& c, const Field& u, const Field& v) {
  require_same_domain(c.domain(), u);
  require_same_domain(c.domain(), v);
  return quadratic_form(c, u.values(), v.values());
}

double v_norm(const CoefficientSet& c, const Field& u) {
  const double q = inner_product(c, u, u);
  if (q < 0.0) throw Error(ErrorKind::Coercivity, "negative quadratic form: (V) violated");
  return std::sqrt(q);
}

EnergyBreakdown energy(const CoefficientSet& c, const Field& u, double eps) {
  require_same_domain(c.domain(), u);
  if (eps < 0.0) throw Error(ErrorKind::Parameter, "epsilon must be nonnegative");
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  EnergyBreakdown e;
  e.epsilon = eps;
  e.quadratic = 0.5 * quadratic_form(c, u.values(), u.values());
  double crit = 0.0;
  double sing = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = u[i];
    crit += w[i] * c.B[i] * std::pow(std::fabs(s), p);
    if (!c.supp_A[i]) continue;
    if (eps > 0.0) {
      sing += w[i] * c.A[i] / std::pow(eps + s * s, 0.5 * p);
    } else if (std::fabs(s) < kPositivityFloor) {
      e.singular_infinite = true;
    } else {
      sing += w[i] * c.A[i] / std::pow(std::fabs(s), p);
    }
  }
  e.critical = crit / p;
  e.singular = e.singular_infinite ? kInf : sing / p;
  e.total = e.singular_infinite ? kInf : e.quadratic - e.critical + e.singular;
  return e;
}

double energy_value(const CoefficientSet& c, std::span<const double> u, double eps) {
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  double s = 0.5 * quadratic_form(c, u, u);
  double rest = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    double t = -c.B[i] * std::pow(std::fabs(v), p);
    if (c.supp_A[i]) t += c.A[i] / std::pow(eps + v * v, 0.5 * p);
    rest += w[i] * t;
  }
  return s + rest / p;
}

void gradient_into(const CoefficientSet& c, std::span<const double> u, double eps,
                   std::span<double> out) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Parameter, "gradient requires epsilon > 0");
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  apply_stiffness(d, u, out);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = c.supp_A[i] ? c.A[i] : 0.0;
    out[i] += w[i] * (c.V[i] * u[i] - nonlinearity(a, c.B[i], u[i], eps, p));
  }
}

Field gradient(const CoefficientSet& c, const Field& u, double eps) {
  require_same_domain(c.domain(), u);
  Field g(u.domain_ptr());
  gradient_into(c, u.values(), eps, g.values());
  return g;
}

double directional_derivative(const Field& dual, const Field& v) {
  require_same_domain(dual.domain(), v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += dual[i] * v[i];
  return s;
}

namespace detail {

SparseMatrix v_operator(const CoefficientSet& c) {
  const Domain& d = c.domain();
  const auto w = d.weights();
  std::vector<double> diag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) diag[i] = w[i] * c.V[i];
  return assemble_operator(d, diag);
}

SparseMatrix jacobian(const CoefficientSet& c, std::span<const double> u, double eps,
                      const SparseMatrix& v_op) {
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  SparseMatrix jac = v_op;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = c.supp_A[i] ? c.A[i] : 0.0;
    const auto k = static_cast<Eigen::Index>(i);
    jac.coeffRef(k, k) -= w[i] * nonlinearity_slope(a, c.B[i], u[i], eps, p);
  }
  return jac;
}

}  // namespace detail

struct RieszMap::Impl {
  Eigen::SimplicialLDLT<detail::SparseMatrix> solver;
};

RieszMap::RieszMap(const CoefficientSet& c) : impl_(std::make_unique<Impl>()) {
  impl_->solver.compute(detail::v_operator(c));
  if (impl_->solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Coercivity, "operator -Δ + V is not positive definite on this grid");
  }
  const auto& diag = impl_->solver.vectorD();
  if ((diag.array() <= 0.0).any()) {
    throw Error(ErrorKind::Coercivity, "operator -Δ + V is not positive definite on this grid");
  }
}

RieszMap::~RieszMap() = default;
RieszMap::RieszMap(RieszMap&&) noexcept = default;
RieszMap& RieszMap::operator=(RieszMap&&) noexcept = default;

void RieszMap::apply(std::span<const double> dual, std::span<double> out) const {
  detail::view(out) = impl_->solver.solve(detail::view(dual));
}

Field RieszMap::apply(const Field& dual) const {
  Field out(dual.domain_ptr());
  apply(dual.values(), out.values());
  return out;
}

double RieszMap::dual_norm(std::span<const double> dual) const {
  const detail::Vector x = impl_->solver.solve(detail::view(dual));
  return std::sqrt(std::max(0.0, x.dot(detail::view(dual))));
}

double sobolev_ratio(const CoefficientSet& c, const Field& phi) {
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  double q = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) q += w[i] * std::pow(std::fabs(phi[i]), p);
  const double nrm = v_norm(c, phi);
  if (nrm == 0.0) return 0.0;
  return q / std::pow(nrm, p);
}

namespace {

struct AscentResult {
  Field phi;
  double ratio = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

AscentResult ascend(const CoefficientSet& c, const RieszMap& riesz, Field phi,
                    const SobolevOptions& opt) {
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  auto normalize = [&](Field& f) {
    const double n = v_norm(c, f);
    f *= 1.0 / n;
  };
  auto q_of = [&](const Field& f) {
    double q = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) q += w[i] * std::pow(std::fabs(f[i]), p);
    return q;
  };
  normalize(phi);
  AscentResult res{phi, q_of(phi), 0, 0.0, false};
  Field drive(phi.domain_ptr());
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    for (std::size_t i = 0; i < drive.size(); ++i) {
      drive[i] = w[i] * std::pow(std::fabs(res.phi[i]), p - 2.0) * res.phi[i];
    }
    Field target = riesz.apply(drive);
    normalize(target);
    res.residual = v_norm(c, target - res.phi);
    // Step toward the maximizer of the linearized ratio; Q is convex, so
    // τ = 1 already increases it and backtracking only guards rounding.
    double tau = 1.0;
    bool improved = false;
    for (int trial = 0; trial < 30; ++trial, tau *= 0.5) {
      Field cand = res.phi + tau * (target - res.phi);
      normalize(cand);
      const double q = q_of(cand);
      if (q > res.ratio) {
        const double gain = (q - res.ratio) / q;
        res.phi = std::move(cand);
        res.ratio = q;
        improved = true;
        if (gain < opt.rel_tol) res.converged = true;
        break;
      }
    }
    if (!improved) res.converged = true;
    if (res.converged) break;
  }
  return res;
}

}  // namespace

SobolevEstimate estimate_sobolev(const CoefficientSet& c, const Domain& d,
                                 const std::vector<Field>& probes, const SobolevOptions& opt) {
  require_same_domain(d, c.A);
  const RieszMap riesz(c);
  const DomainPtr& dp = c.domain_ptr();
  const double n_dim = d.dimension();
  const double h = d.spacing();

  std::vector<std::pair<std::string, Field>> seeds;
  if (d.kind() == DomainKind::FlatTorus) seeds.emplace_back("constant", Field(dp, 1.0));
  for (double frac : opt.gaussian_widths) {
    const double sigma = frac * d.extent();
    seeds.emplace_back("gaussian", Field::from_radius(dp, [&](double r) {
                         return std::exp(-(r / sigma) * (r / sigma));
                       }));
  }
  for (double k : opt.bubble_scales) {
    const double lam = k * h;
    seeds.emplace_back("bubble", Field::from_radius(dp, [&](double r) {
                         return std::pow(lam / (lam * lam + r * r), 0.5 * (n_dim - 2.0));
                       }));
  }

  SobolevEstimate best;
  best.S = -1.0;
  for (auto& [name, seed] : seeds) {
    AscentResult r = ascend(c, riesz, std::move(seed), opt);
    if (r.ratio > best.S) {
      best.S = r.ratio;
      best.minimizer = std::move(r.phi);
      best.iterations = r.iterations;
      best.residual = r.residual;
      best.converged = r.converged;
      best.best_seed = name;
    }
  }
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double ratio = sobolev_ratio(c, probes[k]);
    if (ratio > best.S) {
      best.S = ratio;
      best.minimizer = probes[k];
      best.iterations = 0;
      best.residual = 0.0;
      best.converged = true;
      best.best_seed = "probe-" + std::to_string(k);
    }
  }
  return best;
}

}  // namespace lichmp
