#include <lichmp/admissibility.hpp>
#include <lichmp/coefficients.hpp>
#include <lichmp/error.hpp>

#include "sparse_ops.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lichmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_assumption_A(const Field& A) {
  bool any = false;
  for (double a : A.values()) {
    if (a < 0.0) throw Error(ErrorKind::Spec, "assumption (A) violated: A < 0 somewhere");
    any = any || a > 0.0;
  }
  if (!any) throw Error(ErrorKind::Spec, "assumption (A) violated: A vanishes identically");
}

void require_assumption_B(const Field& B) {
  for (double b : B.values()) {
    if (b > 0.0) return;
  }
  throw Error(ErrorKind::Spec, "assumption (B) violated: B_+ vanishes identically");
}

// ∫_{supp A} A/|ψ|^{2*} and the share of it carried by the outer tenth of radii.
std::pair<double, double> singular_integral(const CoefficientSet& c, const Field& psi) {
  const Domain& d = c.domain();
  const double p = two_star(d.dimension());
  const auto w = d.weights();
  const auto r = d.radii();
  const double r_outer = 0.9 * *std::max_element(r.begin(), r.end());
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!c.supp_A[i]) continue;
    const double a = std::fabs(psi[i]);
    const double term = a > 0.0 ? w[i] * c.A[i] / std::pow(a, p) : kInf;
    total += term;
    if (r[i] >= r_outer) tail += term;
  }
  const double frac = std::isfinite(total) && total > 0.0 ? tail / total : 1.0;
  return {total, frac};
}

void annotate(Scenario& s) {
  const auto [mass, tail] = singular_integral(s.coeffs, s.psi);
  s.singular_integral = mass;
  s.tail_fraction = tail;
  s.integrable = std::isfinite(mass) && tail < 1e-3;
  if (!std::isfinite(mass)) {
    s.notes.push_back("A/|psi|^{2*} is not integrable: psi vanishes on supp A");
  } else if (tail >= 1e-3) {
    s.notes.push_back("A/|psi|^{2*} carries a fraction " + std::to_string(tail) +
                      " of its mass in the outer tenth of the grid");
  }
}

}  // namespace

CoefficientSet make_coefficients(Field A, Field B, Field V, std::string family) {
  require_same_domain(A.domain(), B);
  require_same_domain(A.domain(), V);
  CoefficientSet c{std::move(A), std::move(B), std::move(V), {}, std::move(family)};
  c.supp_A.resize(c.A.size());
  for (std::size_t i = 0; i < c.A.size(); ++i) c.supp_A[i] = c.A[i] > 0.0 ? 1 : 0;
  return c;
}

NodeMask support_mask(const Field& f, double rel_floor) {
  double peak = 0.0;
  for (double v : f.values()) peak = std::max(peak, std::fabs(v));
  NodeMask m(f.size(), 0);
  if (peak == 0.0) return m;
  const double floor = rel_floor * peak;
  for (std::size_t i = 0; i < f.size(); ++i) m[i] = std::fabs(f[i]) > floor ? 1 : 0;
  return m;
}

SupportBounds bounds_on(const Field& B, const NodeMask& mask) {
  SupportBounds out;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (!mask[i]) continue;
    out.b_plus = std::max(out.b_plus, std::max(B[i], 0.0));
    out.b_minus = std::max(out.b_minus, std::max(-B[i], 0.0));
  }
  out.b_abs = std::max(out.b_plus, out.b_minus);
  return out;
}

Scenario build_example_rn(const DomainPtr& d, const RnExponentialParams& p) {
  if (!(p.theta_A > 0.0)) throw Error(ErrorKind::Spec, "assumption (A) violated: theta_A <= 0");
  if (p.decay < 0.0) throw Error(ErrorKind::Spec, "decay rate must be nonnegative");
  if (!(p.psi_power > 0.0)) throw Error(ErrorKind::Spec, "psi power must be positive");
  Field A = Field::from_radius(d, [&](double r) {
    double a = p.theta_A * std::exp(-p.decay * r);
    const double gap = std::fabs(r - p.spike_center);
    if (p.spike_height > 0.0 && gap < p.spike_width) a += p.spike_height / std::sqrt(gap);
    return a;
  });
  Field B = Field::from_radius(d, [&](double r) {
    if (p.b_profile == BProfile::Constant) return p.b_amplitude;
    const double z = (r - p.b_center) / p.b_width;
    return p.b_amplitude * std::exp(-z * z);
  });
  Field V(d, p.v_value);
  require_assumption_A(A);
  require_assumption_B(B);
  Scenario s{make_coefficients(std::move(A), std::move(B), std::move(V), "rn-exponential"),
             Field::from_radius(d,
                               [&](double r) {
                                 const double z = r - p.psi_center;
                                 return std::pow(1.0 + z * z, -p.psi_power);
                               }),
             0.0, 0.0, true, {}};
  annotate(s);
  return s;
}

double plateau_profile(double r, double plateau, double cutoff) {
  if (r <= plateau) return 1.0;
  if (r >= cutoff) return 0.0;
  const double s = (r - plateau) / (cutoff - plateau);
  const double c = std::cos(0.5 * std::numbers::pi * s);
  return c * c;
}

Scenario build_example_local(const DomainPtr& d, const LocalBumpParams& p) {
  if (!(p.a_value > 0.0)) throw Error(ErrorKind::Spec, "assumption (A) violated: a_value <= 0");
  if (!(p.r1 > 0.0 && p.r2 > p.r1)) throw Error(ErrorKind::Spec, "need 0 < r1 < r2");
  if (!(p.psi_plateau > 0.0 && p.psi_plateau < p.r2)) {
    throw Error(ErrorKind::Spec, "psi plateau must lie in (0, r2)");
  }
  Field A = Field::from_radius(d, [&](double r) { return r <= p.r1 ? p.a_value : 0.0; });
  Field B = Field::from_radius(d, [&](double r) {
    if (r <= p.r1) return p.b_inner;
    if (r <= p.r2) return p.b_shell;
    return p.b_outer;
  });
  Field V(d, p.v_value);
  Field psi = Field::from_radius(d, [&](double r) {
    if (r < p.psi_hole) return 0.0;
    return plateau_profile(r, p.psi_plateau, p.r2);
  });
  require_assumption_A(A);
  require_assumption_B(B);
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i] > 0.0 && !(psi[i] > 0.0)) {
      throw Error(ErrorKind::Support, "supp A is not contained in {psi > 0}");
    }
  }
  Scenario s{make_coefficients(std::move(A), std::move(B), std::move(V), "local-bump"),
             std::move(psi), 0.0, 0.0, true, {}};
  annotate(s);
  return s;
}

CoefficientSet ApproxSequence::as_coefficients(const CoefficientSet& target) const {
  Field B = B_n_plus - B_n_minus;
  return make_coefficients(A_n, std::move(B), target.V,
                           target.family + "[n=" + std::to_string(n) + "]");
}

ApproxSequence approx_step(const CoefficientSet& c, int n, const ApproxOptions& opt) {
  if (n < 1) throw Error(ErrorKind::Parameter, "approximation index must be >= 1");
  const double cap = static_cast<double>(n);
  const double radius = cap * opt.unit_radius;
  const double minus_scale = opt.strict_minus ? 1.0 - 1.0 / cap : 1.0;
  const auto r = c.domain().radii();
  ApproxSequence s{n, Field(c.domain_ptr()), Field(c.domain_ptr()), Field(c.domain_ptr())};
  for (std::size_t i = 0; i < c.A.size(); ++i) {
    s.A_n[i] = r[i] <= radius ? std::min(c.A[i], cap) : 0.0;
    s.B_n_plus[i] = std::min(std::max(c.B[i], 0.0), cap);
    s.B_n_minus[i] = minus_scale * std::min(std::max(-c.B[i], 0.0), cap);
  }
  return s;
}

double smallest_rayleigh_quotient(const Domain& d, const Field& V, int max_iter,
                                  double rel_tol) {
  require_same_domain(d, V);
  const auto w = d.weights();
  double shift = std::min(V.min(), 0.0) - 1.0;
  std::vector<double> diag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) diag[i] = w[i] * (V[i] - shift);
  const detail::SparseMatrix shifted = detail::assemble_operator(d, diag);
  for (std::size_t i = 0; i < d.size(); ++i) diag[i] = w[i] * V[i];
  const detail::SparseMatrix op = detail::assemble_operator(d, diag);

  Eigen::SimplicialLDLT<detail::SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Coercivity, "shifted operator factorization failed");
  }
  const detail::Vector wv = detail::view(w);
  detail::Vector y = detail::Vector::Ones(static_cast<Eigen::Index>(d.size()));
  // Break symmetry with the constant mode so torus problems are not trapped by it.
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += 1e-3 * std::sin(0.7 * static_cast<double>(i));
  double lambda = kInf;
  for (int it = 0; it < max_iter; ++it) {
    const double wn = std::sqrt(y.dot(wv.cwiseProduct(y)));
    y /= wn;
    const double next = y.dot(op * y);
    const bool done = std::fabs(next - lambda) <= rel_tol * std::max(1.0, std::fabs(next));
    lambda = next;
    if (done) break;
    const detail::Vector rhs = wv.cwiseProduct(y);
    y = solver.solve(rhs);
  }
  return lambda;
}

AssumptionReport check_assumptions(const CoefficientSet& c) {
  AssumptionReport r;
  const Domain& d = c.domain();
  r.A_pass = std::all_of(c.A.values().begin(), c.A.values().end(),
                         [](double a) { return a >= 0.0; }) &&
             std::any_of(c.A.values().begin(), c.A.values().end(),
                         [](double a) { return a > 0.0; });
  r.B_pass = std::any_of(c.B.values().begin(), c.B.values().end(),
                         [](double b) { return b > 0.0; });
  r.essinf_V = c.V.min();
  if (r.essinf_V > 0.0) {
    r.V_method = "essinf";
    r.V_pass = true;
  } else {
    r.V_method = "rayleigh";
    r.rayleigh_estimate = smallest_rayleigh_quotient(d, c.V);
    r.V_pass = *r.rayleigh_estimate > 0.0;
  }
  const int n = d.dimension();
  const double q = 2.0 * n / (n + 2.0);
  const auto w = d.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += w[i] * std::pow(std::fabs(c.A[i]), q);
  r.A_dual_norm = std::pow(s, 1.0 / q);
  return r;
}

}  // namespace lichmp
