#include <lichmp/admissibility.hpp>
#include <lichmp/error.hpp>
#include <lichmp/functional.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lichmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Rounding allowance on the "≤ 2" test; the closed-form optimum sits exactly on it.
constexpr double kLhsSlack = 1e-12;

}  // namespace

double two_star(int dimension) {
  if (dimension < 3) {
    throw Error(ErrorKind::Dimension, "2* needs N >= 3, got " + std::to_string(dimension));
  }
  return 2.0 * dimension / (dimension - 2.0);
}

double PhiPsiCurves::phi(double t) const {
  const double p = two_star(dimension);
  return 0.5 * t * t - S * b_plus * std::pow(t, p) / p;
}

double PhiPsiCurves::psi(double t) const {
  const double p = two_star(dimension);
  return 0.5 * t * t + S * b_minus * std::pow(t, p) / p;
}

PhiPsiCurves phi_psi_curves(double S, double b_plus, double b_minus, int dimension) {
  if (!(b_plus > 0.0)) throw Error(ErrorKind::ConditionB, "b_plus must be positive");
  if (!(S > 0.0)) throw Error(ErrorKind::Parameter, "Sobolev constant must be positive");
  if (b_minus < 0.0) throw Error(ErrorKind::Parameter, "b_minus must be nonnegative");
  PhiPsiCurves c;
  c.dimension = dimension;
  c.S = S;
  c.b_plus = b_plus;
  c.b_minus = b_minus;
  const double n = dimension;
  const double sb = S * b_plus;
  c.t0 = std::pow(sb, -(n - 2.0) / 4.0);
  c.phi_t0 = 1.0 / (n * std::pow(sb, 0.5 * n - 1.0));
  return c;
}

double theta_k_lhs(int dimension, double b_ratio, double K, double Theta) {
  const double n = dimension;
  const double p = two_star(dimension);
  const double tp = std::pow(Theta, p);
  return n * Theta * Theta + (n - 2.0) * b_ratio * tp + (n - 2.0) * K / tp;
}

double hebey_constant(int dimension) {
  const double n = dimension;
  return std::pow(1.0 / (2.0 * (n - 1.0)), n / (n - 2.0)) / (n - 2.0);
}

KTheta minimize_theta(int dimension, double b_ratio, double K) {
  // theta_k_lhs is a sum of convex functions of Θ, so golden section applies.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 1e-6;
  double hi = 1.0 - 1e-6;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = theta_k_lhs(dimension, b_ratio, K, x1);
  double f2 = theta_k_lhs(dimension, b_ratio, K, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = theta_k_lhs(dimension, b_ratio, K, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = theta_k_lhs(dimension, b_ratio, K, x2);
    }
  }
  KTheta out;
  out.K = K;
  out.Theta = f1 <= f2 ? x1 : x2;
  out.lhs_min = std::min(f1, f2);
  out.feasible = out.lhs_min <= 2.0 + kLhsSlack;
  return out;
}

KTheta optimal_K_theta(int dimension, double b_ratio) {
  if (b_ratio < 0.0) throw Error(ErrorKind::Parameter, "b_ratio must be nonnegative");
  const double n = dimension;
  two_star(dimension);
  const double k_closed = std::pow(1.0 / (n - 1.0), 2.0 * (n - 1.0) / (n - 2.0));
  if (b_ratio == 0.0) {
    KTheta out;
    out.K = k_closed;
    out.Theta = std::pow(k_closed, (n - 2.0) / (4.0 * (n - 1.0)));
    out.lhs_min = 2.0 * (n - 1.0) * std::pow(k_closed, (n - 2.0) / (2.0 * (n - 1.0)));
    out.feasible = true;
    return out;
  }
  // A positive b_ratio only raises the left-hand side, so K_opt(0) brackets from above.
  double lo = 0.0;
  double hi = k_closed;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (minimize_theta(dimension, b_ratio, mid).lhs_min <= 2.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(lo > 0.0)) return KTheta{0.0, 0.0, kInf, false};
  KTheta out = minimize_theta(dimension, b_ratio, lo);
  out.feasible = out.lhs_min <= 2.0 + kLhsSlack;
  return out;
}

Field normalize_psi(const CoefficientSet& c, const Field& psi) {
  const double n = v_norm(c, psi);
  if (!(n > 0.0)) throw Error(ErrorKind::Normalization, "psi vanishes identically");
  Field out = psi;
  out *= 1.0 / n;
  return out;
}

double singular_mass(const CoefficientSet& c, const Field& v) {
  require_same_domain(c.domain(), v);
  const double p = two_star(c.domain().dimension());
  const auto w = c.domain().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!c.supp_A[i]) continue;
    const double a = std::fabs(v[i]);
    if (a < kPositivityFloor) return kInf;
    s += w[i] * c.A[i] / std::pow(a, p);
  }
  return s;
}

AdmissibilityReport check_conditions(const CoefficientSet& c, const Field& psi, double S) {
  const Domain& d = c.domain();
  AdmissibilityReport r;
  r.dimension = d.dimension();
  r.two_star = two_star(r.dimension);
  r.S = S;
  r.hebey_K = hebey_constant(r.dimension);
  r.psi_norm = v_norm(c, psi);
  const Field unit = normalize_psi(c, psi);
  const NodeMask mask = support_mask(unit);
  const SupportBounds b = bounds_on(c.B, mask);
  r.b_plus = b.b_plus;
  r.b_minus = b.b_minus;
  r.b_abs = b.b_abs;

  const auto w = d.weights();
  bool bounded = true;
  double integral = 0.0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    if (!mask[i]) continue;
    bounded = bounded && std::isfinite(c.B[i]);
    integral += w[i] * c.B[i] * std::pow(std::fabs(unit[i]), r.two_star);
  }
  r.B_psi_integral = integral;
  r.verdicts.B_plus_condition = bounded && integral > 0.0;
  r.singular_mass = singular_mass(c, unit);

  const double n = r.dimension;
  if (!(r.b_plus > 0.0)) {
    r.t0 = r.phi_t0 = r.t1 = kNaN;
    return r;
  }
  const PhiPsiCurves curves = phi_psi_curves(S, r.b_plus, r.b_minus, r.dimension);
  r.t0 = curves.t0;
  r.phi_t0 = curves.phi_t0;

  const double ratio = r.b_minus / r.b_plus;
  const KTheta kt = optimal_K_theta(r.dimension, ratio);
  r.K = kt.K;
  r.Theta = kt.Theta;
  r.t1 = r.Theta * r.t0;
  r.psiK_threshold = r.K / std::pow(r.b_plus * S, n - 1.0);
  r.verdicts.psiK = kt.feasible && r.singular_mass <= r.psiK_threshold;
  r.thetaK_lhs = kt.feasible ? theta_k_lhs(r.dimension, ratio, r.K, r.Theta) : kInf;
  r.verdicts.ThetaK = kt.feasible && r.thetaK_lhs <= 2.0 + kLhsSlack;

  const KTheta alt = optimal_K_theta(r.dimension, 1.0);
  r.K_alt = alt.K;
  r.Theta_alt = alt.Theta;
  r.psiK_alt_threshold = alt.K / std::pow(r.b_abs * S, n - 1.0);
  r.verdicts.ThetaK_alt = alt.feasible && r.singular_mass <= r.psiK_alt_threshold &&
                          theta_k_lhs(r.dimension, 1.0, alt.K, alt.Theta) <= 2.0 + kLhsSlack;
  return r;
}

std::vector<Probe> default_probes(DomainKind kind) {
  if (kind == DomainKind::FlatTorus) {
    return {{"constant", [](double) { return 1.0; }},
            {"tilted", [](double r) { return 2.0 + std::cos(r); }}};
  }
  std::vector<Probe> probes;
  for (double p : {0.5, 1.0, 2.0}) {
    probes.push_back({"poly-" + std::to_string(p),
                      [p](double r) { return std::pow(1.0 + r * r, -p); }});
  }
  return probes;
}

NonexistenceEvidence detect_nonexistence(const CoefficientFactory& make, const DomainSpec& base,
                                         const std::vector<Probe>& probes) {
  NonexistenceEvidence ev;
  ev.base_extent = base.extent;
  auto masses = [&](const DomainPtr& d) {
    const CoefficientSet c = make(d);
    std::vector<double> out;
    for (const auto& pr : probes) out.push_back(singular_mass(c, Field::from_radius(d, pr.profile)));
    return out;
  };
  const DomainPtr d0 = build_domain(base);
  const auto m0 = masses(d0);

  if (base.kind == DomainKind::FlatTorus) {
    ev.extended_extent = kNaN;
    ev.growth_threshold = kNaN;
    ev.flag = !probes.empty();
    for (std::size_t k = 0; k < probes.size(); ++k) {
      ProbeEvidence pe{probes[k].name, m0[k], kNaN, kNaN, !std::isfinite(m0[k])};
      ev.flag = ev.flag && pe.divergent;
      ev.probes.push_back(pe);
    }
    ev.reason = ev.flag ? "every probe has infinite singular mass"
                        : "finite measure: a probe with finite singular mass exists";
    return ev;
  }

  DomainSpec ext = base;
  ext.extent = 2.0 * base.extent;
  ext.nodes = 2 * base.nodes;
  ev.extended_extent = ext.extent;
  ev.growth_threshold = 0.875 * std::pow(2.0, base.dimension);
  const auto m1 = masses(build_domain(ext));
  ev.flag = !probes.empty();
  for (std::size_t k = 0; k < probes.size(); ++k) {
    ProbeEvidence pe{probes[k].name, m0[k], m1[k], kNaN, false};
    if (!std::isfinite(m0[k]) || !std::isfinite(m1[k])) {
      pe.growth = kInf;
      pe.divergent = true;
    } else {
      pe.growth = m1[k] / m0[k];
      pe.divergent = pe.growth >= ev.growth_threshold;
    }
    ev.flag = ev.flag && pe.divergent;
    ev.probes.push_back(pe);
  }
  ev.reason = ev.flag ? "every probe mass grows at least like the volume under extension"
                      : "some probe keeps a bounded singular mass under extension";
  return ev;
}

}  // namespace lichmp
