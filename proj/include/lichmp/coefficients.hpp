#pragma once

#include <lichmp/domain.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lichmp {

using NodeMask = std::vector<std::uint8_t>;

/// Coefficient triple (A, B, V) of -Δu + Vu = B|u|^{2*-2}u + A/(|u|^{2*}u).
/// Construction does not validate the standing assumptions; use
/// check_assumptions() or the family builders for that.
struct CoefficientSet {
  Field A;
  Field B;
  Field V;
  NodeMask supp_A;
  std::string family = "custom";

  const Domain& domain() const { return A.domain(); }
  const DomainPtr& domain_ptr() const { return A.domain_ptr(); }
};

CoefficientSet make_coefficients(Field A, Field B, Field V, std::string family = "custom");

/// Mask {|f| > rel_floor * max|f|}.
NodeMask support_mask(const Field& f, double rel_floor = 1e-12);

/// Largest positive / negative part of B over a node mask.
struct SupportBounds {
  double b_plus = 0.0;
  double b_minus = 0.0;
  double b_abs = 0.0;
};
SupportBounds bounds_on(const Field& B, const NodeMask& mask);

/// A coefficient set together with a candidate profile ψ and non-fatal notes.
struct Scenario {
  CoefficientSet coeffs;
  Field psi;
  double singular_integral = 0.0;  // ∫_{supp A} A/|ψ|^{2*}, ψ unnormalized
  double tail_fraction = 0.0;      // share of that integral from the outer 10% of radii
  bool integrable = true;
  std::vector<std::string> notes;
};

enum class BProfile { Constant, Bump };

/// A = θ_A e^{-a r} (+ optional integrable spike), B constant or a Gaussian
/// shell, V constant, ψ = (1 + (r - c_ψ)²)^{-p}.
struct RnExponentialParams {
  double theta_A = 0.01;
  double decay = 2.0;
  BProfile b_profile = BProfile::Constant;
  double b_amplitude = 1.0;
  double b_center = 0.0;
  double b_width = 1.0;
  double v_value = 1.0;
  double psi_power = 2.0;
  double psi_center = 0.0;
  // spike_height * |r - spike_center|^{-1/2} on |r - spike_center| < spike_width
  double spike_height = 0.0;
  double spike_center = 1.0;
  double spike_width = 0.5;
};

Scenario build_example_rn(const DomainPtr& d, const RnExponentialParams& p);

/// A = a_value on the ball r <= r1, ψ a plateau profile equal to 1 up to
/// psi_plateau and tapering to 0 at r2. B takes b_inner, b_shell, b_outer on
/// B1, B2 \ B1 and the complement. Radii are measured from the origin
/// (radial) or the torus centre.
struct LocalBumpParams {
  double a_value = 1.0;
  double r1 = 1.0;
  double r2 = 2.0;
  double psi_plateau = 1.0;
  double psi_hole = 0.0;  // ψ = 0 for r < psi_hole
  double b_inner = 1.0;
  double b_shell = 1.0;
  double b_outer = 0.0;
  double v_value = 1.0;
};

Scenario build_example_local(const DomainPtr& d, const LocalBumpParams& p);

double plateau_profile(double r, double plateau, double cutoff);

/// Monotone truncations (A_n, B_{n,+}, B_{n,-}) of a coefficient set.
struct ApproxSequence {
  int n = 1;
  Field A_n;
  Field B_n_plus;
  Field B_n_minus;

  CoefficientSet as_coefficients(const CoefficientSet& target) const;
};

struct ApproxOptions {
  double unit_radius = 1.0;
  bool strict_minus = false;
};

/// A_n = min(A, n) 1{r <= n·unit}, B_{n,+} = min(B_+, n),
/// B_{n,-} = min(B_-, n) scaled by (1 - 1/n) in the strict variant.
ApproxSequence approx_step(const CoefficientSet& c, int n, const ApproxOptions& opt = {});

struct AssumptionReport {
  bool A_pass = false;
  bool B_pass = false;
  bool V_pass = false;
  std::string V_method;  // "essinf" or "rayleigh"
  double essinf_V = 0.0;
  std::optional<double> rayleigh_estimate;
  double A_dual_norm = 0.0;  // discrete |A|_{L^{2N/(N+2)}}, recorded only
};

AssumptionReport check_assumptions(const CoefficientSet& c);

/// Smallest eigenvalue of -Δ + V in the weighted inner product, by shifted
/// inverse iteration.
double smallest_rayleigh_quotient(const Domain& d, const Field& V, int max_iter = 500,
                                  double rel_tol = 1e-12);

}  // namespace lichmp
