#pragma once

#include <lichmp/coefficients.hpp>
#include <lichmp/domain.hpp>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace lichmp {

/// Critical Sobolev exponent 2N/(N-2).
double two_star(int dimension);

/// Φ(t) = t²/2 - S b₊ t^{2*}/2* and Ψ(t) = t²/2 + S b₋ t^{2*}/2*, with the
/// maximizer t₀ of Φ and the barrier value Φ(t₀).
struct PhiPsiCurves {
  int dimension = 3;
  double S = 0.0;
  double b_plus = 0.0;
  double b_minus = 0.0;
  double t0 = 0.0;
  double phi_t0 = 0.0;

  double phi(double t) const;
  double psi(double t) const;
};

PhiPsiCurves phi_psi_curves(double S, double b_plus, double b_minus, int dimension);

/// NΘ² + (N-2) β Θ^{2*} + (N-2) K / Θ^{2*}, β = b₋/b₊.
double theta_k_lhs(int dimension, double b_ratio, double K, double Theta);

struct KTheta {
  double K = 0.0;
  double Theta = 0.0;
  double lhs_min = 0.0;
  bool feasible = false;
};

/// Largest K for which min_Θ theta_k_lhs <= 2, and the minimizing Θ.
/// Closed form when b_ratio = 0; golden section plus bisection otherwise.
KTheta optimal_K_theta(int dimension, double b_ratio);

/// Minimizer of theta_k_lhs over Θ in (1e-6, 1 - 1e-6) for fixed K.
KTheta minimize_theta(int dimension, double b_ratio, double K);

/// (1/(2(N-1)))^{N/(N-2)} / (N-2), the older admissible constant.
double hebey_constant(int dimension);

struct ConditionVerdicts {
  bool B_plus_condition = false;
  bool psiK = false;
  bool ThetaK = false;
  bool ThetaK_alt = false;

  bool main_pass() const { return B_plus_condition && psiK && ThetaK; }
};

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct AdmissibilityReport {
  int dimension = 3;
  double S = 0.0;
  double b_plus = 0.0;
  double b_minus = 0.0;
  double two_star = 0.0;
  double t0 = 0.0;
  double phi_t0 = 0.0;
  double K = 0.0;
  double Theta = 0.0;
  double t1 = 0.0;
  double t2 = kUnset;
  double singular_mass = 0.0;  // ∫ A/|ψ|^{2*} with ‖ψ‖ = 1
  ConditionVerdicts verdicts;
  bool nonexistence_flag = false;
  double hebey_K = 0.0;

  // Supporting quantities.
  double b_abs = 0.0;
  double B_psi_integral = 0.0;  // ∫ B|ψ|^{2*}
  double psiK_threshold = 0.0;  // K / (b₊ S)^{N-1}
  double thetaK_lhs = 0.0;
  double K_alt = 0.0;
  double Theta_alt = 0.0;
  double psiK_alt_threshold = 0.0;
  double psi_norm = 0.0;  // ‖ψ‖ before normalization

  PhiPsiCurves curves() const { return phi_psi_curves(S, b_plus, b_minus, dimension); }
};

/// ψ / ‖ψ‖; throws Normalization for ψ ≡ 0.
Field normalize_psi(const CoefficientSet& c, const Field& psi);

/// Evaluates the admissibility conditions for ψ (normalized internally) with
/// Sobolev constant S, selecting (K, Θ) through optimal_K_theta.
AdmissibilityReport check_conditions(const CoefficientSet& c, const Field& psi, double S);

/// Radial or distance-to-centre profile used as a nonexistence probe.
struct Probe {
  std::string name;
  std::function<double(double)> profile;
};

std::vector<Probe> default_probes(DomainKind kind);

struct ProbeEvidence {
  std::string name;
  double mass_base = 0.0;
  double mass_extended = 0.0;  // NaN on finite-measure domains
  double growth = 0.0;
  bool divergent = false;
};

struct NonexistenceEvidence {
  bool flag = false;
  double base_extent = 0.0;
  double extended_extent = 0.0;
  double growth_threshold = 0.0;
  std::string reason;
  std::vector<ProbeEvidence> probes;
};

using CoefficientFactory = std::function<CoefficientSet(const DomainPtr&)>;

/// Witness-based detector for data with ∫A/|v|^{2*} = ∞ for every v: on the
/// radial domain it compares probe masses at extents R and 2R and flags when
/// every probe grows at least like the volume (factor 0.875·2^N); on the
/// torus it only flags when every probe mass is already infinite.
NonexistenceEvidence detect_nonexistence(const CoefficientFactory& make, const DomainSpec& base,
                                         const std::vector<Probe>& probes);

/// ∫_{supp A} A/|v|^{2*} (infinite when v vanishes on supp A).
double singular_mass(const CoefficientSet& c, const Field& v);

}  // namespace lichmp
