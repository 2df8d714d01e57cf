#pragma once

#include <lichmp/coefficients.hpp>
#include <lichmp/domain.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lichmp {

struct SupersolutionResult {
  double margin = 0.0;            // min over tests of ⟨LHS - RHS, φ⟩ / ∫φ
  std::vector<double> per_test;   // hats first, then the extra tests
  std::size_t worst = 0;
  double scale = 0.0;             // magnitude of the pointwise terms
  double tolerance = 0.0;         // 1e-6 · scale
  bool integrable = true;         // false when u = 0 somewhere on supp A
  bool pass = false;
  std::string diagnosis;
};

/// Nodal hats plus `extra` nonnegative tests. eps = 0 tests the original
/// inequality; eps > 0 tests the regularized equation. Throws Precondition if
/// u < 0 somewhere.
SupersolutionResult supersolution_test(const CoefficientSet& c, const Field& u,
                                       const std::vector<Field>& extra = {}, double eps = 0.0);

/// Smooth nonnegative bumps with random centres and radii.
std::vector<Field> random_bumps(const DomainPtr& d, int count, std::uint64_t seed);

/// sqrt(Σ w ρ²) with ρ = -Δu + Vu - B|u|^{2*-2}u - A/u^{2*+1}. Throws
/// Precondition unless u > 0 on supp A.
double solution_residual(const CoefficientSet& c, const Field& u);

/// Node masks of geodesic balls; radial balls are intervals of radii.
struct Ball {
  std::vector<double> center;
  double radius = 0.0;
  NodeMask mask;
};

Ball make_ball(const Domain& d, std::vector<double> center, double radius);

/// Overlapping balls of radius extent/8 covering the domain.
std::vector<Ball> default_balls(const Domain& d);

struct PositivityReport {
  double min_value = 0.0;
  std::vector<double> per_ball_min;
  std::optional<std::size_t> offending;  // first ball whose minimum is not positive
  bool pass = false;
};

PositivityReport positivity_check(const Field& u, const std::vector<Ball>& balls);

struct FiniteEnergy {
  double critical_part = 0.0;  // ∫|B||u|^{2*}
  double singular_part = 0.0;  // ∫_{supp A} A/|u|^{2*}
  bool both_finite = false;
};

FiniteEnergy finite_energy(const CoefficientSet& c, const Field& u);

struct HarnackResult {
  double q = 0.5;
  double lhs = 0.0;      // (∫_{B(R/8)} u^q)^{1/q}
  double rhs_inf = 0.0;  // inf_{B(R/16)} u
  double ratio = 0.0;    // +∞ when rhs_inf ≤ 0
  double hypothesis_margin = 0.0;
  bool smp_consistent = true;  // rhs_inf ≤ 0 only if u vanishes on all of B(R)
};

/// Both sides of the Harnack inequality around `center`. Throws Hypothesis
/// unless u ≥ 0 and -Δu + d u ≥ 0 on B(R).
HarnackResult harnack_probe(const Field& u, double d_coef, const std::vector<double>& center,
                            double R, double q = 0.5);

/// Supersolutions of -Δu + d u = f with f a random positive sum of Gaussians
/// defined in continuum coordinates, so families on refined grids match.
std::vector<Field> supersolution_family(const DomainPtr& d, double d_coef, int count,
                                        std::uint64_t seed);

struct HarnackBench {
  std::vector<double> ratios;
  double constant_estimate = 0.0;  // max ratio
  bool all_finite = true;
};

HarnackBench harnack_bench(const DomainPtr& d, double d_coef, int count, std::uint64_t seed,
                           const std::vector<double>& center, double R, double q = 0.5);

struct VerificationVerdicts {
  bool supersolution = false;      // ε = 0 inequality
  bool supersolution_eps = false;  // regularized equation at the solve's ε
  bool finite_energy = false;
  bool positivity = false;
  bool harnack = false;
};

struct VerificationReport {
  double supersolution_margin = 0.0;
  double supersolution_margin_eps = 0.0;
  double eps = 0.0;
  double residual_norm = 0.0;
  FiniteEnergy finite_energy;
  PositivityReport positivity;
  HarnackResult harnack;
  double harnack_constant_estimate = 0.0;
  VerificationVerdicts verdicts;
  std::string diagnosis;
};

struct VerifyOptions {
  double eps = 0.0;  // > 0 adds the regularized test
  int random_tests = 50;
  std::uint64_t seed = 0;
  double harnack_d = 1.0;
  double q = 0.5;
};

VerificationReport verify_field(const CoefficientSet& c, const Field& u,
                                const VerifyOptions& opt = {});

}  // namespace lichmp
