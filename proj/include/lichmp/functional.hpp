#pragma once

#include <lichmp/coefficients.hpp>
#include <lichmp/domain.hpp>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lichmp {

/// Below this |u| on supp A the unregularized singular integral is treated as infinite.
inline constexpr double kPositivityFloor = 1e-30;

/// ⟨u, v⟩ = ∫∇u∇v + V u v.
double inner_product(const CoefficientSet& c, const Field& u, const Field& v);

/// ‖u‖ = sqrt(⟨u, u⟩). Throws Coercivity when the radicand is negative.
double v_norm(const CoefficientSet& c, const Field& u);

struct EnergyBreakdown {
  double quadratic = 0.0;  // ½‖u‖²
  double critical = 0.0;   // (1/2*) ∫ B|u|^{2*}
  double singular = 0.0;   // (1/2*) ∫_{supp A} A/(ε+u²)^{2*/2}, or A/|u|^{2*} at ε = 0
  double total = 0.0;
  double epsilon = 0.0;
  bool singular_infinite = false;
};

/// I_ε(u) for ε > 0 and I(u) for ε = 0 (infinite sentinel when u touches 0 on supp A).
EnergyBreakdown energy(const CoefficientSet& c, const Field& u, double eps);
double energy_value(const CoefficientSet& c, std::span<const double> u, double eps);

/// Dual vector g_i = I'_ε(u)(e_i); I'_ε(u)(v) = Σ g_i v_i.
Field gradient(const CoefficientSet& c, const Field& u, double eps);
void gradient_into(const CoefficientSet& c, std::span<const double> u, double eps,
                   std::span<double> out);

double directional_derivative(const Field& dual, const Field& v);

/// Pointwise nonlinearity f_ε(x, s) = B|s|^{2*-2}s + A s/(ε+s²)^{2*/2+1} and its s-derivative.
double nonlinearity(double a, double b, double s, double eps, double two_star);
double nonlinearity_slope(double a, double b, double s, double eps, double two_star);

/// Solves (stiffness + diag(wV)) x = g, mapping dual vectors to their
/// representatives in the ⟨·,·⟩ inner product.
class RieszMap {
 public:
  explicit RieszMap(const CoefficientSet& c);
  ~RieszMap();
  RieszMap(RieszMap&&) noexcept;
  RieszMap& operator=(RieszMap&&) noexcept;

  void apply(std::span<const double> dual, std::span<double> out) const;
  Field apply(const Field& dual) const;
  /// sqrt(gᵀ K⁻¹ g): the norm of g as a functional on (H¹, ‖·‖).
  double dual_norm(std::span<const double> dual) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SobolevOptions {
  int max_iter = 10000;
  double rel_tol = 1e-8;
  std::vector<double> bubble_scales{2.0, 4.0, 8.0, 16.0};  // in grid spacings
  std::vector<double> gaussian_widths{0.25, 0.0625};       // fractions of the extent
};

struct SobolevEstimate {
  double S = 0.0;
  Field minimizer;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::string best_seed;
};

/// |φ|_{2*}^{2*} / ‖φ‖^{2*}.
double sobolev_ratio(const CoefficientSet& c, const Field& phi);

/// Largest ratio found by monotone ascent from several seeds; probes are
/// included in the maximum, so each satisfies |ξ|^{2*} <= S‖ξ‖^{2*}.
SobolevEstimate estimate_sobolev(const CoefficientSet& c, const Domain& d,
                                 const std::vector<Field>& probes = {},
                                 const SobolevOptions& opt = {});

}  // namespace lichmp
