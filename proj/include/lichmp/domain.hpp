#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lichmp {

enum class DomainKind { RadialEuclidean, FlatTorus };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Discretization request. `nodes` is the radial cell count M, or the
/// per-axis node count on the torus. `extent` is R_max or the torus period L.
struct DomainSpec {
  DomainKind kind = DomainKind::RadialEuclidean;
  int dimension = 3;
  std::size_t nodes = 1000;
  double extent = 20.0;
};

/// Two-point flux between neighbouring nodes: contributes
/// conductance * (u_i - u_j) * (v_i - v_j) to the Dirichlet form.
struct Coupling {
  std::size_t i;
  std::size_t j;
  double conductance;
};

/// A discrete geometry with volume weights and a conservative
/// two-point-flux Laplacian.
///
/// Radial: cell-centred grid r_i = (i + 1/2) h on (0, R_max), shell volumes as
/// weights, zero flux through r = 0 and u = 0 imposed on the face r = R_max.
/// Torus: uniform periodic grid over [0, L)^N with weights h^N.
class Domain {
 public:
  DomainKind kind() const { return spec_.kind; }
  int dimension() const { return spec_.dimension; }
  const DomainSpec& spec() const { return spec_; }
  std::size_t size() const { return weights_.size(); }
  double spacing() const { return spacing_; }
  double extent() const { return spec_.extent; }

  std::span<const double> weights() const { return weights_; }
  /// Radial: r_i. Torus: periodic distance from the cell centre (L/2, ..., L/2).
  std::span<const double> radii() const { return radii_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  /// Diagonal Dirichlet contribution (nonzero only at the outer radial cell).
  std::span<const double> boundary_conductance() const { return boundary_; }

  /// Node coordinates: {r} on the radial grid, N Cartesian coordinates on the torus.
  std::vector<double> position(std::size_t i) const;
  /// Geodesic distance between node i and a point given in the same coordinates.
  double distance(std::size_t i, std::span<const double> point) const;

  /// Volume of the truncated domain: |S^{N-1}| R^N / N or L^N.
  double analytic_volume() const;
  double total_weight() const;

  /// FNV-1a digest of the discretization parameters.
  std::uint64_t hash() const { return hash_; }

 private:
  friend std::shared_ptr<const Domain> build_domain(const DomainSpec& spec);
  Domain() = default;

  DomainSpec spec_;
  double spacing_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> radii_;
  std::vector<Coupling> couplings_;
  std::vector<double> boundary_;
  std::uint64_t hash_ = 0;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr build_domain(const DomainSpec& spec);

/// Area of the unit sphere S^{N-1}.
double unit_sphere_area(int dimension);

/// Grid function on a Domain.
class Field {
 public:
  Field() = default;
  explicit Field(DomainPtr domain, double fill = 0.0);
  Field(DomainPtr domain, std::vector<double> values);

  static Field from_radius(DomainPtr domain, const std::function<double(double)>& f);
  static Field from_position(DomainPtr domain,
                             const std::function<double(std::span<const double>)>& f);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;
  double min() const;
  double max() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Throws DomainMismatch unless `f` lives on `d`.
void require_same_domain(const Domain& d, const Field& f);

double integrate(const Domain& d, const Field& f);

/// Applies the stiffness matrix (the assembled Dirichlet form) to raw values.
void apply_stiffness(const Domain& d, std::span<const double> u, std::span<double> out);

/// Discrete Laplacian in flux form: (Δu)_i = -(K u)_i / w_i.
Field apply_laplacian(const Domain& d, const Field& u);

/// Discrete ∫∇u·∇v. Symmetric and equal to -integrate(v Δu).
double dirichlet_energy(const Domain& d, const Field& u, const Field& v);

}  // namespace lichmp
