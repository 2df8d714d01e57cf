#pragma once

#include <lichmp/admissibility.hpp>
#include <lichmp/coefficients.hpp>
#include <lichmp/domain.hpp>
#include <lichmp/functional.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lichmp {

/// Smooth energy on a finite-dimensional Hilbert space. Gradients are dual
/// vectors; riesz() maps them to primal directions in the inner product.
class Landscape {
 public:
  virtual ~Landscape() = default;
  virtual std::size_t dim() const = 0;
  virtual double energy(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
  virtual void riesz(std::span<const double> g, std::span<double> out) const = 0;
  virtual double inner(std::span<const double> x, std::span<const double> y) const = 0;

  double norm(std::span<const double> x) const;
};

/// I_ε on the full grid.
class FieldLandscape final : public Landscape {
 public:
  FieldLandscape(const CoefficientSet& c, double eps);

  std::size_t dim() const override;
  double energy(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  void riesz(std::span<const double> g, std::span<double> out) const override;
  double inner(std::span<const double> x, std::span<const double> y) const override;

  const CoefficientSet& coefficients() const { return *c_; }
  double epsilon() const { return eps_; }

 private:
  const CoefficientSet* c_;
  double eps_;
  RieszMap riesz_;
};

/// I_ε restricted to span{e_1, ..., e_k}; coordinates are the expansion coefficients.
class SubspaceLandscape final : public Landscape {
 public:
  SubspaceLandscape(const CoefficientSet& c, double eps, std::vector<Field> basis);

  std::size_t dim() const override { return basis_.size(); }
  double energy(std::span<const double> a) const override;
  void gradient(std::span<const double> a, std::span<double> g) const override;
  void riesz(std::span<const double> g, std::span<double> out) const override;
  double inner(std::span<const double> a, std::span<const double> b) const override;

  Field embed(std::span<const double> a) const;

 private:
  const CoefficientSet* c_;
  double eps_;
  std::vector<Field> basis_;
  std::vector<double> gram_;  // row-major k×k
};

/// Discrete path γ(s_j), j = 0..P-1, with fixed endpoints.
struct MpPath {
  DomainPtr domain;  // null for paths in a reduced coordinate space
  std::vector<std::vector<double>> nodes;
  std::vector<double> energies;
  std::size_t peak_index = 0;

  std::size_t size() const { return nodes.size(); }
  double max_energy() const { return energies.empty() ? 0.0 : energies[peak_index]; }
  Field field(std::size_t j) const;
  void evaluate(const Landscape& L);
};

/// Smallest t in {2t0, 4t0, ...} with I(tψ) ≤ I_{ε0}(t1ψ); the choice then
/// serves every ε in (0, ε0]. With `first_step` (the n = 1 truncation of c)
/// the comparison uses bounds that hold for every truncation index.
/// ψ must be normalized. Throws Geometry when 2^60 t0 is exceeded.
double find_t2(const CoefficientSet& c, const Field& psi, double t0, double t1, double eps0,
               const ApproxSequence* first_step = nullptr);

/// Segment path s ↦ (s t2 + (1-s) t1) ψ with P nodes.
MpPath initial_path(const Landscape& L, const Field& psi, double t1, double t2, int P = 33);

/// Polyline through the given anchors, resampled to P nodes equally spaced in arc length.
MpPath polyline_path(const Landscape& L, const std::vector<std::vector<double>>& anchors,
                     int P, DomainPtr domain = nullptr);

struct DeformOptions {
  int max_sweeps = 4000;
  double grad_tol = 1e-8;  // relative to max(1, ‖peak‖)
  double stagnation_tol = 1e-12;
  int stagnation_window = 50;
  double armijo_start = 1.0;
  double armijo_factor = 0.5;
  int armijo_trials = 30;
  double armijo_c1 = 1e-4;
  double step_cap = 0.5;  // step length bound, in units of the mean node spacing
  bool reparametrize = true;
  bool normal_only = true;  // drop the tangential part of each node's step
};

struct SweepRecord {
  int sweep = 0;
  double max_energy = 0.0;
  double peak_grad_norm = 0.0;
};

struct DeformResult {
  MpPath path;
  std::vector<SweepRecord> history;
  int sweeps = 0;
  bool converged = false;  // peak gradient below tolerance
  bool stagnated = false;
  std::string warning;     // set when the budget ran out with a large gradient
};

/// String-method deformation: damped Armijo descent of interior nodes followed
/// by arc-length reparametrization. Nodes below the higher endpoint energy are
/// frozen. Endpoints are never written.
DeformResult deform(MpPath path, const Landscape& L, const DeformOptions& opt = {});

/// Best point on the polygon segments adjacent to the peak node.
std::vector<double> peak_estimate(const MpPath& path, const Landscape& L, int samples = 32);

struct CriticalPoint {
  Field u;
  double m = 0.0;
  double eps = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

struct RefineOptions {
  double rel_tol = 1e-8;
  int max_iter = 200;
  bool project_positive = true;
  std::optional<double> barrier;  // Φ(t0); SaddleLost when m drops to or below it
};

/// Newton-direction minimization of ½‖I'_ε(u)‖²_* from `peak`, projecting onto
/// u ≥ 0 after every step.
CriticalPoint refine_critical(const Field& peak, const CoefficientSet& c, double eps,
                              const RefineOptions& opt = {});

struct MpSolveOptions {
  int path_nodes = 33;
  DeformOptions deform;
  RefineOptions refine;
};

struct MpSolveResult {
  CriticalPoint point;
  DeformResult deformation;
  double initial_path_max = 0.0;
};

/// Deform a path from t1ψ to t2ψ (through `warm` when given) and refine its peak.
MpSolveResult solve_mountain_pass(const CoefficientSet& c, const Field& psi, double t1, double t2,
                                  double eps, const MpSolveOptions& opt = {},
                                  const Field* warm = nullptr);

/// Worker count from LICHMP_THREADS (default 1).
int thread_count();

}  // namespace lichmp
