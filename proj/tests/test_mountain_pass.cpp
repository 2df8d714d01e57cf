#include <lichmp/admissibility.hpp>
#include <lichmp/error.hpp>
#include <lichmp/mountain_pass.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace lichmp;

namespace {

/// (x² - 1)² + 2y² with the Euclidean inner product: minima at (±1, 0) and a
/// saddle of height 1 at the origin.
class DoubleWell final : public Landscape {
 public:
  std::size_t dim() const override { return 2; }
  double energy(std::span<const double> x) const override {
    const double a = x[0] * x[0] - 1.0;
    return a * a + 2.0 * x[1] * x[1];
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0);
    g[1] = 4.0 * x[1];
  }
  void riesz(std::span<const double> g, std::span<double> out) const override {
    out[0] = g[0];
    out[1] = g[1];
  }
  double inner(std::span<const double> x, std::span<const double> y) const override {
    return x[0] * y[0] + x[1] * y[1];
  }
};

Scenario radial_scenario() {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 400, 10.0});
  RnExponentialParams p;
  p.theta_A = 1e-12;
  p.decay = 4.0;
  p.b_profile = BProfile::Bump;
  p.b_center = 2.0;
  p.b_width = 0.5;
  p.psi_center = 2.0;
  return build_example_rn(d, p);
}

/// Torus field u_m with A chosen so that u_m solves the ε-regularized equation.
struct Manufactured {
  CoefficientSet c;
  Field u;
};

Manufactured manufactured(double eps) {
  const auto d = build_domain({DomainKind::FlatTorus, 3, 8, 2.0 * M_PI});
  Field u = Field::from_position(d, [](std::span<const double> x) { return 0.5 * (1.0 + 0.3 * std::cos(x[0])); });
  std::vector<double> ku(d->size());
  apply_stiffness(*d, u.values(), ku);
  const auto w = d->weights();
  Field A(d);
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double s = u[i];
    const double lhs = ku[i] / w[i] + s - 0.1 * std::pow(s, 5);
    A[i] = lhs * std::pow(eps + s * s, 4.0) / s;
  }
  return {make_coefficients(A, Field(d, 0.1), Field(d, 1.0), "manufactured"), u};
}

}  // namespace

TEST_CASE("deform finds the saddle of a double well") {
  const DoubleWell L;
  MpPath path = polyline_path(L, {{-1.0, 0.0}, {0.0, 1.5}, {1.0, 0.0}}, 33);
  const double initial = path.max_energy();
  CHECK(initial > 1.5);
  const DeformResult r = deform(path, L);
  CHECK(r.path.max_energy() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.path.max_energy() < initial);
  CHECK(r.path.nodes.front() == std::vector<double>{-1.0, 0.0});
  CHECK(r.path.nodes.back() == std::vector<double>{1.0, 0.0});
  CHECK_FALSE(r.history.empty());
  CHECK(r.history.back().max_energy == doctest::Approx(r.path.max_energy()));
  const auto pk = peak_estimate(r.path, L);
  CHECK(std::fabs(pk[0]) < 0.05);
  CHECK(std::fabs(pk[1]) < 0.05);
  CHECK(L.energy(pk) >= r.path.max_energy() - 1e-12);
}

TEST_CASE("path constructors") {
  const DoubleWell L;
  const MpPath p = polyline_path(L, {{-1.0, 0.0}, {1.0, 0.0}}, 5);
  REQUIRE(p.size() == 5);
  CHECK(p.nodes[2][0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p.max_energy() == doctest::Approx(1.0));
  CHECK(p.peak_index == 2);
  CHECK_THROWS_AS(polyline_path(L, {{0.0, 0.0}}, 5), Error);
  CHECK_THROWS_AS(p.field(0), Error);

  const Scenario s = radial_scenario();
  const Field psi = normalize_psi(s.coeffs, s.psi);
  const FieldLandscape F(s.coeffs, 0.1);
  CHECK_THROWS_AS(initial_path(F, psi, 1.0, 2.0, 15), Error);
  const MpPath seg = initial_path(F, psi, 1.0, 3.0, 16);
  CHECK(seg.size() == 16);
  const Field mid = seg.field(0);
  CHECK(mid[10] == doctest::Approx(psi[10]));
  CHECK_THROWS_AS(FieldLandscape(s.coeffs, 0.0), Error);
}

TEST_CASE("find_t2 picks the first doubling below the start level") {
  const Scenario s = radial_scenario();
  const auto& c = s.coeffs;
  const Field psi = normalize_psi(c, s.psi);
  const double S = estimate_sobolev(c, c.domain(), {s.psi}).S;
  const auto rep = check_conditions(c, s.psi, S);
  REQUIRE(rep.verdicts.main_pass());
  const double eps0 = 1.0;
  const double t2 = find_t2(c, psi, rep.t0, rep.t1, eps0);
  const double start = energy(c, rep.t1 * psi, eps0).total;
  CHECK(t2 >= 2.0 * rep.t0);
  const double k = std::log2(t2 / rep.t0);
  CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
  CHECK(energy(c, t2 * psi, 0.0).total <= start);
  if (t2 > 2.0 * rep.t0) CHECK(energy(c, 0.5 * t2 * psi, 0.0).total > start);
  // The same t2 serves every smaller ε.
  for (double eps : {0.1, 1e-3, 1e-6}) CHECK(energy(c, t2 * psi, eps).total <= start);
}

TEST_CASE("refine recovers a manufactured critical point") {
  const double eps = 0.01;
  const auto [c, um] = manufactured(eps);
  Field g = gradient(c, um, eps);
  CHECK(RieszMap(c).dual_norm(g.values()) < 1e-12);
  Field start = um;
  for (std::size_t i = 0; i < start.size(); ++i) start[i] *= 1.0 + 0.05 * std::sin(3.0 * static_cast<double>(i));
  const CriticalPoint cp = refine_critical(start, c, eps);
  CHECK(cp.grad_norm < 1e-8 * std::max(1.0, v_norm(c, cp.u)));
  CHECK(v_norm(c, cp.u - um) < 1e-7);
  CHECK(cp.m == doctest::Approx(energy(c, um, eps).total).epsilon(1e-10));
  CHECK(cp.u.min() > 0.0);
}

TEST_CASE("refine reports a lost saddle") {
  const double eps = 0.01;
  const auto [c, um] = manufactured(eps);
  const double m = energy(c, um, eps).total;
  RefineOptions opt;
  opt.barrier = m + 1.0;
  try {
    refine_critical(um, c, eps, opt);
    FAIL("expected SaddleLost");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SaddleLost);
  }
  opt.barrier = m - 1.0;
  CHECK_NOTHROW(refine_critical(um, c, eps, opt));
  CHECK_THROWS_AS(refine_critical(um, c, 0.0), Error);
}

TEST_CASE("subspace landscape agrees with the full energy") {
  const Scenario s = radial_scenario();
  const auto& c = s.coeffs;
  const Field psi = normalize_psi(c, s.psi);
  const Field phi = normalize_psi(c, Field::from_radius(c.domain_ptr(), [](double r) { return std::exp(-r); }));
  const SubspaceLandscape L(c, 0.1, {psi, phi});
  const std::vector<double> a{1.3, -0.4};
  const Field u = L.embed(a);
  CHECK(L.energy(a) == doctest::Approx(energy(c, u, 0.1).total).epsilon(1e-12));
  std::vector<double> g(2);
  L.gradient(a, g);
  const Field full = gradient(c, u, 0.1);
  CHECK(g[0] == doctest::Approx(directional_derivative(full, psi)).epsilon(1e-10));
  CHECK(g[1] == doctest::Approx(directional_derivative(full, phi)).epsilon(1e-10));
  // riesz() inverts the Gram matrix.
  std::vector<double> r(2);
  L.riesz(g, r);
  const std::vector<double> e0{1.0, 0.0};
  CHECK(L.inner(r, e0) == doctest::Approx(g[0]).epsilon(1e-10));
}

TEST_CASE("deformation does not depend on the worker count") {
  const Scenario s = radial_scenario();
  const auto& c = s.coeffs;
  const Field psi = normalize_psi(c, s.psi);
  const double S = estimate_sobolev(c, c.domain(), {s.psi}).S;
  const auto rep = check_conditions(c, s.psi, S);
  const FieldLandscape L(c, 0.1);
  const double t2 = find_t2(c, psi, rep.t0, rep.t1, 0.1);
  DeformOptions opt;
  opt.max_sweeps = 40;
  std::vector<DeformResult> runs;
  for (const char* workers : {"1", "3"}) {
    setenv("LICHMP_THREADS", workers, 1);
    runs.push_back(deform(initial_path(L, psi, rep.t1, t2, 17), L, opt));
  }
  unsetenv("LICHMP_THREADS");
  CHECK(runs[0].path.nodes == runs[1].path.nodes);
  CHECK(runs[0].path.energies == runs[1].path.energies);
}
