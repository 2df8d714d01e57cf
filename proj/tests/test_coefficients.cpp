#include <lichmp/coefficients.hpp>
#include <lichmp/error.hpp>

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace lichmp;

namespace {

// Generalized eigenproblem (K + W V) x = λ W x solved densely.
double dense_smallest_eigenvalue(const Domain& d, const Field& V) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd K(n, n);
  std::vector<double> e(d.size()), col(d.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    apply_stiffness(d, e, col);
    for (Eigen::Index i = 0; i < n; ++i) K(i, j) = col[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = d.weights()[static_cast<std::size_t>(i)];
    K(i, i) += wi * V[static_cast<std::size_t>(i)];
    w(i) = 1.0 / std::sqrt(wi);
  }
  const Eigen::MatrixXd S = w.asDiagonal() * K * w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("rn-exponential family") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 200, 10.0});
  RnExponentialParams p;
  p.theta_A = 0.5;
  p.decay = 1.0;
  const Scenario s = build_example_rn(d, p);
  CHECK(s.coeffs.A[0] == doctest::Approx(0.5 * std::exp(-d->radii()[0])));
  CHECK(s.coeffs.B.min() == doctest::Approx(1.0));
  CHECK(s.coeffs.family == "rn-exponential");
  CHECK(s.psi.min() > 0.0);
  CHECK(std::isfinite(s.singular_integral));

  p.theta_A = 0.0;
  CHECK_THROWS_AS(build_example_rn(d, p), Error);
}

TEST_CASE("rn-exponential spike adds an integrable singularity") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 1000, 20.0});
  RnExponentialParams p;
  p.spike_height = 1.0;
  p.spike_center = 2.0;
  p.spike_width = 0.5;
  const Scenario s = build_example_rn(d, p);
  CHECK(s.coeffs.A.max() > 5.0);
  CHECK(std::isfinite(integrate(*d, s.coeffs.A)));
}

TEST_CASE("local-bump family and support checks") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 300, 6.0});
  LocalBumpParams p;
  p.r1 = 1.0;
  p.r2 = 2.0;
  p.psi_plateau = 1.5;
  const Scenario s = build_example_local(d, p);
  for (std::size_t i = 0; i < d->size(); ++i) {
    const double r = d->radii()[i];
    CHECK((s.coeffs.A[i] > 0.0) == (r <= 1.0));
    if (r >= 2.0) CHECK(s.psi[i] == 0.0);
  }
  // ψ vanishing on part of supp A makes A/|ψ|^{2*} non-integrable.
  p.psi_hole = 0.5;
  try {
    build_example_local(d, p);
    FAIL("expected a support error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Support);
  }
}

TEST_CASE("approximation sequence is monotone and converges") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 400, 10.0});
  RnExponentialParams p;
  p.spike_height = 1.0;
  p.spike_center = 2.0;
  p.b_profile = BProfile::Bump;
  p.b_center = 3.0;
  p.b_amplitude = 5.0;
  Scenario s = build_example_rn(d, p);
  // Give B a negative part so both halves are exercised.
  for (std::size_t i = 0; i < d->size(); ++i) {
    if (d->radii()[i] > 6.0) s.coeffs.B[i] = -4.0;
  }
  const ApproxSequence a1 = approx_step(s.coeffs, 1);
  const ApproxSequence a2 = approx_step(s.coeffs, 2);
  const ApproxSequence a50 = approx_step(s.coeffs, 50);
  for (std::size_t i = 0; i < d->size(); ++i) {
    CHECK(a1.A_n[i] <= a2.A_n[i]);
    CHECK(a2.A_n[i] <= a50.A_n[i]);
    CHECK(a2.A_n[i] <= s.coeffs.A[i]);
    CHECK(a1.B_n_plus[i] <= a2.B_n_plus[i]);
    CHECK(a1.B_n_minus[i] <= a2.B_n_minus[i]);
    CHECK(a1.A_n[i] <= 1.0);
  }
  const ApproxSequence strict = approx_step(s.coeffs, 2, {1.0, true});
  for (std::size_t i = 0; i < d->size(); ++i) {
    CHECK(strict.B_n_minus[i] == doctest::Approx(0.5 * a2.B_n_minus[i]));
  }
  CHECK_THROWS_AS(approx_step(s.coeffs, 0), Error);
  const CoefficientSet c50 = a50.as_coefficients(s.coeffs);
  CHECK(c50.B.min() == doctest::Approx(-4.0));
}

TEST_CASE("assumption report") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 60, 5.0});
  const Field A(d, 0.1), B(d, 1.0);
  const AssumptionReport ok = check_assumptions(make_coefficients(A, B, Field(d, 2.0)));
  CHECK(ok.A_pass);
  CHECK(ok.B_pass);
  CHECK(ok.V_pass);
  CHECK(ok.V_method == "essinf");
  CHECK(ok.A_dual_norm > 0.0);

  // V negative somewhere but -Δ + V still coercive thanks to the Dirichlet face.
  Field V = Field::from_radius(d, [](double r) { return r < 1.0 ? -0.5 : 0.0; });
  const AssumptionReport ray = check_assumptions(make_coefficients(A, B, V));
  CHECK(ray.V_method == "rayleigh");
  REQUIRE(ray.rayleigh_estimate.has_value());
  CHECK(*ray.rayleigh_estimate == doctest::Approx(dense_smallest_eigenvalue(*d, V)).epsilon(1e-8));

  const AssumptionReport bad = check_assumptions(make_coefficients(A, Field(d, -1.0), Field(d, 1.0)));
  CHECK_FALSE(bad.B_pass);
}

TEST_CASE("smallest Rayleigh quotient matches a dense eigensolve") {
  const auto r = build_domain({DomainKind::RadialEuclidean, 3, 80, 4.0});
  const Field Vr = Field::from_radius(r, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(smallest_rayleigh_quotient(*r, Vr) == doctest::Approx(dense_smallest_eigenvalue(*r, Vr)).epsilon(1e-8));
  const auto t = build_domain({DomainKind::FlatTorus, 3, 6, 2.0});
  const Field Vt = Field::from_radius(t, [](double x) { return 0.5 + x; });
  CHECK(smallest_rayleigh_quotient(*t, Vt) == doctest::Approx(dense_smallest_eigenvalue(*t, Vt)).epsilon(1e-8));
}

TEST_CASE("support mask and bounds") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 10, 1.0});
  Field f(d);
  f[2] = 1.0;
  f[3] = 1e-15;
  const NodeMask m = support_mask(f);
  CHECK(m[2] == 1);
  CHECK(m[3] == 0);
  Field B(d, -2.0);
  B[2] = 3.0;
  NodeMask all(d->size(), 1);
  const SupportBounds b = bounds_on(B, all);
  CHECK(b.b_plus == 3.0);
  CHECK(b.b_minus == 2.0);
  CHECK(b.b_abs == 3.0);
}
