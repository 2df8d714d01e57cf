#include <lichmp/error.hpp>
#include <lichmp/verify.hpp>

#include <doctest.h>

#include <cmath>

using namespace lichmp;

namespace {

struct Manufactured {
  CoefficientSet c;
  Field u;
};

/// u_m = 0.5(1 + 0.3 cos x₁) solves the equation (ε = 0) or its regularization (ε > 0).
Manufactured manufactured(double eps, std::size_t n = 8) {
  const auto d = build_domain({DomainKind::FlatTorus, 3, n, 2.0 * M_PI});
  Field u = Field::from_position(d, [](std::span<const double> x) { return 0.5 * (1.0 + 0.3 * std::cos(x[0])); });
  std::vector<double> ku(d->size());
  apply_stiffness(*d, u.values(), ku);
  const auto w = d->weights();
  Field A(d);
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double s = u[i];
    const double lhs = ku[i] / w[i] + s - 0.1 * std::pow(s, 5);
    A[i] = eps > 0.0 ? lhs * std::pow(eps + s * s, 4.0) / s : lhs * std::pow(s, 7);
  }
  return {make_coefficients(A, Field(d, 0.1), Field(d, 1.0), "manufactured"), u};
}

}  // namespace

TEST_CASE("positivity on balls") {
  const auto d = build_domain({DomainKind::FlatTorus, 3, 8, 2.0});
  const auto balls = default_balls(*d);
  CHECK(balls.size() == 512);
  std::vector<std::uint8_t> covered(d->size(), 0);
  for (const auto& b : balls) {
    for (std::size_t i = 0; i < d->size(); ++i) covered[i] |= b.mask[i];
  }
  for (auto x : covered) CHECK(x == 1);

  Field u(d, 1.0);
  const auto ok = positivity_check(u, balls);
  CHECK(ok.pass);
  CHECK(ok.min_value == 1.0);
  CHECK_FALSE(ok.offending.has_value());

  const std::size_t hole = 137;
  u[hole] = 0.0;
  const auto bad = positivity_check(u, balls);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.offending.has_value());
  CHECK(balls[*bad.offending].mask[hole] == 1);
  CHECK(bad.per_ball_min[*bad.offending] == 0.0);

  const auto r = build_domain({DomainKind::RadialEuclidean, 3, 160, 8.0});
  const auto rb = default_balls(*r);
  CHECK(rb.size() == 17);
  const Ball b = make_ball(*r, {4.0}, 1.0);
  for (std::size_t i = 0; i < r->size(); ++i) {
    CHECK(static_cast<bool>(b.mask[i]) == (std::fabs(r->radii()[i] - 4.0) <= 1.0));
  }
}

TEST_CASE("Harnack probe") {
  const auto d = build_domain({DomainKind::FlatTorus, 3, 16, 1.0});
  const std::vector<double> center{0.5, 0.5, 0.5};
  SUBCASE("constant") {
    const HarnackResult h = harnack_probe(Field(d, 2.0), 1.0, center, 1.0);
    const Ball small = make_ball(*d, center, 1.0 / 8.0);
    double vol = 0.0;
    for (std::size_t i = 0; i < d->size(); ++i) vol += small.mask[i] ? d->weights()[i] : 0.0;
    CHECK(h.rhs_inf == 2.0);
    CHECK(h.lhs == doctest::Approx(2.0 * vol * vol).epsilon(1e-12));
    CHECK(h.ratio == doctest::Approx(vol * vol).epsilon(1e-12));
    CHECK(h.smp_consistent);
  }
  SUBCASE("violated hypothesis") {
    try {
      harnack_probe(Field(d, 1.0), -1.0, center, 1.0);
      FAIL("expected Hypothesis");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Hypothesis);
    }
    CHECK_THROWS_AS(harnack_probe(Field(d, -1.0), 1.0, center, 1.0), Error);
  }
  SUBCASE("identically zero") {
    const HarnackResult h = harnack_probe(Field(d), 1.0, center, 1.0);
    CHECK(std::isinf(h.ratio));
    CHECK(h.smp_consistent);
  }
  SUBCASE("bench over a supersolution family") {
    const auto fam = supersolution_family(d, 1.0, 4, 3);
    REQUIRE(fam.size() == 4);
    for (const auto& f : fam) CHECK(f.min() > 0.0);
    const HarnackBench b = harnack_bench(d, 1.0, 4, 3, center, 1.0);
    CHECK(b.ratios.size() == 4);
    CHECK(b.all_finite);
    CHECK(b.constant_estimate == doctest::Approx(*std::max_element(b.ratios.begin(), b.ratios.end())));
  }
}

TEST_CASE("residual of a manufactured solution") {
  const auto [c, um] = manufactured(0.0);
  CHECK(c.A.min() > 0.0);
  const double r0 = solution_residual(c, um);
  CHECK(r0 < 1e-10);
  double prev = r0;
  for (double delta : {1e-4, 1e-3, 1e-2, 1e-1}) {
    Field u = um;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= 1.0 + delta * std::sin(3.0 * static_cast<double>(i));
    const double r = solution_residual(c, u);
    CHECK(r > prev);
    prev = r;
  }
  Field z = um;
  z[5] = 0.0;
  CHECK_THROWS_AS(solution_residual(c, z), Error);
}

TEST_CASE("supersolution margin") {
  const auto [c, um] = manufactured(0.0);
  const auto tests = random_bumps(c.domain_ptr(), 20, 4);
  REQUIRE(tests.size() == 20);
  for (const auto& t : tests) CHECK(t.min() >= 0.0);

  const auto exact = supersolution_test(c, um, tests);
  CHECK(exact.pass);
  CHECK(std::fabs(exact.margin) <= exact.tolerance);
  CHECK(exact.per_test.size() == um.size() + tests.size());

  const auto low = supersolution_test(c, 0.5 * um, tests);
  CHECK_FALSE(low.pass);
  CHECK(low.margin < -low.tolerance);
  CHECK_FALSE(low.diagnosis.empty());

  const auto high = supersolution_test(c, 2.0 * um, tests);
  CHECK(high.pass);
  CHECK(high.margin > 0.0);

  // A larger singular coefficient only lowers the margin.
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {0.5, 1.0, 2.0, 4.0}) {
    CoefficientSet ck = c;
    ck.A = k * c.A;
    const double m = supersolution_test(ck, 2.0 * um, tests).margin;
    CHECK(m <= prev);
    prev = m;
  }

  Field z = um;
  z[3] = 0.0;
  const auto hole = supersolution_test(c, z);
  CHECK_FALSE(hole.integrable);
  CHECK_FALSE(hole.pass);
  Field neg = um;
  neg[3] = -0.1;
  CHECK_THROWS_AS(supersolution_test(c, neg), Error);
}

TEST_CASE("regularized margin of a regularized solution") {
  const double eps = 0.01;
  const auto [c, um] = manufactured(eps);
  const auto r = supersolution_test(c, um, random_bumps(c.domain_ptr(), 10, 5), eps);
  CHECK(r.pass);
  CHECK(std::fabs(r.margin) <= r.tolerance);
  // The unregularized inequality sees a larger singular term and fails.
  CHECK_FALSE(supersolution_test(c, um, {}, 0.0).pass);
}

TEST_CASE("random bumps are reproducible") {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 100, 5.0});
  const auto a = random_bumps(d, 5, 42);
  const auto b = random_bumps(d, 5, 42);
  const auto c = random_bumps(d, 5, 43);
  REQUIRE(a.size() == 5);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < d->size(); ++i) {
      CHECK(a[k][i] == b[k][i]);
      differs = differs || a[k][i] != c[k][i];
    }
  }
  CHECK(differs);
}

TEST_CASE("finite energy and full verification") {
  const auto [c, um] = manufactured(0.0);
  const FiniteEnergy fe = finite_energy(c, um);
  CHECK(fe.both_finite);
  CHECK(fe.critical_part > 0.0);
  CHECK(fe.singular_part > 0.0);
  Field z = um;
  z[0] = 0.0;
  CHECK_FALSE(finite_energy(c, z).both_finite);

  VerifyOptions opt;
  opt.random_tests = 10;
  const VerificationReport r = verify_field(c, um, opt);
  CHECK(r.verdicts.supersolution);
  CHECK(r.verdicts.finite_energy);
  CHECK(r.verdicts.positivity);
  CHECK(r.verdicts.harnack);
  CHECK(r.residual_norm < 1e-10);
  CHECK(std::isfinite(r.harnack.ratio));
}
