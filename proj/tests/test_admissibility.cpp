#include <lichmp/admissibility.hpp>
#include <lichmp/error.hpp>
#include <lichmp/functional.hpp>

#include <doctest.h>

#include <cmath>

using namespace lichmp;

namespace {

Scenario radial_scenario(double theta_A = 1e-12) {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 400, 10.0});
  RnExponentialParams p;
  p.theta_A = theta_A;
  p.decay = 4.0;
  p.b_profile = BProfile::Bump;
  p.b_center = 2.0;
  p.b_width = 0.5;
  p.psi_center = 2.0;
  return build_example_rn(d, p);
}

double S_of(const Scenario& s) {
  return estimate_sobolev(s.coeffs, s.coeffs.domain(), {s.psi}).S;
}

}  // namespace

TEST_CASE("critical exponent") {
  CHECK(two_star(3) == doctest::Approx(6.0));
  CHECK(two_star(4) == doctest::Approx(4.0));
  CHECK(two_star(5) == doctest::Approx(10.0 / 3.0));
  CHECK(two_star(6) == doctest::Approx(3.0));
  CHECK_THROWS_AS(two_star(2), Error);
}

TEST_CASE("Phi and Psi curves") {
  for (int n : {3, 4, 5}) {
    const double S = 0.02;
    const double bp = 1.5;
    const auto c = phi_psi_curves(S, bp, 0.5, n);
    const double p = two_star(n);
    CHECK(c.t0 == doctest::Approx(std::pow(S * bp, -(n - 2) / 4.0)).epsilon(1e-12));
    CHECK(c.phi_t0 == doctest::Approx(c.t0 * c.t0 / n).epsilon(1e-12));
    CHECK(c.phi(c.t0) == doctest::Approx(c.phi_t0).epsilon(1e-12));
    CHECK(c.phi(2.0) == doctest::Approx(2.0 - S * bp * std::pow(2.0, p) / p).epsilon(1e-12));
    CHECK(c.psi(2.0) == doctest::Approx(2.0 + S * 0.5 * std::pow(2.0, p) / p).epsilon(1e-12));
    // Φ increases on (0, t0) and decreases afterwards; Ψ >= Φ.
    double prev = c.phi(0.0);
    for (int k = 1; k <= 200; ++k) {
      const double t = 2.0 * c.t0 * k / 200.0;
      const double v = c.phi(t);
      if (t <= c.t0) {
        CHECK(v >= prev);
      } else {
        CHECK(v <= prev);
      }
      CHECK(c.psi(t) >= v);
      prev = v;
    }
  }
}

TEST_CASE("K and Theta closed forms") {
  // With b_ratio = 0: Θ² = 1/(N-1), K = (N-1)^{-(2N-2)/(N-2)}.
  for (int n : {3, 4, 5}) {
    const KTheta kt = optimal_K_theta(n, 0.0);
    CHECK(kt.feasible);
    CHECK(kt.Theta == doctest::Approx(1.0 / std::sqrt(n - 1.0)).epsilon(1e-10));
    CHECK(kt.K == doctest::Approx(std::pow(n - 1.0, -(2.0 * n - 2.0) / (n - 2.0))).epsilon(1e-10));
    CHECK(theta_k_lhs(n, 0.0, kt.K, kt.Theta) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(kt.K > hebey_constant(n));
  }
  CHECK(optimal_K_theta(3, 0.0).K == doctest::Approx(1.0 / 16.0));
  CHECK(hebey_constant(3) == doctest::Approx(1.0 / 64.0));

  // Numerical branch agrees with the closed form as the ratio tends to 0.
  const KTheta tiny = optimal_K_theta(3, 1e-10);
  CHECK(tiny.K == doctest::Approx(1.0 / 16.0).epsilon(1e-6));

  // K decreases as b₋/b₊ grows, and each optimum sits on lhs = 2.
  for (int n : {3, 4, 5}) {
    double prev = optimal_K_theta(n, 0.0).K;
    for (double beta : {0.01, 0.1, 0.5, 1.0, 2.0}) {
      const KTheta kt = optimal_K_theta(n, beta);
      if (!kt.feasible) continue;
      CHECK(kt.K <= prev * (1.0 + 1e-12));
      CHECK(kt.lhs_min <= 2.0 + 1e-9);
      CHECK(kt.Theta > 0.0);
      CHECK(kt.Theta < 1.0);
      const KTheta m = minimize_theta(n, beta, kt.K);
      CHECK(m.Theta == doctest::Approx(kt.Theta).epsilon(1e-5));
      prev = kt.K;
    }
  }
}

TEST_CASE("admissibility of a small singular term") {
  const Scenario s = radial_scenario();
  const double S = S_of(s);
  const auto r = check_conditions(s.coeffs, s.psi, S);
  CHECK(r.verdicts.B_plus_condition);
  CHECK(r.verdicts.psiK);
  CHECK(r.verdicts.ThetaK);
  CHECK(r.verdicts.main_pass());
  CHECK(r.t1 == doctest::Approx(r.Theta * r.t0));
  CHECK(std::isnan(r.t2));
  CHECK(r.singular_mass > 0.0);
  CHECK(r.B_psi_integral > 0.0);
  CHECK(r.psiK_threshold == doctest::Approx(r.K / std::pow(r.b_plus * S, 2.0)));

  // Report is unchanged by rescaling ψ.
  const auto r2 = check_conditions(s.coeffs, 5.0 * s.psi, S);
  CHECK(r2.singular_mass == doctest::Approx(r.singular_mass).epsilon(1e-12));
  CHECK(r2.B_psi_integral == doctest::Approx(r.B_psi_integral).epsilon(1e-12));
  CHECK(r2.t1 == doctest::Approx(r.t1).epsilon(1e-12));
}

TEST_CASE("psiK is invariant under the natural scaling of (A, B)") {
  const Scenario s = radial_scenario();
  const double S = S_of(s);
  const auto base = check_conditions(s.coeffs, s.psi, S);
  const double lambda = 3.0;
  CoefficientSet scaled = s.coeffs;
  scaled.A = std::pow(lambda, -2.0) * scaled.A;  // N - 1 = 2
  scaled.B = lambda * scaled.B;
  const auto r = check_conditions(scaled, s.psi, S);
  CHECK(r.singular_mass / r.psiK_threshold ==
        doctest::Approx(base.singular_mass / base.psiK_threshold).epsilon(1e-10));
  CHECK(r.verdicts.psiK == base.verdicts.psiK);
}

TEST_CASE("large A breaks psiK") {
  const Scenario s = radial_scenario();
  const double S = S_of(s);
  CoefficientSet big = s.coeffs;
  big.A = 1e6 * big.A;
  const auto base = check_conditions(s.coeffs, s.psi, S);
  const auto r = check_conditions(big, s.psi, S);
  CHECK(base.verdicts.psiK);
  CHECK(r.singular_mass == doctest::Approx(1e6 * base.singular_mass).epsilon(1e-10));
  CHECK_FALSE(r.verdicts.psiK);
  CHECK_FALSE(r.verdicts.main_pass());
}

TEST_CASE("nonpositive B fails the positivity condition") {
  const Scenario s = radial_scenario();
  const double S = S_of(s);
  CoefficientSet neg = s.coeffs;
  neg.B = -1.0 * neg.B;
  const auto r = check_conditions(neg, s.psi, S);
  CHECK_FALSE(r.verdicts.B_plus_condition);
  CHECK_FALSE(r.verdicts.main_pass());
  CHECK(std::isnan(r.t1));

  CoefficientSet zero = s.coeffs;
  zero.B = 0.0 * zero.B;
  CHECK_FALSE(check_conditions(zero, s.psi, S).verdicts.B_plus_condition);
}

TEST_CASE("normalization") {
  const Scenario s = radial_scenario();
  const Field unit = normalize_psi(s.coeffs, s.psi);
  CHECK(v_norm(s.coeffs, unit) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(normalize_psi(s.coeffs, Field(s.coeffs.domain_ptr())), Error);
}

TEST_CASE("singular mass") {
  const Scenario s = radial_scenario();
  const Field one(s.coeffs.domain_ptr(), 1.0);
  CHECK(singular_mass(s.coeffs, one) == doctest::Approx(integrate(s.coeffs.domain(), s.coeffs.A)).epsilon(1e-12));
  const Field half(s.coeffs.domain_ptr(), 0.5);
  CHECK(singular_mass(s.coeffs, half) == doctest::Approx(64.0 * singular_mass(s.coeffs, one)).epsilon(1e-12));
  CHECK(std::isinf(singular_mass(s.coeffs, Field(s.coeffs.domain_ptr()))));
}

TEST_CASE("nonexistence detector") {
  SUBCASE("A constant on the radial domain") {
    const DomainSpec base{DomainKind::RadialEuclidean, 3, 400, 10.0};
    RnExponentialParams p;
    p.theta_A = 1.0;
    p.decay = 0.0;
    const auto ev = detect_nonexistence([p](const DomainPtr& d) { return build_example_rn(d, p).coeffs; },
                                        base, default_probes(base.kind));
    CHECK(ev.flag);
    CHECK(ev.extended_extent == doctest::Approx(20.0));
    CHECK(ev.probes.size() == 3);
    for (const auto& pr : ev.probes) CHECK(pr.growth >= ev.growth_threshold);
  }
  SUBCASE("compactly supported A on the radial domain") {
    const DomainSpec base{DomainKind::RadialEuclidean, 3, 400, 10.0};
    LocalBumpParams p;
    p.a_value = 1.0;
    const auto ev = detect_nonexistence([p](const DomainPtr& d) { return build_example_local(d, p).coeffs; },
                                        base, default_probes(base.kind));
    CHECK_FALSE(ev.flag);
  }
  SUBCASE("exponentially decaying A") {
    const DomainSpec base{DomainKind::RadialEuclidean, 3, 400, 10.0};
    RnExponentialParams p;
    p.theta_A = 1.0;
    p.decay = 2.0;
    const auto ev = detect_nonexistence([p](const DomainPtr& d) { return build_example_rn(d, p).coeffs; },
                                        base, default_probes(base.kind));
    CHECK_FALSE(ev.flag);
  }
  SUBCASE("constant A on the torus") {
    const DomainSpec base{DomainKind::FlatTorus, 3, 8, 2.0};
    const auto ev = detect_nonexistence(
        [](const DomainPtr& d) {
          return make_coefficients(Field(d, 1.0), Field(d, 1.0), Field(d, 1.0));
        },
        base, default_probes(base.kind));
    CHECK_FALSE(ev.flag);
    CHECK(std::isnan(ev.probes.front().mass_extended));
  }
}
