#include <lichmp/continuation.hpp>
#include <lichmp/error.hpp>

#include <doctest.h>

#include <cmath>

using namespace lichmp;

namespace {

struct Setup {
  Scenario s;
  AdmissibilityReport rep;
};

Setup radial_setup() {
  const auto d = build_domain({DomainKind::RadialEuclidean, 3, 300, 10.0});
  RnExponentialParams p;
  p.theta_A = 1e-12;
  p.decay = 4.0;
  p.b_profile = BProfile::Bump;
  p.b_center = 2.0;
  p.b_width = 0.5;
  p.psi_center = 2.0;
  Setup out{build_example_rn(d, p), {}};
  const double S = estimate_sobolev(out.s.coeffs, *d, {out.s.psi}).S;
  out.rep = check_conditions(out.s.coeffs, out.s.psi, S);
  return out;
}

}  // namespace

TEST_CASE("geometric schedule") {
  const auto s = geometric_schedule(1.0, 4);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 1.0);
  CHECK(s[3] == doctest::Approx(1.0 / 64.0));
  CHECK(geometric_schedule(2.0, 3, 10.0)[2] == doctest::Approx(0.02));
  CHECK_THROWS_AS(geometric_schedule(0.0, 3), Error);
  CHECK_THROWS_AS(geometric_schedule(1.0, 0), Error);
  CHECK_THROWS_AS(geometric_schedule(1.0, 3, 1.0), Error);
}

TEST_CASE("schedule validation") {
  const Setup st = radial_setup();
  ContinuationOptions opt;
  opt.schedule = {1.0, 1.0};
  CHECK_THROWS_AS(run_continuation(st.s.coeffs, st.s.psi, st.rep, opt), Error);
  opt.schedule = {0.1, 1.0};
  CHECK_THROWS_AS(run_continuation(st.s.coeffs, st.s.psi, st.rep, opt), Error);
  opt.schedule = {1.0, -1.0};
  CHECK_THROWS_AS(run_continuation(st.s.coeffs, st.s.psi, st.rep, opt), Error);
  opt.schedule = {};
  CHECK_THROWS_AS(run_continuation(st.s.coeffs, st.s.psi, st.rep, opt), Error);
}

TEST_CASE("preconditions") {
  Setup st = radial_setup();
  ContinuationOptions opt;
  opt.schedule = {1.0};
  AdmissibilityReport bad = st.rep;
  bad.nonexistence_flag = true;
  try {
    run_continuation(st.s.coeffs, st.s.psi, bad, opt);
    FAIL("expected Precondition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
  bad = st.rep;
  bad.verdicts.psiK = false;
  CHECK_THROWS_AS(run_continuation(st.s.coeffs, st.s.psi, bad, opt), Error);
}

TEST_CASE("single step schedule") {
  const Setup st = radial_setup();
  ContinuationOptions opt;
  opt.schedule = {0.5};
  const SolveTrace tr = run_continuation(st.s.coeffs, st.s.psi, st.rep, opt);
  REQUIRE(tr.complete);
  CHECK(tr.per_eps.size() == 1);
  CHECK(std::isnan(tr.cauchy[0]));
  CHECK(tr.invariants_ok());
  CHECK(tr.levels[0] > tr.barrier);
  CHECK(tr.levels[0] <= tr.level_bound);
  CHECK(tr.singular_masses[0] <= tr.singular_bound);
  CHECK(tr.min_values[0] >= 0.0);
  CHECK_FALSE(tr.mp_trace.empty());
  CHECK(v_norm(st.s.coeffs, tr.u0 - tr.per_eps[0].u) == 0.0);
}

TEST_CASE("warm and cold starts reach the same critical point") {
  const Setup st = radial_setup();
  ContinuationOptions warm;
  warm.schedule = geometric_schedule(1.0, 4);
  ContinuationOptions cold = warm;
  cold.warm_start = false;
  const SolveTrace a = run_continuation(st.s.coeffs, st.s.psi, st.rep, warm);
  const SolveTrace b = run_continuation(st.s.coeffs, st.s.psi, st.rep, cold);
  REQUIRE(a.complete);
  REQUIRE(b.complete);
  CHECK(a.invariants_ok());
  CHECK(b.invariants_ok());
  const double diff = v_norm(st.s.coeffs, a.u0 - b.u0);
  CHECK(diff <= 1e-4 * v_norm(st.s.coeffs, a.u0));
  CHECK(a.t2 == b.t2);
  // Levels are nondecreasing as ε shrinks and the Cauchy column is filled.
  for (std::size_t k = 1; k < a.levels.size(); ++k) {
    CHECK(a.levels[k] >= a.levels[k - 1] - 1e-9 * std::fabs(a.levels[k]));
    CHECK(std::isfinite(a.cauchy[k]));
  }
}

TEST_CASE("low-regularity loop") {
  const Setup st = radial_setup();
  ContinuationOptions opt;
  opt.schedule = geometric_schedule(1.0, 2);
  const double bound = low_regularity_bound(st.rep, 0.0);
  CHECK(bound > 0.0);
  CHECK_THROWS_AS(run_low_regularity(st.s.coeffs, st.s.psi, st.rep, 0, opt), Error);

  const LowRegularityTrace one = run_low_regularity(st.s.coeffs, st.s.psi, st.rep, 1, opt);
  REQUIRE(one.complete);
  CHECK(one.per_n.size() == 1);
  CHECK(one.norms_sq.size() == 1);
  CHECK(one.per_n[0].approx_index == 1);

  const LowRegularityTrace three = run_low_regularity(st.s.coeffs, st.s.psi, st.rep, 3, opt);
  REQUIRE(three.complete);
  CHECK(three.norms_sq.size() == 3);
  CHECK(three.t2 == one.t2);
  CHECK(three.bound == doctest::Approx(low_regularity_bound(st.rep, three.t2)));
  CHECK(three.bound_ok);
  for (double n2 : three.norms_sq) CHECK(n2 <= three.bound);
}
