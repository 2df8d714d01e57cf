#include <lichmp/continuation.hpp>
#include <lichmp/error.hpp>

#include <cmath>
#include <limits>

namespace lichmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double regularized_mass(const CoefficientSet& c, const Field& u, double eps) {
  const double p = two_star(c.domain().dimension());
  const auto w = c.domain().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (c.supp_A[i]) s += w[i] * c.A[i] / std::pow(eps + u[i] * u[i], 0.5 * p);
  }
  return s;
}

void check_schedule(const std::vector<double>& eps) {
  if (eps.empty()) throw Error(ErrorKind::Validation, "empty epsilon schedule");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw Error(ErrorKind::Validation, "epsilon must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw Error(ErrorKind::Validation, "epsilon schedule must be strictly decreasing");
    }
  }
}

// Shared ε loop; t1, t2 and the bounds are already filled in `trace`.
void continue_eps(const CoefficientSet& c, const Field& psi, const ContinuationOptions& opt,
                  const Field* start, SolveTrace& trace) {
  const int N = c.domain().dimension();
  const Field* warm = start;
  Field prev;
  for (double eps : trace.eps_schedule) {
    CriticalPoint cp;
    int sweeps = 0;
    std::string warning;
    try {
      if (opt.seed) {
        RefineOptions ro = opt.mp.refine;
        ro.barrier.reset();
        cp = refine_critical(warm ? *warm : *opt.seed, c, eps, ro);
      } else {
        MpSolveOptions mo = opt.mp;
        mo.refine.barrier = trace.barrier;
        MpSolveResult r = solve_mountain_pass(c, psi, trace.t1, trace.t2, eps, mo, warm);
        cp = std::move(r.point);
        sweeps = r.deformation.sweeps;
        warning = r.deformation.warning;
        for (const auto& h : r.deformation.history) {
          trace.mp_trace.push_back({eps, h.sweep, h.max_energy, h.peak_grad_norm});
        }
      }
    } catch (const Error& e) {
      trace.failure = "eps=" + std::to_string(eps) + ": " + e.what();
      trace.eps_schedule.resize(trace.per_eps.size());
      return;
    }
    const double tol = opt.mp.refine.rel_tol * std::max(1.0, v_norm(c, cp.u));
    if (!(cp.grad_norm < tol)) {
      if (!warning.empty()) warning += "; ";
      warning += "refinement stopped at gradient norm " + std::to_string(cp.grad_norm);
    }
    const double norm = v_norm(c, cp.u);
    const double mass = regularized_mass(c, cp.u, eps);
    trace.norms.push_back(norm);
    trace.levels.push_back(cp.m);
    trace.singular_masses.push_back(mass);
    trace.min_values.push_back(cp.u.min());
    trace.cauchy.push_back(trace.per_eps.empty() ? kNaN : v_norm(c, cp.u - prev));
    trace.sweeps.push_back(sweeps);
    trace.warnings.push_back(warning);

    trace.nehari_ok = trace.nehari_ok && norm * norm <= N * cp.m * (1.0 + opt.nehari_slack);
    if (!opt.seed) trace.barrier_ok = trace.barrier_ok && cp.m > trace.barrier;
    trace.level_bound_ok = trace.level_bound_ok && cp.m <= trace.level_bound;
    trace.singular_bound_ok = trace.singular_bound_ok && mass <= trace.singular_bound;

    prev = cp.u;
    trace.per_eps.push_back(std::move(cp));
    if (opt.warm_start || opt.seed) warm = &trace.per_eps.back().u;
  }
  trace.complete = true;
}

void fill_bounds(const AdmissibilityReport& rep, SolveTrace& trace) {
  const double p = rep.two_star;
  const PhiPsiCurves curves = rep.curves();
  trace.barrier = rep.phi_t0;
  trace.level_bound = curves.psi(trace.t2) + rep.singular_mass / (p * std::pow(trace.t1, p));
  trace.singular_bound = p * trace.level_bound;
}

void require_admissible(const AdmissibilityReport& rep) {
  if (rep.nonexistence_flag) {
    throw Error(ErrorKind::Precondition, "nonexistence evidence present; refusing to solve");
  }
  if (!rep.verdicts.main_pass()) {
    throw Error(ErrorKind::Precondition, "admissibility conditions do not hold for psi");
  }
}

const char* kSubsequenceNote =
    "single deterministic trajectory: subsequence extraction is not represented";

}  // namespace

std::vector<double> geometric_schedule(double eps0, int steps, double ratio) {
  if (!(eps0 > 0.0) || steps < 1 || !(ratio > 1.0)) {
    throw Error(ErrorKind::Validation, "schedule needs eps0 > 0, steps >= 1, ratio > 1");
  }
  std::vector<double> eps(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) eps[static_cast<std::size_t>(k)] = eps0 * std::pow(ratio, -k);
  return eps;
}

SolveTrace run_continuation(const CoefficientSet& c, const Field& psi,
                            const AdmissibilityReport& rep, const ContinuationOptions& opt) {
  check_schedule(opt.schedule);
  if (!opt.seed) require_admissible(rep);
  const Field unit = normalize_psi(c, psi);
  SolveTrace trace;
  trace.eps_schedule = opt.schedule;
  trace.t1 = rep.t1;
  trace.t2 = std::isnan(rep.t2) ? find_t2(c, unit, rep.t0, rep.t1, opt.schedule.front()) : rep.t2;
  fill_bounds(rep, trace);
  trace.notes.emplace_back(kSubsequenceNote);
  continue_eps(c, unit, opt, nullptr, trace);
  if (!trace.per_eps.empty()) trace.u0 = trace.per_eps.back().u;
  return trace;
}

double low_regularity_bound(const AdmissibilityReport& rep, double t2) {
  const double p = rep.two_star;
  const double n = rep.dimension;
  const double sb = rep.S * rep.b_plus;
  return n * (0.5 * t2 * t2 + rep.S * rep.b_minus * std::pow(t2, p) / p +
              std::pow(sb, 0.5 * n) / (p * std::pow(rep.Theta, p)) * rep.singular_mass);
}

LowRegularityTrace run_low_regularity(const CoefficientSet& c, const Field& psi,
                                      const AdmissibilityReport& rep, int n_max,
                                      const ContinuationOptions& opt, const ApproxOptions& approx) {
  if (n_max < 1) throw Error(ErrorKind::Validation, "n_max must be >= 1");
  check_schedule(opt.schedule);
  require_admissible(rep);
  const Field unit = normalize_psi(c, psi);
  ApproxOptions ao = approx;
  ao.strict_minus = ao.strict_minus || rep.b_minus > 0.0;

  LowRegularityTrace out;
  const ApproxSequence first = approx_step(c, 1, ao);
  out.t2 = find_t2(c, unit, rep.t0, rep.t1, opt.schedule.front(), &first);
  out.bound = low_regularity_bound(rep, out.t2);

  Field carry;
  for (int n = 1; n <= n_max; ++n) {
    const CoefficientSet cn = approx_step(c, n, ao).as_coefficients(c);
    SolveTrace trace;
    trace.eps_schedule = opt.schedule;
    trace.approx_index = n;
    trace.t1 = rep.t1;
    trace.t2 = out.t2;
    fill_bounds(rep, trace);
    trace.notes.emplace_back(kSubsequenceNote);
    continue_eps(cn, unit, opt, n > 1 ? &carry : nullptr, trace);
    if (!trace.per_eps.empty()) {
      trace.u0 = trace.per_eps.back().u;
      carry = trace.u0;
      const double nrm = v_norm(cn, trace.u0);
      out.norms_sq.push_back(nrm * nrm);
      out.bound_ok = out.bound_ok && nrm * nrm <= out.bound;
    }
    const bool ok = trace.complete;
    if (!ok) out.failure = "n=" + std::to_string(n) + ": " + trace.failure;
    out.per_n.push_back(std::move(trace));
    if (!ok) return out;
  }
  out.complete = true;
  return out;
}

}  // namespace lichmp
