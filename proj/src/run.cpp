#include <lichmp/cli.hpp>
#include <lichmp/error.hpp>
#include <lichmp/functional.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lichmp {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json to_json(const AdmissibilityReport& r) {
  return {
      {"S", num(r.S)},
      {"b_plus", num(r.b_plus)},
      {"b_minus", num(r.b_minus)},
      {"two_star", num(r.two_star)},
      {"t0", num(r.t0)},
      {"phi_t0", num(r.phi_t0)},
      {"K", num(r.K)},
      {"Theta", num(r.Theta)},
      {"t1", num(r.t1)},
      {"t2", num(r.t2)},
      {"singular_mass", num(r.singular_mass)},
      {"verdicts",
       {{"B_plus_condition", r.verdicts.B_plus_condition},
        {"psiK", r.verdicts.psiK},
        {"ThetaK", r.verdicts.ThetaK},
        {"ThetaK_alt", r.verdicts.ThetaK_alt}}},
      {"nonexistence_flag", r.nonexistence_flag},
      {"hebey_K", num(r.hebey_K)},
      {"supporting",
       {{"dimension", r.dimension},
        {"b_abs", num(r.b_abs)},
        {"B_psi_integral", num(r.B_psi_integral)},
        {"psiK_threshold", num(r.psiK_threshold)},
        {"thetaK_lhs", num(r.thetaK_lhs)},
        {"K_alt", num(r.K_alt)},
        {"Theta_alt", num(r.Theta_alt)},
        {"psiK_alt_threshold", num(r.psiK_alt_threshold)},
        {"psi_norm", num(r.psi_norm)}}},
  };
}

double get_num(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

json to_json(const NonexistenceEvidence& e) {
  json probes = json::array();
  for (const auto& p : e.probes) {
    probes.push_back({{"name", p.name},
                      {"mass_base", num(p.mass_base)},
                      {"mass_extended", num(p.mass_extended)},
                      {"growth", num(p.growth)},
                      {"divergent", p.divergent}});
  }
  return {{"flag", e.flag},
          {"base_extent", num(e.base_extent)},
          {"extended_extent", num(e.extended_extent)},
          {"growth_threshold", num(e.growth_threshold)},
          {"reason", e.reason},
          {"probes", probes}};
}

json to_json(const AssumptionReport& a) {
  json j = {{"A_pass", a.A_pass},
            {"B_pass", a.B_pass},
            {"V_pass", a.V_pass},
            {"V_method", a.V_method},
            {"essinf_V", num(a.essinf_V)},
            {"A_dual_norm", num(a.A_dual_norm)}};
  j["rayleigh_estimate"] = a.rayleigh_estimate ? num(*a.rayleigh_estimate) : json(nullptr);
  return j;
}

json to_json(const VerificationReport& v) {
  json balls = nums(v.positivity.per_ball_min);
  json pos = {{"min_value", num(v.positivity.min_value)}, {"per_ball_min", balls}};
  pos["offending_ball"] = v.positivity.offending ? json(*v.positivity.offending) : json(nullptr);
  return {
      {"supersolution_margin", num(v.supersolution_margin)},
      {"supersolution_margin_eps", num(v.supersolution_margin_eps)},
      {"eps", num(v.eps)},
      {"residual_norm", num(v.residual_norm)},
      {"finite_energy",
       {{"critical_part", num(v.finite_energy.critical_part)},
        {"singular_part", num(v.finite_energy.singular_part)},
        {"both_finite", v.finite_energy.both_finite}}},
      {"positivity", pos},
      {"harnack",
       {{"q", num(v.harnack.q)},
        {"lhs", num(v.harnack.lhs)},
        {"rhs_inf", num(v.harnack.rhs_inf)},
        {"ratio", num(v.harnack.ratio)},
        {"constant_estimate", num(v.harnack_constant_estimate)},
        {"hypothesis_margin", num(v.harnack.hypothesis_margin)},
        {"smp_consistent", v.harnack.smp_consistent}}},
      {"verdicts",
       {{"supersolution", v.verdicts.supersolution},
        {"supersolution_eps", v.verdicts.supersolution_eps},
        {"finite_energy", v.verdicts.finite_energy},
        {"positivity", v.verdicts.positivity},
        {"harnack", v.verdicts.harnack}}},
      {"diagnosis", v.diagnosis},
  };
}

json to_json(const SolveTrace& t, const std::vector<std::string>& dumps, const std::string& u0_dump) {
  json per = json::array();
  for (std::size_t k = 0; k < t.per_eps.size(); ++k) {
    const auto& cp = t.per_eps[k];
    json row = {{"eps", num(cp.eps)},
                {"m", num(cp.m)},
                {"grad_norm", num(cp.grad_norm)},
                {"iterations", cp.iterations}};
    row["dump"] = k < dumps.size() ? json(dumps[k]) : json(nullptr);
    per.push_back(row);
  }
  json j = {
      {"eps_schedule", nums(t.eps_schedule)},
      {"per_eps", per},
      {"norms", nums(t.norms)},
      {"levels", nums(t.levels)},
      {"singular_masses", nums(t.singular_masses)},
      {"min_values", nums(t.min_values)},
      {"cauchy", nums(t.cauchy)},
      {"sweeps", t.sweeps},
      {"warnings", t.warnings},
      {"t1", num(t.t1)},
      {"t2", num(t.t2)},
      {"barrier", num(t.barrier)},
      {"level_bound", num(t.level_bound)},
      {"singular_bound", num(t.singular_bound)},
      {"invariants",
       {{"nehari", t.nehari_ok},
        {"barrier", t.barrier_ok},
        {"level_bound", t.level_bound_ok},
        {"singular_bound", t.singular_bound_ok}}},
      {"complete", t.complete},
      {"failure", t.failure},
      {"notes", t.notes},
  };
  j["u0"] = u0_dump.empty() ? json(nullptr) : json(u0_dump);
  j["approx_index"] = t.approx_index ? json(*t.approx_index) : json(nullptr);
  return j;
}

class Artifacts {
 public:
  Artifacts(fs::path dir, RunOutcome& out) : dir_(std::move(dir)), out_(out) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir_.string());
  }

  const fs::path& dir() const { return dir_; }

  void write_text(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + p.string());
    f << text;
    f.flush();
    if (!f) throw Error(ErrorKind::Io, "write failed for " + p.string());
    remember(p);
  }

  void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

  // Returns the dump path relative to the output directory.
  std::string dump(const std::string& stem, const Field& u, DumpFormat fmt) {
    if (fmt == DumpFormat::None) return {};
    const fs::path sub = dir_ / "fields";
    fs::create_directories(sub);
    std::string rel;
    if (fmt == DumpFormat::Binary || fmt == DumpFormat::Both) {
      write_field_binary(sub / (stem + ".lchf"), u);
      remember(sub / (stem + ".lchf"));
      rel = "fields/" + stem + ".lchf";
    }
    if (fmt == DumpFormat::Csv || fmt == DumpFormat::Both) {
      write_field_csv(sub / (stem + ".csv"), u);
      remember(sub / (stem + ".csv"));
      if (rel.empty()) rel = "fields/" + stem + ".csv";
    }
    return rel;
  }

 private:
  void remember(const fs::path& p) {
    for (const auto& a : out_.artifacts) {
      if (a == p) return;
    }
    out_.artifacts.push_back(p);
  }

  fs::path dir_;
  RunOutcome& out_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string convergence_csv(const SolveTrace& t) {
  std::string s = "eps,m_eps,norm,singular_mass,min_u\n";
  for (std::size_t k = 0; k < t.per_eps.size(); ++k) {
    s += fmt(t.eps_schedule[k]) + "," + fmt(t.levels[k]) + "," + fmt(t.norms[k]) + "," +
         fmt(t.singular_masses[k]) + "," + fmt(t.min_values[k]) + "\n";
  }
  return s;
}

std::string mp_trace_csv(const SolveTrace& t) {
  std::string s = "eps,sweep,max_energy,peak_grad_norm\n";
  for (const auto& r : t.mp_trace) {
    s += fmt(r.eps) + "," + std::to_string(r.sweep) + "," + fmt(r.max_energy) + "," +
         fmt(r.peak_grad_norm) + "\n";
  }
  return s;
}

Field read_table(const fs::path& path, const DomainPtr& d, double fallback) {
  if (path.empty()) return Field(d, fallback);
  return read_field_csv(path, d);
}

ContinuationOptions continuation_options(const RunConfig& cfg) {
  ContinuationOptions o;
  o.schedule = cfg.eps_schedule();
  o.warm_start = cfg.solver.warm_start;
  o.mp.path_nodes = cfg.solver.path_nodes;
  o.mp.deform.max_sweeps = cfg.solver.max_sweeps;
  o.mp.deform.grad_tol = cfg.solver.grad_tol;
  o.mp.deform.stagnation_tol = cfg.solver.stagnation_tol;
  o.mp.refine.rel_tol = cfg.solver.refine_tol;
  return o;
}

VerifyOptions verify_options(const RunConfig& cfg, double eps) {
  VerifyOptions v;
  v.eps = eps;
  v.random_tests = cfg.solver.random_tests;
  v.seed = cfg.solver.seed;
  v.harnack_d = cfg.solver.harnack_d;
  v.q = cfg.solver.harnack_q;
  return v;
}

bool nonnegative(const Field& f) { return f.min() >= 0.0; }

// Gated checks for a computed solution: the ε-equation, positivity and
// finite energy; Harnack only when its hypothesis is implied (B >= 0).
bool solution_verdicts(const CoefficientSet& c, const VerificationReport& v) {
  bool ok = v.verdicts.supersolution_eps && v.verdicts.positivity && v.verdicts.finite_energy;
  if (nonnegative(c.B)) ok = ok && v.verdicts.harnack;
  return ok;
}

struct Admissibility {
  AdmissibilityReport report;
  AssumptionReport assumptions;
  SobolevEstimate sobolev;
  NonexistenceEvidence evidence;
};

Admissibility assess(const RunConfig& cfg, const DomainPtr& d, const Scenario& s) {
  Admissibility a;
  a.assumptions = check_assumptions(s.coeffs);
  a.sobolev = estimate_sobolev(s.coeffs, *d, {s.psi});
  a.report = check_conditions(s.coeffs, s.psi, a.sobolev.S);
  if (cfg.family == "custom-table" && cfg.domain.kind == DomainKind::RadialEuclidean) {
    a.evidence.reason = "tabulated coefficients cannot be extended to a larger domain";
    a.evidence.base_extent = cfg.domain.extent;
  } else {
    const RunConfig copy = cfg;
    a.evidence = detect_nonexistence(
        [copy](const DomainPtr& dd) { return build_scenario(copy, dd).coeffs; }, cfg.domain,
        default_probes(cfg.domain.kind));
  }
  a.report.nonexistence_flag = a.evidence.flag;
  return a;
}

json admissibility_json(const Admissibility& a, const Scenario& s) {
  json j = to_json(a.report);
  j["assumptions"] = to_json(a.assumptions);
  j["sobolev"] = {{"S", num(a.sobolev.S)},
                  {"iterations", a.sobolev.iterations},
                  {"converged", a.sobolev.converged},
                  {"best_seed", a.sobolev.best_seed}};
  j["nonexistence_evidence"] = to_json(a.evidence);
  j["scenario"] = {{"family", s.coeffs.family},
                   {"singular_integral", num(s.singular_integral)},
                   {"tail_fraction", num(s.tail_fraction)},
                   {"integrable", s.integrable},
                   {"notes", s.notes}};
  return j;
}

std::string verdict_line(const char* name, bool ok) {
  return std::string(name) + ": " + (ok ? "pass" : "fail") + "\n";
}

int run_verify(const RunConfig& cfg, const DomainPtr& d, const Scenario& s, Artifacts& art,
               std::string& summary) {
  const Field u = read_field(cfg.solver.verify_field, d);
  const VerificationReport v = verify_field(s.coeffs, u, verify_options(cfg, cfg.solver.verify_eps));
  art.write_json("verification.report", to_json(v));
  const bool sup = cfg.solver.verify_eps > 0.0 ? v.verdicts.supersolution_eps : v.verdicts.supersolution;
  summary += verdict_line("supersolution", sup);
  summary += verdict_line("finite energy", v.verdicts.finite_energy);
  summary += verdict_line("positivity", v.verdicts.positivity);
  return sup && v.verdicts.finite_energy && v.verdicts.positivity ? kExitOk : kExitFailure;
}

int run_harnack(const RunConfig& cfg, const DomainPtr& d, Artifacts& art, std::string& summary) {
  std::vector<double> center;
  double R = cfg.solver.harnack_radius;
  if (d->kind() == DomainKind::RadialEuclidean) {
    center = {0.0};
    if (R == 0.0) R = 0.5 * d->extent();
  } else {
    center.assign(static_cast<std::size_t>(d->dimension()), 0.5 * d->extent());
    if (R == 0.0) R = d->extent();
  }
  const HarnackBench b = harnack_bench(d, cfg.solver.harnack_d, cfg.solver.harnack_count,
                                       cfg.solver.seed, center, R, cfg.solver.harnack_q);
  std::string csv = "index,ratio\n";
  for (std::size_t k = 0; k < b.ratios.size(); ++k) csv += std::to_string(k) + "," + fmt(b.ratios[k]) + "\n";
  art.write_text("harnack.csv", csv);
  art.write_json("harnack.report", {{"q", cfg.solver.harnack_q},
                                    {"d", cfg.solver.harnack_d},
                                    {"R", R},
                                    {"center", center},
                                    {"ratios", nums(b.ratios)},
                                    {"constant_estimate", num(b.constant_estimate)},
                                    {"all_finite", b.all_finite}});
  summary += "harnack constant estimate: " + fmt(b.constant_estimate) + "\n";
  summary += verdict_line("harnack ratios finite", b.all_finite);
  return b.all_finite ? kExitOk : kExitFailure;
}

int run_solve(const RunConfig& cfg, const DomainPtr& d, const Scenario& s, Admissibility& adm,
              Artifacts& art, std::string& summary) {
  ContinuationOptions opt = continuation_options(cfg);
  if (!cfg.solver.start_field.empty()) opt.seed = read_field(cfg.solver.start_field, d);
  SolveTrace trace = run_continuation(s.coeffs, s.psi, adm.report, opt);
  adm.report.t2 = trace.t2;
  art.write_json("admissibility.report", admissibility_json(adm, s));

  art.write_text("convergence.csv", convergence_csv(trace));
  art.write_text("mp_trace.csv", mp_trace_csv(trace));
  std::vector<std::string> dumps;
  for (std::size_t k = 0; k < trace.per_eps.size(); ++k) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "u_eps_%02zu", k);
    dumps.push_back(art.dump(stem, trace.per_eps[k].u, cfg.output.dumps));
  }
  const std::string u0 = trace.per_eps.empty() ? "" : art.dump("u0", trace.u0, cfg.output.dumps);
  json record = to_json(trace, dumps, u0);
  art.write_json("trace.record", record);
  if (!trace.complete) {
    summary += "solver failure: " + trace.failure + "\n";
    return kExitFailure;
  }

  const double eps = trace.eps_schedule.back();
  const VerificationReport v = verify_field(s.coeffs, trace.u0, verify_options(cfg, eps));
  record["verify"] = to_json(v);
  art.write_json("trace.record", record);
  art.write_json("verification.report", to_json(v));

  summary += "t2: " + fmt(trace.t2) + "\n";
  summary += "levels: " + fmt(trace.levels.front()) + " .. " + fmt(trace.levels.back()) + "\n";
  summary += verdict_line("nehari bound", trace.nehari_ok);
  summary += verdict_line("barrier", trace.barrier_ok);
  summary += verdict_line("level bound", trace.level_bound_ok);
  summary += verdict_line("singular mass bound", trace.singular_bound_ok);
  summary += verdict_line("regularized equation", v.verdicts.supersolution_eps);
  summary += verdict_line("positivity", v.verdicts.positivity);
  summary += verdict_line("finite energy", v.verdicts.finite_energy);
  summary += verdict_line("harnack", v.verdicts.harnack);
  return trace.invariants_ok() && solution_verdicts(s.coeffs, v) ? kExitOk : kExitFailure;
}

int run_low_regularity_mode(const RunConfig& cfg, const Scenario& s, Admissibility& adm,
                            Artifacts& art, std::string& summary) {
  const ContinuationOptions opt = continuation_options(cfg);
  ApproxOptions ao;
  ao.unit_radius = cfg.solver.unit_radius;
  const LowRegularityTrace lr = run_low_regularity(s.coeffs, s.psi, adm.report, cfg.solver.n_max, opt, ao);
  adm.report.t2 = lr.t2;
  art.write_json("admissibility.report", admissibility_json(adm, s));

  std::string csv = "n,norm_sq,bound\n";
  json per_n = json::array();
  for (std::size_t k = 0; k < lr.per_n.size(); ++k) {
    const SolveTrace& t = lr.per_n[k];
    const std::string stem = "u0_n" + std::to_string(k + 1);
    const std::string dump = t.per_eps.empty() ? "" : art.dump(stem, t.u0, cfg.output.dumps);
    per_n.push_back(to_json(t, {}, dump));
    if (k < lr.norms_sq.size()) {
      csv += std::to_string(k + 1) + "," + fmt(lr.norms_sq[k]) + "," + fmt(lr.bound) + "\n";
    }
  }
  art.write_text("low_regularity.csv", csv);
  if (!lr.per_n.empty()) {
    art.write_text("convergence.csv", convergence_csv(lr.per_n.back()));
    art.write_text("mp_trace.csv", mp_trace_csv(lr.per_n.back()));
  }
  json record = {{"t2", num(lr.t2)},
                 {"bound", num(lr.bound)},
                 {"norms_sq", nums(lr.norms_sq)},
                 {"bound_ok", lr.bound_ok},
                 {"complete", lr.complete},
                 {"failure", lr.failure},
                 {"per_n", per_n}};
  art.write_json("trace.record", record);
  if (!lr.complete) {
    summary += "solver failure: " + lr.failure + "\n";
    return kExitFailure;
  }

  const SolveTrace& last = lr.per_n.back();
  ApproxOptions strict = ao;
  strict.strict_minus = adm.report.b_minus > 0.0;
  const CoefficientSet cn = approx_step(s.coeffs, cfg.solver.n_max, strict).as_coefficients(s.coeffs);
  const VerificationReport v = verify_field(cn, last.u0, verify_options(cfg, last.eps_schedule.back()));
  record["verify"] = to_json(v);
  art.write_json("trace.record", record);
  art.write_json("verification.report", to_json(v));

  bool invariants = true;
  for (const auto& t : lr.per_n) invariants = invariants && t.invariants_ok();
  summary += "t2: " + fmt(lr.t2) + "\n";
  summary += "closed-form norm bound: " + fmt(lr.bound) + "\n";
  summary += verdict_line("uniform norm bound", lr.bound_ok);
  summary += verdict_line("per-n trace invariants", invariants);
  summary += verdict_line("regularized equation", v.verdicts.supersolution_eps);
  summary += verdict_line("positivity", v.verdicts.positivity);
  return lr.bound_ok && invariants && solution_verdicts(cn, v) ? kExitOk : kExitFailure;
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg, const DomainPtr& d) {
  Scenario s;
  if (cfg.family == "rn-exponential") {
    RnExponentialParams p = cfg.rn;
    p.psi_power = cfg.psi.power;
    p.psi_center = cfg.psi.center;
    s = build_example_rn(d, p);
  } else if (cfg.family == "local-bump") {
    LocalBumpParams p = cfg.local;
    p.psi_plateau = cfg.psi.plateau;
    p.psi_hole = cfg.psi.hole;
    s = build_example_local(d, p);
  } else if (cfg.family == "custom-table") {
    s.coeffs = make_coefficients(read_table(cfg.tables.A, d, cfg.tables.A_default),
                                 read_table(cfg.tables.B, d, cfg.tables.B_default),
                                 read_table(cfg.tables.V, d, cfg.tables.V_default), "custom-table");
    if (!(s.coeffs.A.max() > 0.0) || s.coeffs.A.min() < 0.0) {
      throw Error(ErrorKind::Spec, "assumption (A) violated by the A table");
    }
    if (!cfg.psi.table.empty()) {
      s.psi = read_field_csv(cfg.psi.table, d);
    } else {
      const double c = cfg.psi.center;
      const double pw = cfg.psi.power;
      s.psi = Field::from_radius(d, [c, pw](double r) { return std::pow(1.0 + (r - c) * (r - c), -pw); });
    }
    s.singular_integral = singular_mass(s.coeffs, s.psi);
    s.integrable = std::isfinite(s.singular_integral);
  } else {
    throw Error(ErrorKind::Validation, "unknown family '" + cfg.family + "'");
  }
  if (cfg.psi.scale != 1.0) s.psi *= cfg.psi.scale;
  return s;
}

RunOutcome run(const RunConfig& cfg) {
  RunOutcome out;
  std::string summary;
  std::optional<Artifacts> art;
  try {
    art.emplace(cfg.output.dir, out);
    const DomainPtr d = build_domain(cfg.domain);
    const Scenario s = build_scenario(cfg, d);
    summary += "mode: " + to_string(cfg.solver.mode) + "\n";

    if (cfg.solver.mode == RunMode::VerifyOnly) {
      out.exit_code = run_verify(cfg, d, s, *art, summary);
    } else if (cfg.solver.mode == RunMode::HarnackBench) {
      out.exit_code = run_harnack(cfg, d, *art, summary);
    } else {
      Admissibility adm = assess(cfg, d, s);
      art->write_json("admissibility.report", admissibility_json(adm, s));
      const bool feasible = adm.report.verdicts.main_pass() && !adm.report.nonexistence_flag;
      summary += render_report(adm.report);
      if (adm.report.nonexistence_flag) summary += "nonexistence evidence: " + adm.evidence.reason + "\n";
      const bool seeded = !cfg.solver.start_field.empty() && cfg.solver.mode == RunMode::Solve;
      if (!feasible && !seeded) {
        out.exit_code = kExitInfeasible;
      } else if (cfg.solver.mode == RunMode::AdmissibilityOnly) {
        out.exit_code = kExitOk;
      } else if (cfg.solver.mode == RunMode::Solve) {
        out.exit_code = run_solve(cfg, d, s, adm, *art, summary);
      } else {
        out.exit_code = run_low_regularity_mode(cfg, s, adm, *art, summary);
      }
    }
  } catch (const Error& e) {
    out.exit_code = kExitFailure;
    summary += std::string("error: ") + e.what() + "\n";
    if (art) {
      try {
        art->write_json("run.error", {{"kind", to_string(e.kind())}, {"message", e.what()}});
      } catch (const Error&) {
      }
    }
  }
  summary += "exit code: " + std::to_string(out.exit_code) + "\n";
  out.summary = summary;
  return out;
}

std::string render_report(const AdmissibilityReport& r) {
  std::ostringstream s;
  s << std::setprecision(10);
  auto row = [&](const char* sym, const char* name, double v) {
    s << "  " << std::left << std::setw(14) << sym << std::setw(16) << name;
    if (std::isnan(v)) {
      s << "unset\n";
    } else {
      s << v << "\n";
    }
  };
  s << "admissibility constants (N = " << r.dimension << ")\n";
  row("2*", "two_star", r.two_star);
  row("S", "S", r.S);
  row("b+", "b_plus", r.b_plus);
  row("b-", "b_minus", r.b_minus);
  row("t0", "t0", r.t0);
  row("Phi(t0)", "phi_t0", r.phi_t0);
  row("K", "K", r.K);
  row("Theta", "Theta", r.Theta);
  row("t1", "t1", r.t1);
  row("t2", "t2", r.t2);
  row("int A/psi^2*", "singular_mass", r.singular_mass);
  row("threshold", "psiK_threshold", r.psiK_threshold);
  row("K (Hebey)", "hebey_K", r.hebey_K);
  auto verdict = [&](const char* name, bool ok) {
    s << "  " << std::left << std::setw(30) << name << (ok ? "pass" : "fail") << "\n";
  };
  verdict("B_plus_condition", r.verdicts.B_plus_condition);
  verdict("psiK", r.verdicts.psiK);
  verdict("ThetaK", r.verdicts.ThetaK);
  verdict("ThetaK_alt", r.verdicts.ThetaK_alt);
  s << "  " << std::left << std::setw(30) << "nonexistence_flag" << (r.nonexistence_flag ? "set" : "clear")
    << "\n";
  return s.str();
}

AdmissibilityReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("admissibility report: ") + e.what());
  }
  AdmissibilityReport r;
  r.S = get_num(j, "S");
  r.b_plus = get_num(j, "b_plus");
  r.b_minus = get_num(j, "b_minus");
  r.two_star = get_num(j, "two_star");
  r.t0 = get_num(j, "t0");
  r.phi_t0 = get_num(j, "phi_t0");
  r.K = get_num(j, "K");
  r.Theta = get_num(j, "Theta");
  r.t1 = get_num(j, "t1");
  r.t2 = get_num(j, "t2");
  r.singular_mass = get_num(j, "singular_mass");
  r.hebey_K = get_num(j, "hebey_K");
  r.nonexistence_flag = j.value("nonexistence_flag", false);
  if (j.contains("verdicts")) {
    const json& v = j["verdicts"];
    r.verdicts.B_plus_condition = v.value("B_plus_condition", false);
    r.verdicts.psiK = v.value("psiK", false);
    r.verdicts.ThetaK = v.value("ThetaK", false);
    r.verdicts.ThetaK_alt = v.value("ThetaK_alt", false);
  }
  if (j.contains("supporting")) {
    const json& sup = j["supporting"];
    r.dimension = sup.value("dimension", 3);
    r.psiK_threshold = get_num(sup, "psiK_threshold");
  }
  return r;
}

}  // namespace lichmp
