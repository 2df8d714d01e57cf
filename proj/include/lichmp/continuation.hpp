#pragma once

#include <lichmp/admissibility.hpp>
#include <lichmp/coefficients.hpp>
#include <lichmp/mountain_pass.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lichmp {

/// ε_k = eps0 · ratio^{-k}, k = 0..steps-1.
std::vector<double> geometric_schedule(double eps0, int steps, double ratio = 4.0);

struct ContinuationOptions {
  std::vector<double> schedule = geometric_schedule(1.0, 12);
  bool warm_start = true;
  MpSolveOptions mp;
  /// Local mode: Newton continuation from this field instead of path deformation.
  std::optional<Field> seed;
  double nehari_slack = 1e-6;
};

struct MpTraceRow {
  double eps = 0.0;
  int sweep = 0;
  double max_energy = 0.0;
  double peak_grad_norm = 0.0;
};

struct SolveTrace {
  std::vector<double> eps_schedule;
  std::vector<CriticalPoint> per_eps;
  std::vector<double> norms;
  std::vector<double> levels;
  std::vector<double> singular_masses;  // ∫_{supp A} A/(ε+u_ε²)^{2*/2}
  std::vector<double> min_values;
  std::vector<double> cauchy;           // ‖u_{ε_k} - u_{ε_{k-1}}‖, NaN for k = 0
  std::vector<int> sweeps;
  std::vector<std::string> warnings;
  std::vector<MpTraceRow> mp_trace;
  Field u0;
  std::optional<int> approx_index;

  double t1 = 0.0;
  double t2 = 0.0;
  double barrier = 0.0;        // Φ(t0)
  double level_bound = 0.0;    // Ψ(t2) + (1/(2* t1^{2*})) ∫A/|ψ|^{2*}
  double singular_bound = 0.0; // 2* · level_bound

  bool nehari_ok = true;
  bool barrier_ok = true;
  bool level_bound_ok = true;
  bool singular_bound_ok = true;
  bool complete = false;
  std::string failure;
  std::vector<std::string> notes;

  bool invariants_ok() const {
    return nehari_ok && barrier_ok && level_bound_ok && singular_bound_ok;
  }
};

/// Drives ε down the schedule, solving each step by mountain pass (or by seeded
/// Newton continuation) and recording the trace invariants. `psi` is normalized
/// internally; `rep` supplies t0, t1, Φ(t0) and the verdicts. When rep.t2 is
/// unset it is computed with find_t2 at the first ε. Throws Precondition when
/// the verdicts fail or the nonexistence flag is set.
SolveTrace run_continuation(const CoefficientSet& c, const Field& psi,
                            const AdmissibilityReport& rep, const ContinuationOptions& opt = {});

struct LowRegularityTrace {
  std::vector<SolveTrace> per_n;
  std::vector<double> norms_sq;  // ‖u_n‖² at the smallest ε
  double t2 = 0.0;
  double bound = 0.0;            // N times the closed-form right-hand side
  bool bound_ok = true;
  bool complete = false;
  std::string failure;
};

/// Outer loop over truncation indices n = 1..n_max with the shared t2; the
/// strict minus-part variant is used when b_- > 0.
LowRegularityTrace run_low_regularity(const CoefficientSet& c, const Field& psi,
                                      const AdmissibilityReport& rep, int n_max,
                                      const ContinuationOptions& opt = {},
                                      const ApproxOptions& approx = {});

/// N [½t2² + S b_- t2^{2*}/2* + (S b_+)^{N/2}/(2* Θ^{2*}) ∫A/|ψ|^{2*}].
double low_regularity_bound(const AdmissibilityReport& rep, double t2);

}  // namespace lichmp
