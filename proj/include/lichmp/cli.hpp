#pragma once

#include <lichmp/admissibility.hpp>
#include <lichmp/coefficients.hpp>
#include <lichmp/continuation.hpp>
#include <lichmp/domain.hpp>
#include <lichmp/verify.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lichmp {

enum class RunMode { AdmissibilityOnly, Solve, LowRegularitySolve, VerifyOnly, HarnackBench };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

enum class DumpFormat { Binary, Csv, Both, None };

struct PsiSpec {
  // rn-exponential: (1 + (r - center)²)^{-power}; local-bump: plateau profile;
  // custom-table: tabulated values.
  double power = 2.0;
  double center = 0.0;
  double plateau = 1.0;
  double hole = 0.0;
  std::filesystem::path table;
  double scale = 1.0;
};

struct CustomTables {
  std::filesystem::path A;
  std::filesystem::path B;
  std::filesystem::path V;
  double A_default = 0.0;
  double B_default = 0.0;
  double V_default = 1.0;
};

struct SolverSpec {
  RunMode mode = RunMode::Solve;
  double eps0 = 1.0;
  int eps_steps = 12;
  double eps_ratio = 4.0;
  std::vector<double> schedule;  // explicit schedule; overrides eps0/steps/ratio
  int path_nodes = 33;
  int max_sweeps = 4000;
  double grad_tol = 1e-8;
  double stagnation_tol = 1e-12;
  double refine_tol = 1e-8;
  bool warm_start = true;
  std::uint64_t seed = 0;
  int n_max = 8;
  double unit_radius = 1.0;
  int random_tests = 50;
  double harnack_q = 0.5;
  double harnack_d = 1.0;
  double harnack_radius = 0.0;  // 0 selects the geometry default
  int harnack_count = 16;
  std::filesystem::path start_field;   // seeded Newton continuation from this dump
  std::filesystem::path verify_field;  // verify-only input
  double verify_eps = 0.0;
};

struct OutputSpec {
  std::filesystem::path dir = "out";
  DumpFormat dumps = DumpFormat::Binary;
  bool quiet = false;
};

struct RunConfig {
  DomainSpec domain;
  std::string family = "rn-exponential";
  RnExponentialParams rn;
  LocalBumpParams local;
  CustomTables tables;
  PsiSpec psi;
  SolverSpec solver;
  OutputSpec output;
  std::filesystem::path base_dir;  // directory relative table paths resolve against

  std::vector<double> eps_schedule() const;
};

/// INI-style text with sections [domain], [coefficients], [psi], [solver] and
/// [output]. Unknown sections or keys raise Parse with the line number;
/// values violating invariants raise Validation.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);
void validate(const RunConfig& cfg);

/// Coefficients and ψ described by the configuration.
Scenario build_scenario(const RunConfig& cfg, const DomainPtr& d);

// Field dumps: "LCHF", u32 version, u64 domain hash, u64 count, then count
// little-endian doubles. The CSV variant holds node-index,value rows.
void write_field_binary(const std::filesystem::path& path, const Field& u);
Field read_field_binary(const std::filesystem::path& path, const DomainPtr& d);
void write_field_csv(const std::filesystem::path& path, const Field& u);
Field read_field_csv(const std::filesystem::path& path, const DomainPtr& d);
/// Dispatches on the extension (.csv or binary).
Field read_field(const std::filesystem::path& path, const DomainPtr& d);

struct RunOutcome {
  int exit_code = 1;
  std::string summary;
  std::vector<std::filesystem::path> artifacts;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInfeasible = 2;

/// Runs the configured mode and writes its artifacts under cfg.output.dir.
/// Errors are mapped to exit codes and recorded in run.error; artifacts
/// produced before a failure are kept.
RunOutcome run(const RunConfig& cfg);

/// Human-readable table of the admissibility constants.
std::string render_report(const AdmissibilityReport& rep);
AdmissibilityReport report_from_json(const std::string& text);

}  // namespace lichmp
