#include <lichmp/cli.hpp>
#include <lichmp/error.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace lichmp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

double to_double(const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) parse_fail(e.line, "expected a number, got '" + e.value + "'");
  return v;
}

long long to_integer(const Entry& e) {
  long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) parse_fail(e.line, "expected an integer, got '" + e.value + "'");
  return v;
}

std::uint64_t to_u64(const Entry& e) {
  std::uint64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) parse_fail(e.line, "expected an unsigned integer, got '" + e.value + "'");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  parse_fail(e.line, "expected a boolean, got '" + e.value + "'");
}

std::vector<double> to_list(const Entry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double({trim(item), e.line}));
  return out;
}

using Setter = std::function<void(RunConfig&, const Entry&)>;
using Table = std::map<std::string, Setter>;

const std::map<std::string, Table>& schema() {
  static const std::map<std::string, Table> s = {
      {"domain",
       {
           {"kind", [](RunConfig& c, const Entry& e) {
              try {
                c.domain.kind = domain_kind_from_string(e.value);
              } catch (const Error&) {
                parse_fail(e.line, "unknown domain kind '" + e.value + "'");
              }
            }},
           {"dimension", [](RunConfig& c, const Entry& e) { c.domain.dimension = static_cast<int>(to_integer(e)); }},
           {"nodes", [](RunConfig& c, const Entry& e) {
              const long long n = to_integer(e);
              if (n < 0) parse_fail(e.line, "nodes must be nonnegative");
              c.domain.nodes = static_cast<std::size_t>(n);
            }},
           {"extent", [](RunConfig& c, const Entry& e) { c.domain.extent = to_double(e); }},
       }},
      {"coefficients",
       {
           {"family", [](RunConfig& c, const Entry& e) {
              if (e.value != "rn-exponential" && e.value != "local-bump" && e.value != "custom-table") {
                parse_fail(e.line, "unknown family '" + e.value + "'");
              }
              c.family = e.value;
            }},
           {"theta_a", [](RunConfig& c, const Entry& e) { c.rn.theta_A = to_double(e); }},
           {"decay", [](RunConfig& c, const Entry& e) { c.rn.decay = to_double(e); }},
           {"b_profile", [](RunConfig& c, const Entry& e) {
              if (e.value == "constant") {
                c.rn.b_profile = BProfile::Constant;
              } else if (e.value == "bump") {
                c.rn.b_profile = BProfile::Bump;
              } else {
                parse_fail(e.line, "b_profile must be constant or bump");
              }
            }},
           {"b_amplitude", [](RunConfig& c, const Entry& e) { c.rn.b_amplitude = to_double(e); }},
           {"b_center", [](RunConfig& c, const Entry& e) { c.rn.b_center = to_double(e); }},
           {"b_width", [](RunConfig& c, const Entry& e) { c.rn.b_width = to_double(e); }},
           {"v", [](RunConfig& c, const Entry& e) {
              c.rn.v_value = c.local.v_value = c.tables.V_default = to_double(e);
            }},
           {"spike_height", [](RunConfig& c, const Entry& e) { c.rn.spike_height = to_double(e); }},
           {"spike_center", [](RunConfig& c, const Entry& e) { c.rn.spike_center = to_double(e); }},
           {"spike_width", [](RunConfig& c, const Entry& e) { c.rn.spike_width = to_double(e); }},
           {"a_value", [](RunConfig& c, const Entry& e) { c.local.a_value = to_double(e); }},
           {"r1", [](RunConfig& c, const Entry& e) { c.local.r1 = to_double(e); }},
           {"r2", [](RunConfig& c, const Entry& e) { c.local.r2 = to_double(e); }},
           {"b_inner", [](RunConfig& c, const Entry& e) { c.local.b_inner = to_double(e); }},
           {"b_shell", [](RunConfig& c, const Entry& e) { c.local.b_shell = to_double(e); }},
           {"b_outer", [](RunConfig& c, const Entry& e) { c.local.b_outer = to_double(e); }},
           {"a_table", [](RunConfig& c, const Entry& e) { c.tables.A = e.value; }},
           {"b_table", [](RunConfig& c, const Entry& e) { c.tables.B = e.value; }},
           {"v_table", [](RunConfig& c, const Entry& e) { c.tables.V = e.value; }},
           {"a_default", [](RunConfig& c, const Entry& e) { c.tables.A_default = to_double(e); }},
           {"b_default", [](RunConfig& c, const Entry& e) { c.tables.B_default = to_double(e); }},
       }},
      {"psi",
       {
           {"power", [](RunConfig& c, const Entry& e) { c.psi.power = to_double(e); }},
           {"center", [](RunConfig& c, const Entry& e) { c.psi.center = to_double(e); }},
           {"plateau", [](RunConfig& c, const Entry& e) { c.psi.plateau = to_double(e); }},
           {"hole", [](RunConfig& c, const Entry& e) { c.psi.hole = to_double(e); }},
           {"table", [](RunConfig& c, const Entry& e) { c.psi.table = e.value; }},
           {"scale", [](RunConfig& c, const Entry& e) { c.psi.scale = to_double(e); }},
       }},
      {"solver",
       {
           {"mode", [](RunConfig& c, const Entry& e) {
              try {
                c.solver.mode = run_mode_from_string(e.value);
              } catch (const Error&) {
                parse_fail(e.line, "unknown mode '" + e.value + "'");
              }
            }},
           {"eps0", [](RunConfig& c, const Entry& e) { c.solver.eps0 = to_double(e); }},
           {"eps_steps", [](RunConfig& c, const Entry& e) { c.solver.eps_steps = static_cast<int>(to_integer(e)); }},
           {"eps_ratio", [](RunConfig& c, const Entry& e) { c.solver.eps_ratio = to_double(e); }},
           {"schedule", [](RunConfig& c, const Entry& e) { c.solver.schedule = to_list(e); }},
           {"path_nodes", [](RunConfig& c, const Entry& e) { c.solver.path_nodes = static_cast<int>(to_integer(e)); }},
           {"max_sweeps", [](RunConfig& c, const Entry& e) { c.solver.max_sweeps = static_cast<int>(to_integer(e)); }},
           {"grad_tol", [](RunConfig& c, const Entry& e) { c.solver.grad_tol = to_double(e); }},
           {"stagnation_tol", [](RunConfig& c, const Entry& e) { c.solver.stagnation_tol = to_double(e); }},
           {"refine_tol", [](RunConfig& c, const Entry& e) { c.solver.refine_tol = to_double(e); }},
           {"warm_start", [](RunConfig& c, const Entry& e) { c.solver.warm_start = to_bool(e); }},
           {"seed", [](RunConfig& c, const Entry& e) { c.solver.seed = to_u64(e); }},
           {"n_max", [](RunConfig& c, const Entry& e) { c.solver.n_max = static_cast<int>(to_integer(e)); }},
           {"unit_radius", [](RunConfig& c, const Entry& e) { c.solver.unit_radius = to_double(e); }},
           {"random_tests", [](RunConfig& c, const Entry& e) { c.solver.random_tests = static_cast<int>(to_integer(e)); }},
           {"harnack_q", [](RunConfig& c, const Entry& e) { c.solver.harnack_q = to_double(e); }},
           {"harnack_d", [](RunConfig& c, const Entry& e) { c.solver.harnack_d = to_double(e); }},
           {"harnack_radius", [](RunConfig& c, const Entry& e) { c.solver.harnack_radius = to_double(e); }},
           {"harnack_count", [](RunConfig& c, const Entry& e) { c.solver.harnack_count = static_cast<int>(to_integer(e)); }},
           {"start_field", [](RunConfig& c, const Entry& e) { c.solver.start_field = e.value; }},
           {"verify_field", [](RunConfig& c, const Entry& e) { c.solver.verify_field = e.value; }},
           {"verify_eps", [](RunConfig& c, const Entry& e) { c.solver.verify_eps = to_double(e); }},
       }},
      {"output",
       {
           {"dir", [](RunConfig& c, const Entry& e) { c.output.dir = e.value; }},
           {"dumps", [](RunConfig& c, const Entry& e) {
              if (e.value == "binary") {
                c.output.dumps = DumpFormat::Binary;
              } else if (e.value == "csv") {
                c.output.dumps = DumpFormat::Csv;
              } else if (e.value == "both") {
                c.output.dumps = DumpFormat::Both;
              } else if (e.value == "none") {
                c.output.dumps = DumpFormat::None;
              } else {
                parse_fail(e.line, "dumps must be binary, csv, both or none");
              }
            }},
           {"quiet", [](RunConfig& c, const Entry& e) { c.output.quiet = to_bool(e); }},
       }},
  };
  return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::Validation, msg); }

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::AdmissibilityOnly: return "admissibility-only";
    case RunMode::Solve: return "solve";
    case RunMode::LowRegularitySolve: return "low-regularity-solve";
    case RunMode::VerifyOnly: return "verify-only";
    case RunMode::HarnackBench: return "harnack-bench";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& name) {
  for (RunMode m : {RunMode::AdmissibilityOnly, RunMode::Solve, RunMode::LowRegularitySolve,
                    RunMode::VerifyOnly, RunMode::HarnackBench}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorKind::Parse, "unknown mode '" + name + "'");
}

std::vector<double> RunConfig::eps_schedule() const {
  if (!solver.schedule.empty()) return solver.schedule;
  return geometric_schedule(solver.eps0, solver.eps_steps, solver.eps_ratio);
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  const auto& tables = schema();
  std::map<std::string, std::map<std::string, int>> seen;
  const Table* section = nullptr;
  std::string section_name;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(line, "malformed section header");
      section_name = trim(s.substr(1, s.size() - 2));
      const auto it = tables.find(section_name);
      if (it == tables.end()) parse_fail(line, "unknown section [" + section_name + "]");
      section = &it->second;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key = value");
    if (!section) parse_fail(line, "key outside of any section");
    std::string key = trim(s.substr(0, eq));
    for (char& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const Entry entry{trim(s.substr(eq + 1)), line};
    const auto it = section->find(key);
    if (it == section->end()) parse_fail(line, "unknown key '" + key + "' in [" + section_name + "]");
    auto& prior = seen[section_name];
    if (prior.count(key)) {
      parse_fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(prior[key]) + ")");
    }
    prior[key] = line;
    it->second(cfg, entry);
  }
  if (!seen.count("domain")) throw Error(ErrorKind::Parse, "missing [domain] section");
  if (!seen.count("coefficients")) throw Error(ErrorKind::Parse, "missing [coefficients] section");

  cfg.tables.A = resolve(base_dir, cfg.tables.A);
  cfg.tables.B = resolve(base_dir, cfg.tables.B);
  cfg.tables.V = resolve(base_dir, cfg.tables.V);
  cfg.psi.table = resolve(base_dir, cfg.psi.table);
  cfg.solver.start_field = resolve(base_dir, cfg.solver.start_field);
  cfg.solver.verify_field = resolve(base_dir, cfg.solver.verify_field);

  // Family-specific psi defaults unless the file set them.
  const auto& psi_keys = seen["psi"];
  if (cfg.family == "local-bump") {
    if (!psi_keys.count("plateau")) cfg.psi.plateau = 0.5 * (cfg.local.r1 + cfg.local.r2);
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  if (cfg.domain.dimension < 3) invalid("dimension must be >= 3");
  if (cfg.domain.nodes < 2) invalid("nodes must be >= 2");
  if (!(cfg.domain.extent > 0.0)) invalid("extent must be positive");
  if (!(cfg.psi.scale > 0.0)) invalid("psi scale must be positive");
  const SolverSpec& s = cfg.solver;
  if (s.mode == RunMode::AdmissibilityOnly) return;
  if (s.schedule.empty()) {
    if (!(s.eps0 > 0.0)) invalid("eps0 must be positive");
    if (s.eps_steps < 1) invalid("eps_steps must be >= 1");
    if (!(s.eps_ratio > 1.0)) invalid("eps_ratio must exceed 1");
  } else {
    for (std::size_t k = 0; k < s.schedule.size(); ++k) {
      if (!(s.schedule[k] > 0.0)) invalid("schedule entries must be positive");
      if (k > 0 && !(s.schedule[k] < s.schedule[k - 1])) invalid("schedule must be strictly decreasing");
    }
  }
  if (s.path_nodes < 16) invalid("path_nodes must be >= 16");
  if (s.max_sweeps < 1) invalid("max_sweeps must be >= 1");
  if (!(s.grad_tol > 0.0) || !(s.stagnation_tol > 0.0) || !(s.refine_tol > 0.0)) {
    invalid("tolerances must be positive");
  }
  if (s.n_max < 1) invalid("n_max must be >= 1");
  if (!(s.unit_radius > 0.0)) invalid("unit_radius must be positive");
  if (s.random_tests < 0) invalid("random_tests must be >= 0");
  if (!(s.harnack_q > 0.0)) invalid("harnack_q must be positive");
  if (!(s.harnack_d > 0.0)) invalid("harnack_d must be positive");
  if (s.harnack_radius < 0.0) invalid("harnack_radius must be nonnegative");
  if (s.harnack_count < 1) invalid("harnack_count must be >= 1");
  if (s.verify_eps < 0.0) invalid("verify_eps must be nonnegative");
  if (s.mode == RunMode::VerifyOnly && s.verify_field.empty()) invalid("verify-only needs verify_field");
}

}  // namespace lichmp
