#include <lichmp/cli.hpp>
#include <lichmp/error.hpp>
#include <lichmp/mountain_pass.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace {

namespace fs = std::filesystem;
using lichmp::RunConfig;
using lichmp::RunMode;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps0;
  std::optional<int> eps_steps;
  bool quiet = false;
};

RunConfig load(const std::string& path, const Overrides& o, std::optional<RunMode> mode) {
  RunConfig cfg = lichmp::parse_config(path);
  if (mode) cfg.solver.mode = *mode;
  if (!o.out.empty()) cfg.output.dir = o.out;
  if (o.seed) cfg.solver.seed = *o.seed;
  if (o.eps0) {
    cfg.solver.eps0 = *o.eps0;
    cfg.solver.schedule.clear();
  }
  if (o.eps_steps) {
    cfg.solver.eps_steps = *o.eps_steps;
    cfg.solver.schedule.clear();
  }
  if (o.quiet) cfg.output.quiet = true;
  lichmp::validate(cfg);
  return cfg;
}

int execute(const RunConfig& cfg) {
  const lichmp::RunOutcome r = lichmp::run(cfg);
  if (!cfg.output.quiet) std::cout << r.summary;
  return r.exit_code;
}

int combine(int a, int b) {
  if (a == lichmp::kExitFailure || b == lichmp::kExitFailure) return lichmp::kExitFailure;
  if (a == lichmp::kExitInfeasible || b == lichmp::kExitInfeasible) return lichmp::kExitInfeasible;
  return lichmp::kExitOk;
}

int batch(const std::vector<std::string>& configs, const Overrides& o) {
  const fs::path root = o.out.empty() ? fs::path("out") : fs::path(o.out);
  std::vector<int> codes(configs.size(), lichmp::kExitFailure);
  std::vector<std::string> logs(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      std::ostringstream log;
      try {
        Overrides per = o;
        per.out = (root / fs::path(configs[k]).stem()).string();
        RunConfig cfg = load(configs[k], per, std::nullopt);
        const lichmp::RunOutcome r = lichmp::run(cfg);
        codes[k] = r.exit_code;
        log << r.summary;
      } catch (const lichmp::Error& e) {
        log << "error: " << e.what() << "\n";
      }
      logs[k] = log.str();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(configs.size(), static_cast<std::size_t>(std::max(1, lichmp::thread_count())));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int code = lichmp::kExitOk;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (!o.quiet) std::cout << "== " << configs[k] << " (exit " << codes[k] << ")\n" << logs[k];
    code = combine(code, codes[k]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mountain-pass solver for singular critical Lichnerowicz-type equations"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "Run configuration file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed for randomized probes");
    sub->add_option("--eps0", o.eps0, "First regularization parameter");
    sub->add_option("--eps-steps", o.eps_steps, "Number of epsilon steps");
    sub->add_flag("--quiet", o.quiet, "Suppress the summary");
  };

  auto* adm = app.add_subcommand("admissibility", "Evaluate the admissibility conditions only");
  add_common(adm, true);
  auto* solve = app.add_subcommand("solve", "Admissibility, continuation and verification");
  add_common(solve, true);
  auto* verify = app.add_subcommand("verify", "Verify a dumped field");
  add_common(verify, true);
  std::string field;
  verify->add_option("--field", field, "Field dump to verify (overrides the config)");
  auto* harnack = app.add_subcommand("harnack", "Harnack ratios over a generated supersolution family");
  add_common(harnack, true);
  auto* bat = app.add_subcommand("batch", "Run several configurations concurrently");
  add_common(bat, false);
  std::vector<std::string> configs;
  bat->add_option("configs", configs, "Configuration files")->required()->check(CLI::ExistingFile);
  auto* rep = app.add_subcommand("report", "Render admissibility constants");
  add_common(rep, false);
  std::string report_file;
  rep->add_option("report", report_file, "An admissibility.report file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*adm) return execute(load(o.config, o, RunMode::AdmissibilityOnly));
    if (*solve) {
      RunConfig cfg = load(o.config, o, std::nullopt);
      if (cfg.solver.mode != RunMode::LowRegularitySolve) cfg.solver.mode = RunMode::Solve;
      return execute(cfg);
    }
    if (*verify) {
      RunConfig cfg = lichmp::parse_config(o.config);
      if (!field.empty()) cfg.solver.verify_field = field;
      cfg.solver.mode = RunMode::VerifyOnly;
      if (!o.out.empty()) cfg.output.dir = o.out;
      if (o.seed) cfg.solver.seed = *o.seed;
      cfg.output.quiet = cfg.output.quiet || o.quiet;
      lichmp::validate(cfg);
      return execute(cfg);
    }
    if (*harnack) return execute(load(o.config, o, RunMode::HarnackBench));
    if (*bat) return batch(configs, o);
    if (*rep) {
      std::string text;
      if (!report_file.empty()) {
        std::ifstream in(report_file);
        std::stringstream ss;
        ss << in.rdbuf();
        text = lichmp::render_report(lichmp::report_from_json(ss.str()));
      } else if (!o.config.empty()) {
        RunConfig cfg = load(o.config, o, RunMode::AdmissibilityOnly);
        const lichmp::RunOutcome r = lichmp::run(cfg);
        std::ifstream in(cfg.output.dir / "admissibility.report");
        if (!in) {
          std::cerr << r.summary;
          return r.exit_code;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = lichmp::render_report(lichmp::report_from_json(ss.str()));
      } else {
        std::cerr << "report needs a report file or --config\n";
        return lichmp::kExitFailure;
      }
      std::cout << text;
      return lichmp::kExitOk;
    }
  } catch (const lichmp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lichmp::kExitFailure;
  }
  return lichmp::kExitFailure;
}
