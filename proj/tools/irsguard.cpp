#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "irsguard/errors.hpp"
#include "irsguard/experiment.hpp"
#include "irsguard/selftest.hpp"

namespace fs = std::filesystem;
using namespace irsguard;

namespace {

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out = ".";
  int workers = 1;
  std::string format = "csv";
  bool timing = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "Master seed (overrides the spec)");
  cmd->add_option("--trials", f.trials, "Trials per sweep point (overrides the spec)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--format", f.format, "Result format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--timing", f.timing, "Record per-row wall time (output is then not byte-stable)");
}

int execute(ExperimentSpec spec, const RunFlags& f) {
  if (f.seed) spec.seed = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  spec.validate();
  fs::create_directories(f.out);
  const fs::path dir(f.out);

  RunOptions opt;
  opt.workers = f.workers;
  opt.timing = f.timing;
  std::ofstream csv;
  if (f.format == "csv") {
    csv.open(dir / "results.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
    const auto& h = result_header();
    for (std::size_t i = 0; i < h.size(); ++i) csv << (i ? "," : "") << h[i];
    csv << '\n';
    opt.on_row = [&](const ResultRow& r) {
      write_result_row_csv(csv, r);
      csv.flush();
    };
  }
  const ExperimentResult res = run_experiment(spec, opt);
  if (f.format == "json") {
    std::ofstream js(dir / "results.json", std::ios::binary);
    write_results_json(js, res.rows);
  }
  {
    std::ofstream s(dir / "summary.csv", std::ios::binary);
    write_summary_csv(s, res.summary);
  }
  if (!res.trace.empty()) {
    std::ofstream s(dir / "trace.csv", std::ios::binary);
    write_trace_csv(s, res.trace);
  }
  if (!res.outage.empty()) {
    std::ofstream s(dir / "outage.csv", std::ios::binary);
    write_outage_csv(s, res.outage);
  }
  int errors = 0;
  for (const auto& r : res.rows) errors += r.status == "error";
  std::cerr << res.rows.size() << " rows written to " << dir.string() << " (" << errors << " errors)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust secure IRS-assisted beamforming: solver and Monte-Carlo harness"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string run_spec;
  auto* run = app.add_subcommand("run", "Run an experiment spec");
  run->add_option("spec", run_spec, "JSON spec file")->required();
  add_run_flags(run, run_flags);

  std::string validate_spec;
  auto* validate = app.add_subcommand("validate", "Check a spec file without running it");
  validate->add_option("spec", validate_spec, "JSON spec file")->required();

  RunFlags demo_flags;
  std::string demo_scenario;
  auto* demo = app.add_subcommand("demo", "Run a scenario with its default settings");
  demo->add_option("scenario", demo_scenario, "Scenario id")->required()->check(CLI::IsMember(scenario_ids()));
  add_run_flags(demo, demo_flags);

  std::uint64_t selftest_seed = 1;
  int selftest_scale = 1;
  auto* selftest = app.add_subcommand("selftest", "Run the property suites");
  selftest->add_option("--seed", selftest_seed, "Seed");
  selftest->add_option("--scale", selftest_scale, "Multiplier on suite sizes")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return execute(load_spec(run_spec), run_flags);
    if (*validate) {
      const ExperimentSpec s = load_spec(validate_spec);
      std::cout << "ok: scenario " << s.scenario << ", " << s.grid.size() << " sweep points x " << s.trials
                << " trials, " << s.schemes.size() << " schemes\n";
      return 0;
    }
    if (*demo) {
      ExperimentSpec s = default_spec(demo_scenario);
      if (!demo_flags.trials) s.trials = 2;
      return execute(s, demo_flags);
    }
    if (*selftest) {
      const auto results = run_selftest(selftest_seed, selftest_scale);
      print_selftest(std::cout, results);
      for (const auto& r : results)
        if (!r.ok()) return 1;
      return 0;
    }
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
