#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsguard/config.hpp"

namespace irsguard {

// Spec error carrying the 1-based line of the offending key (0 if unknown).
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

const std::vector<std::string>& scenario_ids();
const std::vector<std::string>& scheme_ids();
const std::vector<std::string>& sweep_variables();

struct ExperimentSpec {
  std::string scenario = "sumrate_vs_power";
  std::string sweep_variable = "power_dbm";
  std::vector<double> grid{10.0, 20.0, 30.0};
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> schemes{"proposed", "baseline1", "baseline2"};
  SystemConfig config;
  double power_dbm = 30.0;
  double noise_dbm = -90.0;
  double tau = 1.0;
  double kappa2 = 0.1;
  bool emit_trace = false;
  // outage only
  std::vector<double> target_sinr_db;
  int outage_draws = 4;  // true channel draws per (trial, eavesdropper)

  void validate() const;
  // Configuration at one sweep value.
  SystemConfig config_at(double sweep_value) const;
};

// Desk-scale defaults for a scenario. Throws SpecError for unknown ids.
ExperimentSpec default_spec(const std::string& scenario);

// Parses a JSON spec on top of the scenario defaults. Unknown keys, wrong
// types and invalid values raise SpecError with the line of the key.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

struct ResultRow {
  std::string scenario;
  std::string scheme;
  std::string sweep_variable;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::string status;  // ok, not_converged, zero_allocation, error
  double sum_rate = 0.0;
  double secrecy_rate = 0.0;
  std::vector<double> leakage;  // sampled worst-case leakage, row-major in (k, j)
  double max_leakage = 0.0;
  double leakage_excess = 0.0;    // max_kj (sampled worst - tau)
  double certified_margin = 0.0;  // min_kj LMI min-eigenvalue
  double an_fraction = 0.0;
  double energy_efficiency = 0.0;
  int iterations = 0;
  double rank_gap = 0.0;  // relative penalty gap of the last phase step
  double power_margin = 0.0;
  int feasible = 0;
  double wall_time = 0.0;
  std::string message;
};

struct TraceRow {
  std::string scenario;
  std::string scheme;
  double sweep_value = 0.0;
  int trial = 0;
  int iteration = 0;
  double sum_rate = 0.0;
  double rank_gap = 0.0;
  std::string bf_status;
  std::string phase_status;
};

struct OutageRow {
  std::string scenario;
  std::string scheme;
  double sweep_value = 0.0;
  double target_sinr_db = 0.0;
  int samples = 0;
  int outages = 0;
  double outage = 0.0;
};

struct SummaryRow {
  std::string scheme;
  double sweep_value = 0.0;
  std::string metric;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double stderr_mean = 0.0;
};

// Eavesdropper SINR of one (trial, j, draw), maximized over the users.
struct SinrSample {
  std::string scheme;
  double sweep_value = 0.0;
  int trial = 0;
  double sinr = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<TraceRow> trace;
  std::vector<SinrSample> sinr_samples;
  std::vector<OutageRow> outage;
  std::vector<SummaryRow> summary;
};

struct RunOptions {
  int workers = 1;
  bool timing = false;  // record wall time; off keeps output byte-stable
  // Called in deterministic row order as soon as a prefix of jobs is done.
  std::function<void(const ResultRow&)> on_row;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// Fraction of SINR samples above each target, per scheme and sweep value.
std::vector<OutageRow> outage_probability(const std::string& scenario, const std::vector<SinrSample>& samples,
                                          const std::vector<double>& target_sinr_db);

// Mean, sample std and standard error per (scheme, sweep value, metric) over
// rows with status other than "error". Values are taken at the precision
// written to CSV so the summary is recomputable from the file.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

const SummaryRow* find_summary(const std::vector<SummaryRow>& summary, const std::string& scheme,
                               double sweep_value, const std::string& metric);

// CSV and JSON writers. Floats use 9 significant digits except the summary
// statistics, which use 17.
std::string format_number(double x);
const std::vector<std::string>& result_header();
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_result_row_csv(std::ostream& os, const ResultRow& row);
void write_results_json(std::ostream& os, const std::vector<ResultRow>& rows);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
void write_outage_csv(std::ostream& os, const std::vector<OutageRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace irsguard
