#pragma once

#include <string>
#include <vector>

#include "irsguard/channel.hpp"
#include "irsguard/config.hpp"
#include "irsguard/random.hpp"
#include "irsguard/solution.hpp"

namespace irsguard {

struct AoOptions {
  double rho = 5e-4;
  double eps_conv = 1e-3;
  int max_iter = 100;
  double signal_fraction = 0.5;
  double rank_tol = 1e-4;
  bool rho_decrease = false;  // halve rho after 5 steps with the rank gap stuck above rank_tol
  bool final_polish = true;   // finish with a beamforming step at the final phases
  conic::SolverOptions solver;

  static AoOptions from_config(const SystemConfig& c);
};

struct AoRecord {
  int iteration = 0;
  double sum_rate = 0.0;        // at the end of the iteration
  double sum_rate_after_bf = 0.0;
  double bf_surrogate = 0.0;
  double phase_surrogate = 0.0;
  double rank_gap = 0.0;
  double rank_gap_rel = 0.0;    // gap / ||V||_2
  double modulus_error = 0.0;
  double rho = 0.0;
  std::string bf_status;
  std::string phase_status;
  bool raw_rank_one = true;
  double wall_time = 0.0;
};

struct AoTrace {
  std::vector<AoRecord> records;  // records[0] is the initialization
  Solution solution;
  bool converged = false;
  bool aborted = false;
  bool diverged = false;
  int iterations = 0;
  double final_rank_gap_rel = 0.0;
  double final_modulus_error = 0.0;
  std::string message;
};

// Alternating optimization from a random phase vector drawn from rng.
AoTrace run_ao(const Instance& inst, const AoOptions& options, Rng& rng);

// Same, from a given phase vector.
AoTrace run_ao_from(const Instance& inst, const AoOptions& options, const ComplexVector& v0);

struct StationarityReport {
  double beamforming_improvement = 0.0;  // surrogate decrease of a fresh beamforming solve
  double phase_improvement = 0.0;        // penalized-surrogate decrease of a fresh phase solve
  bool stationary = false;               // both within threshold
  double threshold = 1e-5;
};

StationarityReport stationarity_report(const AoTrace& trace, const Instance& inst, const AoOptions& options,
                                       double threshold = 1e-5);

ComplexVector random_phases(int m, Rng& rng);

}  // namespace irsguard
