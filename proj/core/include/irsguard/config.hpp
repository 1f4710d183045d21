#pragma once

#include <cstdint>
#include <vector>

#include "irsguard/conic.hpp"

namespace irsguard {

// Large-scale and small-scale fading parameters of one link class.
struct RiceanParams {
  double L0 = 0.0;  // reference path gain, linear
  double alpha_los = 2.0;
  double alpha_nlos = 4.0;
  double beta_los = 5.0;   // Ricean factor, linear
  double beta_nlos = 0.0;
};

// Static circuit power model for energy efficiency.
struct PowerModel {
  double amplifier_efficiency = 0.32;  // mu
  double per_antenna_watts = 35e-3;    // P_t
  double static_watts = 34e-3;         // P_o
  double irs_watts = 20e-3;            // P_I
};

struct SystemConfig {
  // dimensions
  int nt = 4;
  int nr = 2;
  int users = 2;
  int eves = 1;
  std::vector<int> irs_sizes{4};  // M_l per IRS; L = irs_sizes.size()

  // powers and noise
  double power_watts = 1.0;
  double noise_watts = 1e-12;  // both users and eavesdroppers

  // leakage caps tau[k][j] (bits/s/Hz) and normalized CSI error kappa[j]
  std::vector<std::vector<double>> tau;
  std::vector<double> kappa;

  // geometry (meters)
  double cell_radius = 200.0;
  std::vector<double> irs_distances{60.0};
  double min_distance = 1.0;

  // propagation
  double carrier_hz = 2.4e9;
  // Extra reference gain applied on IRS-to-receiver hops, in dB. 0 dB means
  // the reference path gain enters once per cascaded path.
  double irs_hop_reference_db = 0.0;
  RiceanParams fading;

  // algorithm
  double rho = 5e-4;
  double eps_conv = 1e-3;
  int max_iter = 100;
  double init_signal_fraction = 0.5;  // zeta
  double rank_tol = 1e-4;
  bool rho_decrease = false;
  int restarts = 1;
  conic::SolverOptions solver;

  // verification
  int leakage_samples = 1000;

  PowerModel power_model;

  std::uint64_t seed = 1;

  int irs_count() const { return static_cast<int>(irs_sizes.size()); }
  int elements() const;

  void set_tau(double value);
  void set_kappa2(double value);

  // Throws ConfigError on inconsistent values; fills defaults for tau/kappa
  // when they are empty.
  void validate() const;
  SystemConfig normalized() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

// (lambda / 4 pi)^2 for a carrier frequency in Hz.
double reference_path_gain(double carrier_hz);

// Baseline parameters at the desk-scale dimensions (N_t = M = 4, K = 2,
// J = 1, N_r = 2).
SystemConfig default_config();

}  // namespace irsguard
