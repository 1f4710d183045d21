#pragma once

#include <vector>

#include "irsguard/channel.hpp"
#include "irsguard/config.hpp"
#include "irsguard/random.hpp"
#include "irsguard/solution.hpp"

namespace irsguard {

// f_k = G^H Phi^H h_k, so that user k sees f_k^H x.
ComplexVector effective_user_channel(const ChannelSet& ch, const ComplexVector& v, int k);

// (H_bar_j + dH) Phi G.
ComplexMatrix effective_eve_channel(const ChannelSet& ch, const ComplexVector& v, int j, const ComplexMatrix& dH);

double rate_user(const ChannelSet& ch, const Solution& sol, int k);
std::vector<double> user_rates(const ChannelSet& ch, const Solution& sol);
double sum_rate(const ChannelSet& ch, const Solution& sol);

// log2 det(I + Q^-1 E W_k E^H) with E = (H_bar_j + dH) Phi G.
double leakage_capacity(const ChannelSet& ch, const Solution& sol, int k, int j, const ComplexMatrix& dH);

// log2(1 + w^H E^H Q^-1 E w) for a beamforming vector w.
double leakage_quadratic(const ChannelSet& ch, const ComplexVector& w, const ComplexMatrix& Z,
                         const ComplexVector& v, int j, const ComplexMatrix& dH);

// Eavesdropper SINR 2^C - 1 (equal to w^H E^H Q^-1 E w for rank-one W_k).
double eve_sinr(const ChannelSet& ch, const Solution& sol, int k, int j, const ComplexMatrix& dH);

// sum_k [R_k - max_j C_jk]^+
double secrecy_rate(const std::vector<double>& rates, const std::vector<std::vector<double>>& leakages);

struct FeasibilityReport {
  bool power_ok = true;
  double power_margin = 0.0;  // P - used
  bool psd_ok = true;
  double min_psd_eigenvalue = 0.0;
  bool unit_modulus_ok = true;
  double max_modulus_error = 0.0;
  bool certified_ok = true;
  bool sampled_ok = true;
  std::vector<std::vector<double>> certified_min_eig;  // [k][j]
  std::vector<std::vector<double>> certified_slack;    // [k][j]
  std::vector<std::vector<double>> worst_leakage;      // [k][j], sampled
  double worst_leakage_excess = 0.0;                    // max_kj (worst - tau)

  bool leakage_ok() const { return certified_ok && sampled_ok; }
  bool ok() const { return power_ok && psd_ok && unit_modulus_ok && leakage_ok(); }
};

// Checks power, PSD, unit modulus and the leakage caps. Leakage is checked
// both by LMI certificate and by n_samples uncertainty draws per (k, j), 80%
// of them on the boundary sphere.
FeasibilityReport check_feasibility(const Instance& inst, const Solution& sol, int n_samples, Rng& rng);

// sum_rate / (P/mu + N_t P_t + P_o + P_I)
double energy_efficiency(double sum_rate, double power_watts, int nt, const PowerModel& model);

double an_power_fraction(const Solution& sol);

}  // namespace irsguard
