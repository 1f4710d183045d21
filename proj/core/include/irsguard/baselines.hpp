#pragma once

#include <string>
#include <vector>

#include "irsguard/ao.hpp"
#include "irsguard/channel.hpp"
#include "irsguard/config.hpp"
#include "irsguard/solution.hpp"

namespace irsguard {

// MRT beamforming with isotropic AN at a random IRS phase vector; only the
// per-user powers, the AN power and the S-procedure slacks are optimized.
struct Baseline1Solution {
  std::vector<double> rho_power;          // per-user powers
  double p_an = 0.0;                      // total AN power
  std::vector<ComplexVector> directions;  // unit MRT directions
  ComplexVector v;
  std::vector<std::vector<double>> slack;
  bool infeasible = false;  // no positive power allocation was found
  int passes = 0;
  std::string message;

  Solution to_solution() const;
};

Baseline1Solution solve_baseline1(const Instance& inst, const ComplexVector& v, const conic::SolverOptions& options,
                                  int max_passes = 20, double eps_conv = 1e-3);

// Direct AP links when no IRS is deployed: user channels are NLoS, the
// eavesdropper channels LoS.
struct Baseline2Channels {
  std::vector<ComplexVector> h;      // N_t vectors; user k receives h_k^H x
  std::vector<ComplexMatrix> H_bar;  // N_r x N_t
};

Baseline2Channels build_direct_channels(const SystemConfig& config, const Geometry& geometry, std::uint64_t seed);

// Equivalent channel set with G = I, v = 1 and the direct links in place of
// the cascaded ones. eps_j = kappa_j ||H_j||_F.
ChannelSet direct_channel_set(const SystemConfig& config, const Baseline2Channels& direct);

struct Baseline2Result {
  Solution solution;  // v = ones(N_t)
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string message;
};

// Beamforming stage only, iterated to convergence on a direct-link instance.
Baseline2Result solve_baseline2(const Instance& direct, const AoOptions& options);

// Copy of the instance with every uncertainty radius set to zero: the
// non-robust design treats the estimated channels as exact.
Instance nominal_instance(const Instance& inst);

}  // namespace irsguard
