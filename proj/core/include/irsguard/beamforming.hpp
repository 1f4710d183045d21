#pragma once

#include <vector>

#include "irsguard/channel.hpp"
#include "irsguard/conic.hpp"
#include "irsguard/solution.hpp"

namespace irsguard {

struct D1Result {
  double value = 0.0;
  Hermitian grad_Z;
  std::vector<Hermitian> grad_W;
};

// D1 = -sum_k log2(Tr(Z M_k) + sigma2 + sum_{i != k} Tr(W_i M_k)) and its
// Hermitian gradients (dD1 = Re Tr(grad dX)).
D1Result d1_value_and_gradients(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch,
                                const ComplexVector& v);

// N1 = -sum_k log2(Tr(Z M_k) + sigma2 + sum_i Tr(W_i M_k)).
double n1_value(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch, const ComplexVector& v);

// The SCA surrogate N1 - D1(ref) - <grad, X - ref>; equals -sum-rate at ref.
double beamforming_surrogate(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch,
                             const ComplexVector& v, const std::vector<Hermitian>& W_ref, const Hermitian& Z_ref);

struct BeamformingProblem {
  conic::ConicProblem problem;
  std::vector<conic::HermitianLayout> W;
  conic::HermitianLayout Z;
  std::vector<std::vector<int>> p;  // slack index per (k, j); -1 when eps_j = 0

  RealVector embed(const std::vector<Hermitian>& W, const Hermitian& Z,
                   const std::vector<std::vector<double>>& p) const;
};

// Convex subproblem at fixed Phi = diag(v): minimize the surrogate over the
// power budget, W_k >= 0, Z >= 0 and the robust leakage LMIs.
BeamformingProblem build_subproblem(const Instance& inst, const ComplexVector& v,
                                    const std::vector<Hermitian>& W_ref, const Hermitian& Z_ref);

struct RecoveryResult {
  std::vector<Hermitian> W;
  Hermitian Z;
  std::vector<std::vector<double>> p;
  std::vector<double> ratio_before;  // lambda2 / lambda1 of the solver output
  std::vector<double> ratio_after;
  bool raw_rank_one = true;  // every W_k* already met the rank-one threshold
  double objective_before = 0.0;
  double objective_after = 0.0;
  double power_identity_error = 0.0;  // ||Z~ + sum W~ - Z* - sum W*||_F
};

// Rank-one restoration: W~_k = W f f^H W / (f^H W f) with f the effective
// channel of user k; the removed PSD part is moved into Z. Throws
// ConstructionError when a runtime check fails.
RecoveryResult recover_rank_one(const std::vector<Hermitian>& W_star, const Hermitian& Z_star,
                                const std::vector<std::vector<double>>& p_star, const Instance& inst,
                                const ComplexVector& v, const BeamformingProblem& problem);

struct BeamformingIterate {
  std::vector<Hermitian> W;
  Hermitian Z;
  std::vector<std::vector<double>> p;
  double surrogate = 0.0;        // optimal value of the subproblem
  double surrogate_ref = 0.0;    // surrogate evaluated at the reference
  double sum_rate = 0.0;         // true sum-rate at the new iterate
  double sum_rate_ref = 0.0;
  conic::SolveStatus status = conic::SolveStatus::numerical;
  bool accepted = false;
  bool raw_rank_one = true;
  int solver_iterations = 0;
  std::string message;
};

BeamformingIterate solve_beamforming_step(const Instance& inst, const ComplexVector& v,
                                          const std::vector<Hermitian>& W_ref, const Hermitian& Z_ref,
                                          const conic::SolverOptions& options);

// MRT/isotropic-AN starting point scaled down until every leakage LMI is
// certified, then backed off by 10%. Throws TrialInfeasible when no positive
// scale works.
Solution initial_point(const Instance& inst, const ComplexVector& v, double signal_fraction);

}  // namespace irsguard
