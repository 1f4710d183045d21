#pragma once

#include <string>
#include <vector>

#include "irsguard/channel.hpp"
#include "irsguard/conic.hpp"
#include "irsguard/solution.hpp"

namespace irsguard {

// L_k = diag(h_k^H) G so that h_k^H Phi G x = v^T L_k x.
ComplexMatrix cascade_matrix(const ChannelSet& ch, int k);

struct D2Result {
  double value = 0.0;     // D2 + (1/2 rho) ||V||_2
  double d2 = 0.0;        // D2 alone
  double spectral = 0.0;  // ||V||_2
  double eigen_gap = 0.0; // lambda_1 - lambda_2 of V
  Hermitian grad;
};

// D2 = -sum_k log2(Tr(L_k (Z + sum_{i != k} W_i) L_k^H V^T) + sigma2) plus the
// spectral penalty, with gradient in the dD = Re Tr(grad dV) convention.
D2Result d2tilde_value_and_gradient(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z,
                                    const ChannelSet& ch, double rho);

// N2 = -sum_k log2(Tr(L_k (Z + sum_i W_i) L_k^H V^T) + sigma2).
double n2_value(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch);

// Lifted sum-rate sum_k R^_k(V).
double lifted_sum_rate(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z,
                       const ChannelSet& ch);

// -lifted sum-rate + (1/2 rho)(||V||_* - ||V||_2)
double penalized_objective(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z,
                           const ChannelSet& ch, double rho);

struct PhaseProblem {
  conic::ConicProblem problem;
  conic::HermitianLayout V;         // unit diagonal fixed
  std::vector<std::vector<int>> p;  // -1 when eps_j = 0

  RealVector embed(const ComplexMatrix& V, const std::vector<std::vector<double>>& p) const;
};

PhaseProblem build_phase_subproblem(const Instance& inst, const std::vector<Hermitian>& W, const Hermitian& Z,
                                    const ComplexMatrix& V_ref, double rho);

struct PhaseExtraction {
  ComplexVector v;
  double gap = 0.0;           // ||V||_* - ||V||_2
  double spectral = 0.0;      // ||V||_2
  double modulus_error = 0.0; // max |1 - |v_m|| before projection
};

// Leading eigenvector scaled by sqrt(lambda_1), each entry projected to unit
// modulus, first entry rotated real positive. Throws RankGapError when the
// rank gap exceeds rank_tol * ||V||_2, unless `check` is false.
PhaseExtraction extract_phases_detail(const ComplexMatrix& V, double rank_tol, bool check = true);
ComplexVector extract_phases(const ComplexMatrix& V, double rank_tol = 1e-4);

struct PhaseIterate {
  Hermitian V;
  ComplexVector v;
  std::vector<std::vector<double>> p;
  double gap = 0.0;
  double spectral = 0.0;
  double modulus_error = 0.0;
  bool rank_ok = false;
  double surrogate = 0.0;
  double surrogate_ref = 0.0;
  double penalized = 0.0;      // true penalized objective at V
  double penalized_ref = 0.0;
  double sum_rate = 0.0;       // at the extracted v
  double sum_rate_ref = 0.0;
  conic::SolveStatus status = conic::SolveStatus::numerical;
  bool accepted = false;
  int solver_iterations = 0;
  std::string message;
};

PhaseIterate solve_phase_step(const Instance& inst, const std::vector<Hermitian>& W, const Hermitian& Z,
                              const ComplexVector& v_ref, double rho, double rank_tol,
                              const conic::SolverOptions& options);

}  // namespace irsguard
