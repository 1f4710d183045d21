#pragma once

#include <vector>

#include "irsguard/channel.hpp"
#include "irsguard/conic.hpp"
#include "irsguard/random.hpp"
#include "irsguard/solution.hpp"

namespace irsguard {

// Blocks are assembled in the balanced form D B D with D = blkdiag(I_Nr, eps I_M),
// where B is the literal block P + S Phi G X G^H Phi^H S^H with S = [H_bar; I]
// and P = blkdiag((sigma2 gamma - p) I, p eps^-2 I). D is invertible for
// eps > 0, so both forms have the same PSD set; the balanced form keeps the
// two diagonal blocks on comparable scales. For eps = 0 the block reduces to
// the N_r x N_r nominal constraint and carries no slack.

// 2^tau - 1
double leakage_gamma(double tau);

// Literal block for eps_j > 0.
ComplexMatrix c4bar_block_literal(const ChannelSet& ch, const ComplexVector& v, const ComplexMatrix& Wk,
                                  const ComplexMatrix& Z, double p, double tau, int j);

// Balanced block (or nominal block when eps_j = 0); p is ignored then.
ComplexMatrix c4bar_block(const ChannelSet& ch, const ComplexVector& v, const ComplexMatrix& Wk,
                          const ComplexMatrix& Z, double p, double tau, int j);

// Balanced stacked channel [H_bar; eps I] (or H_bar when eps = 0).
ComplexMatrix stacked_channel(const ChannelSet& ch, int j);

// Whether the (k, j) constraint carries a slack variable.
bool has_slack(const ChannelSet& ch, int j);

// Adds p * blkdiag(-I_nr, I_rest) to f.
void add_slack_term(conic::PsdConstraint& f, int nr, int p_var);

// PSD constraint affine in (W_k, Z, p_kj) for the beamforming stage.
conic::PsdConstraint assemble_c4bar_beamforming(const ChannelSet& ch, const ComplexVector& v, int k, int j,
                                                double tau, const conic::HermitianLayout& wk,
                                                const conic::HermitianLayout& z, int p_var);

// SVD factors of R_k = G (gamma Z - W_k) G^H, R_k = sum_i p_i q_i^H.
struct RkOperator {
  std::vector<ComplexVector> p;
  std::vector<ComplexVector> q;
  RealVector singular_values;
  int m = 0;

  ComplexMatrix reconstruct() const;
};

RkOperator make_rk_operator(const ComplexMatrix& G, const ComplexMatrix& Wk, const ComplexMatrix& Z, double tau);

// Balanced phase-form block evaluated at V through the SVD factors:
// D (P + sum_i S diag(p_i) V diag(q_i^*) S^H) D.
ComplexMatrix c4bar_phase_block(const ChannelSet& ch, const RkOperator& rk, const ComplexMatrix& V, double p,
                                double tau, int j);

// PSD constraint affine in (V, p_kj). `v_layout` must describe V with a fixed
// unit diagonal.
conic::PsdConstraint assemble_c4bar_phase(const ChannelSet& ch, const RkOperator& rk, int k, int j, double tau,
                                          const conic::HermitianLayout& v_layout, int p_var);

// Verdict of the LMI side of the S-procedure.
bool sprocedure_certificate_check(const ComplexMatrix& block_value, double p, double tol);

// Best achievable minimum eigenvalue over the slack p >= 0 for the block
// F0 + p D, where D = blkdiag(-I_nr, I_rest). The function is concave in p and
// is maximized by golden-section search.
struct SlackCertificate {
  double p = 0.0;
  double min_eig = 0.0;
};
SlackCertificate optimal_slack(const ComplexMatrix& f0, int nr);

// Certified margin of the robust leakage LMI for (k, j) at a given solution.
SlackCertificate certify_c4bar(const ChannelSet& ch, const Solution& sol, int k, int j, double tau);

// Sampled check of the equivalence between the leakage bound and the matrix
// inequality (2^tau - 1) Q_j - H Phi G W_k G^H Phi^H H^H >= 0.
struct Prop1Report {
  int samples = 0;
  double max_leakage = 0.0;      // bits/s/Hz
  double min_eigenvalue = 0.0;   // of the matrix inequality
  int leakage_violations = 0;    // samples with C > tau + leak_tol
  int matrix_violations = 0;     // samples with min-eig < -eig_tol
  int disagreements = 0;         // samples where exactly one side is violated
  int worst_leakage_sample = -1;
  int worst_matrix_sample = -1;
  bool leakage_ok() const { return leakage_violations == 0; }
  bool matrix_ok() const { return matrix_violations == 0; }
  bool agree() const { return disagreements == 0; }
};

Prop1Report prop1_equivalence_check(const ChannelSet& ch, const Solution& sol, int k, int j, double tau,
                                    int n_samples, Rng& rng, double leak_tol = 1e-9, double eig_tol = 1e-9);

}  // namespace irsguard
