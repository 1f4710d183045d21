#pragma once

namespace irsguard {

// Every numerical threshold used by the library lives here so that tests and
// production code agree on a single set of values.
struct Tolerances {
  // Hermitian inputs are accepted when ||A - A^H||_F <= hermitian_rel * ||A||_F.
  static constexpr double hermitian_rel = 1e-12;
  // Reconstruction bound for eigen/SVD decompositions (relative Frobenius).
  static constexpr double decomposition_rel = 1e-10;
  // Default spectral-ratio threshold for accepting a matrix as rank one.
  static constexpr double rank_one_ratio = 1e-6;
  // Relative threshold for dropping singular triplets of R_k.
  static constexpr double svd_truncation = 1e-12;
  // Minimum eigenvalue accepted when certifying an LMI block.
  static constexpr double lmi_certificate = 1e-7;
  // Allowed sampled leakage excess over tau (bits/s/Hz).
  static constexpr double leakage_sample = 1e-3;
  // Relative slack on the power budget.
  static constexpr double power_rel = 1e-8;
  // Unit-modulus tolerance for phase vectors.
  static constexpr double unit_modulus = 1e-9;
  // Rank-gap threshold for extracting phases from the lifted matrix.
  static constexpr double phase_rank_gap = 1e-4;
  // Barrier-method duality-gap and feasibility targets.
  static constexpr double solver_gap = 1e-7;
  static constexpr double solver_feasibility = 1e-7;
  // Tolerated decrease of the true sum-rate across a single SCA step.
  static constexpr double step_monotonicity = 1e-6;
  // Sum-rate decrease that triggers the AO divergence guard.
  static constexpr double divergence_guard = 1e-4;
};

}  // namespace irsguard
