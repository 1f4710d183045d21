#pragma once

#include <optional>
#include <vector>

#include "irsguard/numeric.hpp"

namespace irsguard {

// Beamforming covariances W_k, artificial-noise covariance Z and IRS phase
// vector v (Phi = diag(v)). V optionally carries the lifted phase matrix.
struct Solution {
  std::vector<Hermitian> W;
  Hermitian Z;
  ComplexVector v;
  std::optional<Hermitian> V;

  double total_power() const;
  double an_power() const { return Z.trace(); }
};

Solution zero_solution(int users, int nt, int m);

}  // namespace irsguard
