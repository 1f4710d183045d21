#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace irsguard {

// Invalid scenario or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An eigen/SVD routine failed to converge, or a matrix that must be
// positive definite was not.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// rank_one_factor was handed a matrix whose second eigenvalue is too large.
class RankError : public std::runtime_error {
 public:
  RankError(const std::string& what, double ratio)
      : std::runtime_error(what), ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

// The lifted phase matrix is not numerically rank one.
class RankGapError : public std::runtime_error {
 public:
  RankGapError(const std::string& what, double gap, double spectral)
      : std::runtime_error(what), gap_(gap), spectral_(spectral) {}
  double gap() const noexcept { return gap_; }
  double spectral() const noexcept { return spectral_; }

 private:
  double gap_;
  double spectral_;
};

// Rank-one recovery of the beamformers failed one of its runtime checks.
// The eigenvalue spectra of the solver output are attached for inspection.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, std::vector<std::vector<double>> spectra)
      : std::runtime_error(what), spectra_(std::move(spectra)) {}
  const std::vector<std::vector<double>>& spectra() const noexcept { return spectra_; }

 private:
  std::vector<std::vector<double>> spectra_;
};

// No feasible starting point exists for a Monte-Carlo trial.
class TrialInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irsguard
