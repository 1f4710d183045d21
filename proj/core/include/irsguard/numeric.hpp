#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace irsguard {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Dense Hermitian matrix. The stored matrix is always exactly Hermitian:
// construction replaces the input by (A + A^H) / 2.
class Hermitian {
 public:
  Hermitian() = default;
  explicit Hermitian(Eigen::Index n);
  explicit Hermitian(const ComplexMatrix& a);

  static Hermitian zero(Eigen::Index n);
  static Hermitian identity(Eigen::Index n);
  static Hermitian outer(const ComplexVector& a);

  // Like the converting constructor but throws ConfigError when the input is
  // not Hermitian within Tolerances::hermitian_rel.
  static Hermitian checked(const ComplexMatrix& a);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  operator const ComplexMatrix&() const { return m_; }
  cd operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  double trace() const { return m_.diagonal().real().sum(); }
  double frobenius() const { return m_.norm(); }

  Hermitian operator+(const Hermitian& o) const;
  Hermitian operator-(const Hermitian& o) const;
  Hermitian operator*(double s) const;
  Hermitian& operator+=(const Hermitian& o);
  Hermitian& operator-=(const Hermitian& o);

 private:
  ComplexMatrix m_;
};

// Re Tr(A B) for Hermitian A, B.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenDecomposition {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

EigenDecomposition eig_hermitian(const ComplexMatrix& a);

double min_eigenvalue(const ComplexMatrix& a);
double max_eigenvalue(const ComplexMatrix& a);

// Returns a with A ~ a a^H. Throws RankError when lambda_2 > tol * lambda_1.
// The returned vector has its largest-magnitude entry real and nonnegative.
ComplexVector rank_one_factor(const ComplexMatrix& a, double tol);

struct SvdDecomposition {
  ComplexMatrix u;
  RealVector singular_values;  // descending
  ComplexMatrix v;
};

SvdDecomposition svd_general(const ComplexMatrix& a);

struct NuclearSpectral {
  double nuclear;
  double spectral;
};

NuclearSpectral nuclear_and_spectral_norm(const ComplexMatrix& a);

// Rotates x so that its largest-magnitude entry is real and nonnegative.
ComplexVector normalize_phase(const ComplexVector& x);

// Real symmetric 2n x 2n embedding [Re -Im; Im Re] of a complex matrix.
RealMatrix realify(const ComplexMatrix& a);

// log det of a Hermitian positive definite matrix; throws NumericError when
// the Cholesky factorization fails.
double log_det_hpd(const ComplexMatrix& a);

}  // namespace irsguard
