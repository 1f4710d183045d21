#include "irsguard/numeric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "irsguard/errors.hpp"
#include "irsguard/tolerances.hpp"

namespace irsguard {

Hermitian::Hermitian(Eigen::Index n) : m_(ComplexMatrix::Zero(n, n)) {}

Hermitian::Hermitian(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("Hermitian: matrix is not square");
  m_ = 0.5 * (a + a.adjoint());
}

Hermitian Hermitian::zero(Eigen::Index n) { return Hermitian(n); }

Hermitian Hermitian::identity(Eigen::Index n) {
  return Hermitian(ComplexMatrix::Identity(n, n));
}

Hermitian Hermitian::outer(const ComplexVector& a) { return Hermitian(a * a.adjoint()); }

Hermitian Hermitian::checked(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("Hermitian: matrix is not square");
  const double asym = (a - a.adjoint()).norm();
  if (asym > Tolerances::hermitian_rel * std::max(a.norm(), 1e-300)) {
    std::ostringstream os;
    os << "Hermitian: asymmetry " << asym << " exceeds tolerance";
    throw ConfigError(os.str());
  }
  return Hermitian(a);
}

Hermitian Hermitian::operator+(const Hermitian& o) const {
  Hermitian r(*this);
  r.m_ += o.m_;
  return r;
}

Hermitian Hermitian::operator-(const Hermitian& o) const {
  Hermitian r(*this);
  r.m_ -= o.m_;
  return r;
}

Hermitian Hermitian::operator*(double s) const {
  Hermitian r(*this);
  r.m_ *= s;
  return r;
}

Hermitian& Hermitian::operator+=(const Hermitian& o) {
  m_ += o.m_;
  return *this;
}

Hermitian& Hermitian::operator-=(const Hermitian& o) {
  m_ -= o.m_;
  return *this;
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr(AB) = sum_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum().real();
}

EigenDecomposition eig_hermitian(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  if (es.info() != Eigen::Success) throw NumericError("eig_hermitian: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("min_eigenvalue: no convergence");
  return es.eigenvalues()(0);
}

double max_eigenvalue(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("max_eigenvalue: no convergence");
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

ComplexVector normalize_phase(const ComplexVector& x) {
  if (x.size() == 0) return x;
  Eigen::Index idx = 0;
  x.cwiseAbs().maxCoeff(&idx);
  const double mag = std::abs(x(idx));
  if (mag == 0.0) return x;
  return x * (std::conj(x(idx)) / mag);
}

ComplexVector rank_one_factor(const ComplexMatrix& a, double tol) {
  const Eigen::Index n = a.rows();
  const auto ed = eig_hermitian(a);
  const double l1 = ed.values(n - 1);
  double rest = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) rest = std::max(rest, std::abs(ed.values(i)));
  const double scale = std::max(std::abs(l1), rest);
  if (scale <= 1e-300 || (l1 <= 0.0 && rest <= 1e-14 * std::max(a.norm(), 1e-300)))
    return ComplexVector::Zero(n);
  if (l1 <= 0.0 || rest > tol * l1) {
    const double ratio = l1 > 0.0 ? rest / l1 : std::numeric_limits<double>::infinity();
    std::ostringstream os;
    os << "rank_one_factor: lambda2/lambda1 = " << ratio << " exceeds " << tol;
    throw RankError(os.str(), ratio);
  }
  return normalize_phase(std::sqrt(l1) * ed.vectors.col(n - 1));
}

SvdDecomposition svd_general(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericError("svd_general: no convergence");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

NuclearSpectral nuclear_and_spectral_norm(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("nuclear_and_spectral_norm: no convergence");
  const RealVector mags = es.eigenvalues().cwiseAbs();
  return {mags.sum(), mags.size() ? mags.maxCoeff() : 0.0};
}

RealMatrix realify(const ComplexMatrix& a) {
  const Eigen::Index r = a.rows(), c = a.cols();
  RealMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = a.real();
  out.topRightCorner(r, c) = -a.imag();
  out.bottomLeftCorner(r, c) = a.imag();
  out.bottomRightCorner(r, c) = a.real();
  return out;
}

double log_det_hpd(const ComplexMatrix& a) {
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("log_det_hpd: matrix not positive definite");
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log(l(i, i).real());
  return 2.0 * s;
}

}  // namespace irsguard
