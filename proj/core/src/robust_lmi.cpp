#include "irsguard/robust_lmi.hpp"

#include <cmath>
#include <limits>

#include "irsguard/errors.hpp"
#include "irsguard/system_model.hpp"
#include "irsguard/tolerances.hpp"

namespace irsguard {

double leakage_gamma(double tau) { return std::exp2(tau) - 1.0; }

bool has_slack(const ChannelSet& ch, int j) { return ch.eps[j] > 0.0; }

ComplexMatrix stacked_channel(const ChannelSet& ch, int j) {
  const int nr = ch.nr(j);
  const int m = ch.m();
  if (!has_slack(ch, j)) return ch.H_bar[j];
  ComplexMatrix s(nr + m, m);
  s.topRows(nr) = ch.H_bar[j];
  s.bottomRows(m) = ch.eps[j] * ComplexMatrix::Identity(m, m);
  return s;
}

ComplexMatrix c4bar_block_literal(const ChannelSet& ch, const ComplexVector& v, const ComplexMatrix& Wk,
                                  const ComplexMatrix& Z, double p, double tau, int j) {
  const int nr = ch.nr(j);
  const int m = ch.m();
  const double eps = ch.eps[j];
  if (!(eps > 0.0)) throw ConfigError("c4bar_block_literal: requires eps > 0");
  const double gamma = leakage_gamma(tau);
  ComplexMatrix s(nr + m, m);
  s.topRows(nr) = ch.H_bar[j];
  s.bottomRows(m) = ComplexMatrix::Identity(m, m);
  const ComplexMatrix t = s * v.asDiagonal() * ch.G;
  ComplexMatrix b = t * (gamma * Z - Wk) * t.adjoint();
  b.topLeftCorner(nr, nr).diagonal().array() += ch.sigma2_e[j] * gamma - p;
  b.bottomRightCorner(m, m).diagonal().array() += p / (eps * eps);
  return 0.5 * (b + b.adjoint());
}

ComplexMatrix c4bar_block(const ChannelSet& ch, const ComplexVector& v, const ComplexMatrix& Wk,
                          const ComplexMatrix& Z, double p, double tau, int j) {
  const int nr = ch.nr(j);
  const double gamma = leakage_gamma(tau);
  const ComplexMatrix t = stacked_channel(ch, j) * v.asDiagonal() * ch.G;
  ComplexMatrix b = t * (gamma * Z - Wk) * t.adjoint();
  b.topLeftCorner(nr, nr).diagonal().array() += ch.sigma2_e[j] * gamma;
  if (has_slack(ch, j)) {
    b.topLeftCorner(nr, nr).diagonal().array() -= p;
    b.bottomRightCorner(b.rows() - nr, b.rows() - nr).diagonal().array() += p;
  }
  return 0.5 * (b + b.adjoint());
}

void add_slack_term(conic::PsdConstraint& f, int nr, int p_var) {
  const Eigen::Index dim = f.dim();
  conic::FactoredTerm t;
  t.var = p_var;
  for (Eigen::Index i = 0; i < dim; ++i) {
    ComplexVector e = ComplexVector::Zero(dim);
    e(i) = 1.0;
    const int u = f.add_vector(e);
    t.alpha.emplace_back(i < nr ? -1.0 : 1.0, 0.0);
    t.left.push_back(u);
    t.right.push_back(u);
  }
  f.terms.push_back(std::move(t));
}

conic::PsdConstraint assemble_c4bar_beamforming(const ChannelSet& ch, const ComplexVector& v, int k, int j,
                                                double tau, const conic::HermitianLayout& wk,
                                                const conic::HermitianLayout& z, int p_var) {
  const int nr = ch.nr(j);
  const double gamma = leakage_gamma(tau);
  const ComplexMatrix t = stacked_channel(ch, j) * v.asDiagonal() * ch.G;
  conic::PsdConstraint f("c4bar_bf[" + std::to_string(k) + "," + std::to_string(j) + "]", t.rows());
  f.constant.topLeftCorner(nr, nr).diagonal().array() += ch.sigma2_e[j] * gamma;
  std::vector<int> cols;
  for (Eigen::Index c = 0; c < t.cols(); ++c) cols.push_back(f.add_vector(t.col(c)));
  wk.add_congruence(f, cols, -1.0);
  z.add_congruence(f, cols, gamma);
  if (has_slack(ch, j)) {
    if (p_var < 0) throw ConfigError("assemble_c4bar_beamforming: slack variable required");
    add_slack_term(f, nr, p_var);
  }
  return f;
}

ComplexMatrix RkOperator::reconstruct() const {
  ComplexMatrix r = ComplexMatrix::Zero(m, m);
  for (std::size_t i = 0; i < p.size(); ++i) r += p[i] * q[i].adjoint();
  return r;
}

RkOperator make_rk_operator(const ComplexMatrix& G, const ComplexMatrix& Wk, const ComplexMatrix& Z, double tau) {
  const double gamma = leakage_gamma(tau);
  ComplexMatrix r = G * (gamma * Z - Wk) * G.adjoint();
  r = 0.5 * (r + r.adjoint());
  RkOperator op;
  op.m = static_cast<int>(r.rows());
  const auto svd = svd_general(r);
  op.singular_values = svd.singular_values;
  const double s1 = svd.singular_values.size() ? svd.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < svd.singular_values.size(); ++i) {
    const double s = svd.singular_values(i);
    if (!(s > Tolerances::svd_truncation * s1)) break;
    op.p.push_back(s * svd.u.col(i));
    op.q.push_back(svd.v.col(i));
  }
  return op;
}

ComplexMatrix c4bar_phase_block(const ChannelSet& ch, const RkOperator& rk, const ComplexMatrix& V, double p,
                                double tau, int j) {
  const int nr = ch.nr(j);
  const ComplexMatrix s = stacked_channel(ch, j);
  ComplexMatrix b = ComplexMatrix::Zero(s.rows(), s.rows());
  for (std::size_t i = 0; i < rk.p.size(); ++i)
    b += s * rk.p[i].asDiagonal() * V * rk.q[i].conjugate().asDiagonal() * s.adjoint();
  b.topLeftCorner(nr, nr).diagonal().array() += ch.sigma2_e[j] * leakage_gamma(tau);
  if (has_slack(ch, j)) {
    b.topLeftCorner(nr, nr).diagonal().array() -= p;
    b.bottomRightCorner(b.rows() - nr, b.rows() - nr).diagonal().array() += p;
  }
  return 0.5 * (b + b.adjoint());
}

conic::PsdConstraint assemble_c4bar_phase(const ChannelSet& ch, const RkOperator& rk, int k, int j, double tau,
                                          const conic::HermitianLayout& vl, int p_var) {
  if (!vl.unit_diagonal()) throw ConfigError("assemble_c4bar_phase: V layout must have a fixed unit diagonal");
  const int nr = ch.nr(j);
  const ComplexMatrix s = stacked_channel(ch, j);
  ComplexMatrix rt = rk.reconstruct();
  rt = 0.5 * (rt + rt.adjoint());
  conic::PsdConstraint f("c4bar_ph[" + std::to_string(k) + "," + std::to_string(j) + "]", s.rows());
  std::vector<int> cols;
  for (Eigen::Index c = 0; c < s.cols(); ++c) cols.push_back(f.add_vector(s.col(c)));
  // entries of V on the diagonal equal one
  for (Eigen::Index a = 0; a < s.cols(); ++a) f.constant += rt(a, a).real() * s.col(a) * s.col(a).adjoint();
  f.constant.topLeftCorner(nr, nr).diagonal().array() += ch.sigma2_e[j] * leakage_gamma(tau);
  f.constant = 0.5 * (f.constant + f.constant.adjoint());
  const cd iu(0.0, 1.0);
  for (const auto& b : vl.basis()) {
    const int a = b.row, c = b.col;
    conic::FactoredTerm t;
    t.var = b.var;
    if (b.kind == conic::HermitianLayout::Basis::real_part) {
      t.alpha = {rt(a, c), rt(c, a)};
    } else {
      t.alpha = {iu * rt(a, c), -iu * rt(c, a)};
    }
    t.left = {cols[a], cols[c]};
    t.right = {cols[c], cols[a]};
    if (std::abs(rt(a, c)) > 0.0) f.terms.push_back(std::move(t));
  }
  if (has_slack(ch, j)) {
    if (p_var < 0) throw ConfigError("assemble_c4bar_phase: slack variable required");
    add_slack_term(f, nr, p_var);
  }
  return f;
}

bool sprocedure_certificate_check(const ComplexMatrix& block_value, double p, double tol) {
  return p >= 0.0 && min_eigenvalue(0.5 * (block_value + block_value.adjoint())) >= -tol;
}

SlackCertificate optimal_slack(const ComplexMatrix& f0, int nr) {
  const Eigen::Index dim = f0.rows();
  auto value = [&](double p) {
    ComplexMatrix f = f0;
    f.topLeftCorner(nr, nr).diagonal().array() -= p;
    f.bottomRightCorner(dim - nr, dim - nr).diagonal().array() += p;
    return min_eigenvalue(f);
  };
  const double m0 = value(0.0);
  if (dim == nr) return {0.0, m0};
  const double tl_min = min_eigenvalue(f0.topLeftCorner(nr, nr));
  const double hi = std::max(0.0, tl_min - m0);
  if (hi <= 0.0) return {0.0, m0};
  // golden-section search for the maximum of a concave function on [0, hi]
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + hi); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = value(d);
    }
  }
  SlackCertificate best{0.0, m0};
  for (double p : {a, b, c, d, 0.5 * (a + b)}) {
    const double val = value(p);
    if (val > best.min_eig) best = {p, val};
  }
  return best;
}

SlackCertificate certify_c4bar(const ChannelSet& ch, const Solution& sol, int k, int j, double tau) {
  const ComplexMatrix f0 = c4bar_block(ch, sol.v, sol.W[k], sol.Z, 0.0, tau, j);
  if (!has_slack(ch, j)) return {0.0, min_eigenvalue(f0)};
  return optimal_slack(f0, ch.nr(j));
}

Prop1Report prop1_equivalence_check(const ChannelSet& ch, const Solution& sol, int k, int j, double tau,
                                    int n_samples, Rng& rng, double leak_tol, double eig_tol) {
  Prop1Report rep;
  rep.samples = n_samples;
  rep.max_leakage = -std::numeric_limits<double>::infinity();
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  const double gamma = leakage_gamma(tau);
  const int n_boundary = (n_samples * 4) / 5;
  for (int s = 0; s < n_samples; ++s) {
    const ComplexMatrix dh = sample_uncertainty(ch.H_bar[j], ch.eps[j], rng, s < n_boundary);
    const double c = leakage_capacity(ch, sol, k, j, dh);
    const ComplexMatrix e = effective_eve_channel(ch, sol.v, j, dh);
    ComplexMatrix mi = e * (gamma * sol.Z.matrix() - sol.W[k].matrix()) * e.adjoint();
    mi.diagonal().array() += ch.sigma2_e[j] * gamma;
    const double me = min_eigenvalue(0.5 * (mi + mi.adjoint()));
    if (c > rep.max_leakage) {
      rep.max_leakage = c;
      rep.worst_leakage_sample = s;
    }
    if (me < rep.min_eigenvalue) {
      rep.min_eigenvalue = me;
      rep.worst_matrix_sample = s;
    }
    const bool leak_bad = c > tau + leak_tol;
    const bool mat_bad = me < -eig_tol;
    rep.leakage_violations += leak_bad;
    rep.matrix_violations += mat_bad;
    const bool leak_good = c < tau - leak_tol;
    const bool mat_good = me > eig_tol;
    if ((leak_bad && mat_good) || (leak_good && mat_bad)) ++rep.disagreements;
  }
  return rep;
}

}  // namespace irsguard
