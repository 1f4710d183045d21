#include "irsguard/system_model.hpp"

#include <algorithm>
#include <cmath>

#include "irsguard/errors.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/tolerances.hpp"

namespace irsguard {

double Solution::total_power() const {
  double p = Z.dim() ? Z.trace() : 0.0;
  for (const auto& w : W) p += w.trace();
  return p;
}

Solution zero_solution(int users, int nt, int m) {
  Solution s;
  s.W.assign(users, Hermitian::zero(nt));
  s.Z = Hermitian::zero(nt);
  s.v = ComplexVector::Ones(m);
  return s;
}

ComplexVector effective_user_channel(const ChannelSet& ch, const ComplexVector& v, int k) {
  if (v.size() != ch.m()) throw ConfigError("effective_user_channel: phase vector size mismatch");
  return ch.G.adjoint() * v.conjugate().cwiseProduct(ch.h[k]);
}

ComplexMatrix effective_eve_channel(const ChannelSet& ch, const ComplexVector& v, int j, const ComplexMatrix& dH) {
  if (v.size() != ch.m()) throw ConfigError("effective_eve_channel: phase vector size mismatch");
  return (ch.H_bar[j] + dH) * v.asDiagonal() * ch.G;
}

namespace {

double quad(const ComplexVector& f, const ComplexMatrix& x) { return (f.adjoint() * x * f)(0, 0).real(); }

void check_dims(const ChannelSet& ch, const Solution& sol) {
  if (static_cast<int>(sol.W.size()) != ch.users()) throw ConfigError("solution has wrong number of users");
  for (const auto& w : sol.W)
    if (w.dim() != ch.nt()) throw ConfigError("beamformer dimension mismatch");
  if (sol.Z.dim() != ch.nt()) throw ConfigError("AN covariance dimension mismatch");
}

}  // namespace

double rate_user(const ChannelSet& ch, const Solution& sol, int k) {
  check_dims(ch, sol);
  const ComplexVector f = effective_user_channel(ch, sol.v, k);
  const double sig = std::max(0.0, quad(f, sol.W[k]));
  double den = std::max(0.0, quad(f, sol.Z)) + ch.sigma2_l[k];
  for (int i = 0; i < ch.users(); ++i)
    if (i != k) den += std::max(0.0, quad(f, sol.W[i]));
  return std::log2(1.0 + sig / den);
}

std::vector<double> user_rates(const ChannelSet& ch, const Solution& sol) {
  std::vector<double> r;
  for (int k = 0; k < ch.users(); ++k) r.push_back(rate_user(ch, sol, k));
  return r;
}

double sum_rate(const ChannelSet& ch, const Solution& sol) {
  double s = 0.0;
  for (double r : user_rates(ch, sol)) s += r;
  return s;
}

double leakage_capacity(const ChannelSet& ch, const Solution& sol, int k, int j, const ComplexMatrix& dH) {
  check_dims(ch, sol);
  const ComplexMatrix e = effective_eve_channel(ch, sol.v, j, dH);
  ComplexMatrix q = e * sol.Z.matrix() * e.adjoint();
  q.diagonal().array() += ch.sigma2_e[j];
  Eigen::LLT<ComplexMatrix> llt(0.5 * (q + q.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericError("leakage_capacity: Q is not positive definite");
  const ComplexMatrix le = llt.matrixL().solve(e);
  ComplexMatrix a = le * sol.W[k].matrix() * le.adjoint();
  a = 0.5 * (a + a.adjoint());
  const RealVector ev = eig_hermitian(a).values;
  double c = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) c += std::log1p(std::max(ev(i), 0.0));
  return c / std::log(2.0);
}

double leakage_quadratic(const ChannelSet& ch, const ComplexVector& w, const ComplexMatrix& Z,
                         const ComplexVector& v, int j, const ComplexMatrix& dH) {
  const ComplexMatrix e = effective_eve_channel(ch, v, j, dH);
  ComplexMatrix q = e * Z * e.adjoint();
  q.diagonal().array() += ch.sigma2_e[j];
  const ComplexVector ew = e * w;
  Eigen::LLT<ComplexMatrix> llt(0.5 * (q + q.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericError("leakage_quadratic: Q is not positive definite");
  const double s = ew.dot(llt.solve(ew)).real();
  return std::log2(1.0 + std::max(s, 0.0));
}

double eve_sinr(const ChannelSet& ch, const Solution& sol, int k, int j, const ComplexMatrix& dH) {
  return std::exp2(leakage_capacity(ch, sol, k, j, dH)) - 1.0;
}

double secrecy_rate(const std::vector<double>& rates, const std::vector<std::vector<double>>& leakages) {
  double s = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    double worst = 0.0;
    if (k < leakages.size())
      for (double c : leakages[k]) worst = std::max(worst, c);
    s += std::max(0.0, rates[k] - worst);
  }
  return s;
}

FeasibilityReport check_feasibility(const Instance& inst, const Solution& sol, int n_samples, Rng& rng) {
  const ChannelSet& ch = inst.channels;
  FeasibilityReport rep;
  const double used = sol.total_power();
  rep.power_margin = inst.power - used;
  rep.power_ok = used <= inst.power * (1.0 + Tolerances::power_rel);

  double min_eig = min_eigenvalue(sol.Z);
  double scale = std::max(1.0, inst.power);
  for (const auto& w : sol.W) min_eig = std::min(min_eig, min_eigenvalue(w));
  rep.min_psd_eigenvalue = min_eig;
  rep.psd_ok = min_eig >= -1e-9 * scale;

  double merr = 0.0;
  for (Eigen::Index i = 0; i < sol.v.size(); ++i) merr = std::max(merr, std::abs(std::abs(sol.v(i)) - 1.0));
  rep.max_modulus_error = merr;
  rep.unit_modulus_ok = merr <= Tolerances::unit_modulus;

  const int K = ch.users(), J = ch.eves();
  rep.certified_min_eig.assign(K, std::vector<double>(J, 0.0));
  rep.certified_slack.assign(K, std::vector<double>(J, 0.0));
  rep.worst_leakage.assign(K, std::vector<double>(J, 0.0));
  rep.worst_leakage_excess = -std::numeric_limits<double>::infinity();
  const int n_boundary = (n_samples * 4) / 5;
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < J; ++j) {
      const double tau = inst.tau[k][j];
      const auto cert = certify_c4bar(ch, sol, k, j, tau);
      rep.certified_min_eig[k][j] = cert.min_eig;
      rep.certified_slack[k][j] = cert.p;
      if (cert.min_eig < -Tolerances::lmi_certificate) rep.certified_ok = false;
      double worst = leakage_capacity(ch, sol, k, j, ComplexMatrix::Zero(ch.nr(j), ch.m()));
      for (int s = 0; s < n_samples; ++s) {
        const ComplexMatrix dh = sample_uncertainty(ch.H_bar[j], ch.eps[j], rng, s < n_boundary);
        worst = std::max(worst, leakage_capacity(ch, sol, k, j, dh));
      }
      rep.worst_leakage[k][j] = worst;
      rep.worst_leakage_excess = std::max(rep.worst_leakage_excess, worst - tau);
      if (worst > tau + Tolerances::leakage_sample) rep.sampled_ok = false;
    }
  }
  if (K * J == 0) rep.worst_leakage_excess = 0.0;
  return rep;
}

double energy_efficiency(double sum_rate, double power_watts, int nt, const PowerModel& model) {
  const double total = power_watts / model.amplifier_efficiency + nt * model.per_antenna_watts +
                       model.static_watts + model.irs_watts;
  return sum_rate / total;
}

double an_power_fraction(const Solution& sol) {
  const double total = sol.total_power();
  return total > 0.0 ? sol.Z.trace() / total : 0.0;
}

}  // namespace irsguard
