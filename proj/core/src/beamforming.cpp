#include "irsguard/beamforming.hpp"

#include <cmath>
#include <numbers>

#include "irsguard/errors.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"
#include "irsguard/tolerances.hpp"

namespace irsguard {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

double quad(const ComplexVector& f, const ComplexMatrix& x) { return (f.adjoint() * x * f)(0, 0).real(); }

std::vector<ComplexVector> effective_channels(const ChannelSet& ch, const ComplexVector& v) {
  std::vector<ComplexVector> f;
  for (int k = 0; k < ch.users(); ++k) f.push_back(effective_user_channel(ch, v, k));
  return f;
}

// Tr(M_k X) for every user: interference-plus-noise and total.
struct Denominators {
  std::vector<double> interference;
  std::vector<double> total;
};

Denominators denominators(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch,
                          const std::vector<ComplexVector>& f) {
  Denominators d;
  const int K = ch.users();
  for (int k = 0; k < K; ++k) {
    double in = quad(f[k], Z) + ch.sigma2_l[k];
    for (int i = 0; i < K; ++i)
      if (i != k) in += quad(f[k], W[i]);
    d.interference.push_back(in);
    d.total.push_back(in + quad(f[k], W[k]));
  }
  return d;
}

}  // namespace

D1Result d1_value_and_gradients(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch,
                                const ComplexVector& v) {
  const int K = ch.users();
  const int nt = ch.nt();
  const auto f = effective_channels(ch, v);
  const auto den = denominators(W, Z, ch, f);
  D1Result r;
  ComplexMatrix gz = ComplexMatrix::Zero(nt, nt);
  std::vector<ComplexMatrix> terms;
  for (int j = 0; j < K; ++j) {
    r.value -= std::log2(den.interference[j]);
    terms.push_back(-kInvLn2 * f[j] * f[j].adjoint() / den.interference[j]);
    gz += terms.back();
  }
  r.grad_Z = Hermitian(gz);
  for (int k = 0; k < K; ++k) r.grad_W.push_back(Hermitian(gz - terms[k]));
  return r;
}

double n1_value(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch, const ComplexVector& v) {
  const auto f = effective_channels(ch, v);
  const auto den = denominators(W, Z, ch, f);
  double s = 0.0;
  for (double t : den.total) s -= std::log2(t);
  return s;
}

double beamforming_surrogate(const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch,
                             const ComplexVector& v, const std::vector<Hermitian>& W_ref, const Hermitian& Z_ref) {
  const auto d1 = d1_value_and_gradients(W_ref, Z_ref, ch, v);
  double lin = trace_product(d1.grad_Z, Z.matrix() - Z_ref.matrix());
  for (std::size_t k = 0; k < W.size(); ++k) lin += trace_product(d1.grad_W[k], W[k].matrix() - W_ref[k].matrix());
  return n1_value(W, Z, ch, v) - d1.value - lin;
}

RealVector BeamformingProblem::embed(const std::vector<Hermitian>& Wv, const Hermitian& Zv,
                                     const std::vector<std::vector<double>>& pv) const {
  RealVector x = RealVector::Zero(problem.num_vars);
  for (std::size_t k = 0; k < W.size(); ++k) W[k].embed(Wv[k], x);
  Z.embed(Zv, x);
  for (std::size_t k = 0; k < p.size(); ++k)
    for (std::size_t j = 0; j < p[k].size(); ++j)
      if (p[k][j] >= 0 && k < pv.size() && j < pv[k].size()) x(p[k][j]) = pv[k][j];
  return x;
}

BeamformingProblem build_subproblem(const Instance& inst, const ComplexVector& v,
                                    const std::vector<Hermitian>& W_ref, const Hermitian& Z_ref) {
  const ChannelSet& ch = inst.channels;
  const int K = ch.users(), J = ch.eves(), nt = ch.nt();
  BeamformingProblem bp;
  auto& prob = bp.problem;
  for (int k = 0; k < K; ++k) bp.W.push_back(conic::embed_hermitian(nt, prob.add_variables(nt * nt)));
  bp.Z = conic::embed_hermitian(nt, prob.add_variables(nt * nt));
  bp.p.assign(K, std::vector<int>(J, -1));
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j)
      if (has_slack(ch, j)) bp.p[k][j] = prob.add_variables(1);

  // objective: N1 - D1(ref) - <grad, X - ref>
  const auto f = effective_channels(ch, v);
  const auto d1 = d1_value_and_gradients(W_ref, Z_ref, ch, v);
  for (int k = 0; k < K; ++k) {
    conic::LogTerm lt;
    lt.weight = kInvLn2;
    lt.offset = ch.sigma2_l[k];
    const ComplexMatrix mk = f[k] * f[k].adjoint();
    bp.Z.linear_functional(mk, 1.0, lt.row);
    for (int i = 0; i < K; ++i) bp.W[i].linear_functional(mk, 1.0, lt.row);
    prob.log_terms.push_back(std::move(lt));
  }
  bp.Z.linear_functional(d1.grad_Z, -1.0, prob.objective);
  double c = -d1.value + trace_product(d1.grad_Z, Z_ref);
  for (int k = 0; k < K; ++k) {
    bp.W[k].linear_functional(d1.grad_W[k], -1.0, prob.objective);
    c += trace_product(d1.grad_W[k], W_ref[k]);
  }
  prob.objective_constant = c;

  // total transmit power
  conic::LinearConstraint power;
  power.label = "power";
  const ComplexMatrix eye = ComplexMatrix::Identity(nt, nt);
  for (int k = 0; k < K; ++k) bp.W[k].linear_functional(eye, 1.0, power.row);
  bp.Z.linear_functional(eye, 1.0, power.row);
  power.rhs = inst.power;
  prob.inequalities.push_back(std::move(power));

  // W_k >= 0 and Z >= 0
  auto psd_block = [&](const conic::HermitianLayout& l, const std::string& name) {
    conic::PsdConstraint blk(name, nt);
    std::vector<int> cols;
    for (int i = 0; i < nt; ++i) cols.push_back(blk.add_vector(eye.col(i)));
    l.add_congruence(blk, cols, 1.0);
    prob.psd.push_back(std::move(blk));
  };
  for (int k = 0; k < K; ++k) psd_block(bp.W[k], "W[" + std::to_string(k) + "]");
  psd_block(bp.Z, "Z");

  // robust leakage constraints
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j) {
      prob.psd.push_back(assemble_c4bar_beamforming(ch, v, k, j, inst.tau[k][j], bp.W[k], bp.Z, bp.p[k][j]));
      if (bp.p[k][j] >= 0) prob.add_lower_bound(bp.p[k][j], 0.0, "p>=0");
    }
  return bp;
}

namespace {

std::vector<double> spectrum(const ComplexMatrix& a) {
  const RealVector ev = eig_hermitian(a).values;
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double rank_ratio(const ComplexMatrix& a) {
  const RealVector ev = eig_hermitian(a).values;
  const Eigen::Index n = ev.size();
  const double l1 = ev(n - 1);
  if (!(l1 > 0.0)) return 0.0;
  double rest = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) rest = std::max(rest, std::abs(ev(i)));
  return rest / l1;
}

}  // namespace

RecoveryResult recover_rank_one(const std::vector<Hermitian>& W_star, const Hermitian& Z_star,
                                const std::vector<std::vector<double>>& p_star, const Instance& inst,
                                const ComplexVector& v, const BeamformingProblem& problem) {
  const ChannelSet& ch = inst.channels;
  const int K = ch.users();
  RecoveryResult r;
  r.p = p_star;
  ComplexMatrix z = Z_star.matrix();
  for (int k = 0; k < K; ++k) {
    const double ratio = rank_ratio(W_star[k]);
    r.ratio_before.push_back(ratio);
    if (ratio > Tolerances::rank_one_ratio) r.raw_rank_one = false;
    const ComplexVector f = effective_user_channel(ch, v, k);
    const ComplexVector wf = W_star[k].matrix() * f;
    const double s = f.dot(wf).real();
    ComplexMatrix wt;
    if (s > 1e-300) {
      wt = wf * wf.adjoint() / s;
    } else {
      wt = ComplexMatrix::Zero(ch.nt(), ch.nt());
    }
    // the removed part is PSD and annihilates f, so user k cannot see it
    z += W_star[k].matrix() - wt;
    r.W.emplace_back(wt);
  }
  r.Z = Hermitian(z);

  ComplexMatrix before = Z_star.matrix(), after = r.Z.matrix();
  for (int k = 0; k < K; ++k) {
    before += W_star[k].matrix();
    after += r.W[k].matrix();
  }
  r.power_identity_error = (after - before).norm();
  for (int k = 0; k < K; ++k) r.ratio_after.push_back(rank_ratio(r.W[k]));

  r.objective_before = problem.problem.objective_value(problem.embed(W_star, Z_star, p_star));
  r.objective_after = problem.problem.objective_value(problem.embed(r.W, r.Z, r.p));

  // runtime checks
  std::string failure;
  const double scale = std::max(1.0, inst.power);
  if (r.power_identity_error > 1e-10 * scale) failure = "power identity violated";
  for (int k = 0; k < K && failure.empty(); ++k)
    if (r.ratio_after[k] > Tolerances::rank_one_ratio) failure = "recovered beamformer is not rank one";
  if (failure.empty() && min_eigenvalue(r.Z) < -1e-9 * scale) failure = "recovered AN covariance is not PSD";
  if (failure.empty() &&
      std::abs(r.objective_after - r.objective_before) > 1e-6 * std::max(1.0, std::abs(r.objective_before)))
    failure = "surrogate objective changed";
  if (failure.empty()) {
    Solution s{r.W, r.Z, v, std::nullopt};
    for (int k = 0; k < K && failure.empty(); ++k)
      for (int j = 0; j < ch.eves() && failure.empty(); ++j) {
        const double me =
            min_eigenvalue(c4bar_block(ch, v, r.W[k], r.Z, r.p[k][j], inst.tau[k][j], j));
        if (me < -1e-6) failure = "leakage LMI violated after recovery";
      }
  }
  if (!failure.empty()) {
    std::vector<std::vector<double>> spectra;
    for (const auto& w : W_star) spectra.push_back(spectrum(w));
    spectra.push_back(spectrum(Z_star));
    throw ConstructionError("recover_rank_one: " + failure, std::move(spectra));
  }
  return r;
}

BeamformingIterate solve_beamforming_step(const Instance& inst, const ComplexVector& v,
                                          const std::vector<Hermitian>& W_ref, const Hermitian& Z_ref,
                                          const conic::SolverOptions& options) {
  const ChannelSet& ch = inst.channels;
  BeamformingIterate it;
  it.W = W_ref;
  it.Z = Z_ref;
  it.p.assign(ch.users(), std::vector<double>(ch.eves(), 0.0));
  Solution ref{W_ref, Z_ref, v, std::nullopt};
  it.sum_rate_ref = sum_rate(ch, ref);
  it.sum_rate = it.sum_rate_ref;

  const BeamformingProblem bp = build_subproblem(inst, v, W_ref, Z_ref);
  it.surrogate_ref = -it.sum_rate_ref;
  conic::ConicSolution cs = conic::solve(bp.problem, options);
  if (cs.status != conic::SolveStatus::optimal) {
    // one retry with a more conservative barrier schedule
    conic::SolverOptions retry = options;
    retry.barrier_growth = std::max(2.0, options.barrier_growth / 4.0);
    retry.max_total_newton = options.max_total_newton * 2;
    cs = conic::solve(bp.problem, retry);
  }
  it.status = cs.status;
  it.solver_iterations = cs.iterations;
  if (cs.status != conic::SolveStatus::optimal) {
    it.message = std::string("beamforming solve: ") + conic::to_string(cs.status) + " " + cs.message;
    return it;
  }
  std::vector<Hermitian> Ws;
  for (const auto& l : bp.W) Ws.push_back(l.extract(cs.x));
  const Hermitian Zs = bp.Z.extract(cs.x);
  std::vector<std::vector<double>> ps(ch.users(), std::vector<double>(ch.eves(), 0.0));
  for (int k = 0; k < ch.users(); ++k)
    for (int j = 0; j < ch.eves(); ++j)
      if (bp.p[k][j] >= 0) ps[k][j] = cs.x(bp.p[k][j]);

  const RecoveryResult rec = recover_rank_one(Ws, Zs, ps, inst, v, bp);
  it.W = rec.W;
  it.Z = rec.Z;
  it.p = rec.p;
  it.raw_rank_one = rec.raw_rank_one;
  it.surrogate = rec.objective_after;
  Solution s{it.W, it.Z, v, std::nullopt};
  it.sum_rate = sum_rate(ch, s);
  it.accepted = true;
  return it;
}

Solution initial_point(const Instance& inst, const ComplexVector& v, double zeta) {
  const ChannelSet& ch = inst.channels;
  const int K = ch.users(), nt = ch.nt();
  Solution base;
  base.v = v;
  for (int k = 0; k < K; ++k) {
    ComplexVector f = effective_user_channel(ch, v, k);
    const double n = f.norm();
    if (n > 0.0) {
      f /= n;
    } else {
      f = ComplexVector::Zero(nt);
      f(0) = 1.0;
    }
    base.W.push_back(Hermitian::outer(f) * (zeta * inst.power / K));
  }
  base.Z = Hermitian::identity(nt) * ((1.0 - zeta) * inst.power / nt);

  auto scaled = [&](double s) {
    Solution x = base;
    for (auto& w : x.W) w = w * s;
    x.Z = x.Z * s;
    return x;
  };
  auto feasible = [&](const Solution& x) {
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < ch.eves(); ++j)
        if (certify_c4bar(ch, x, k, j, inst.tau[k][j]).min_eig < 0.0) return false;
    return true;
  };
  if (feasible(base)) return base;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(scaled(mid)))
      lo = mid;
    else
      hi = mid;
  }
  if (!(lo > 0.0)) {
    // tau = 0 against an eavesdropper that sees every direction: only the
    // all-zero point is feasible
    if (feasible(scaled(0.0))) return scaled(0.0);
    throw TrialInfeasible("initial_point: no feasible power scale");
  }
  // step back from the boundary so the point is strictly interior
  return scaled(0.9 * lo);
}

}  // namespace irsguard
