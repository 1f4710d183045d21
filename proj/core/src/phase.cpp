#include "irsguard/phase.hpp"

#include <cmath>
#include <numbers>

#include "irsguard/errors.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"

namespace irsguard {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

Hermitian sum_except(const std::vector<Hermitian>& W, const Hermitian& Z, int skip) {
  ComplexMatrix x = Z.matrix();
  for (int i = 0; i < static_cast<int>(W.size()); ++i)
    if (i != skip) x += W[i].matrix();
  return Hermitian(x);
}

// C = (L X L^H)^T, so that Tr(L X L^H V^T) = Re Tr(C V).
ComplexMatrix lifted_coefficient(const ComplexMatrix& L, const ComplexMatrix& X) {
  const ComplexMatrix a = L * X * L.adjoint();
  return (0.5 * (a + a.adjoint())).transpose();
}

}  // namespace

ComplexMatrix cascade_matrix(const ChannelSet& ch, int k) { return ch.h[k].conjugate().asDiagonal() * ch.G; }

D2Result d2tilde_value_and_gradient(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z,
                                    const ChannelSet& ch, double rho) {
  const int K = ch.users(), m = ch.m();
  D2Result r;
  ComplexMatrix g = ComplexMatrix::Zero(m, m);
  for (int k = 0; k < K; ++k) {
    const ComplexMatrix c = lifted_coefficient(cascade_matrix(ch, k), sum_except(W, Z, k));
    const double den = trace_product(c, V) + ch.sigma2_l[k];
    r.d2 -= std::log2(den);
    g -= kInvLn2 * c / den;
  }
  const auto ed = eig_hermitian(V);
  const ComplexVector u = ed.vectors.col(m - 1);
  r.spectral = ed.values.cwiseAbs().maxCoeff();
  r.eigen_gap = m > 1 ? ed.values(m - 1) - ed.values(m - 2) : ed.values(0);
  r.value = r.d2 + r.spectral / (2.0 * rho);
  g += (u * u.adjoint()) / (2.0 * rho);
  r.grad = Hermitian(g);
  return r;
}

double n2_value(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z, const ChannelSet& ch) {
  const Hermitian all = sum_except(W, Z, -1);
  double s = 0.0;
  for (int k = 0; k < ch.users(); ++k) {
    const ComplexMatrix c = lifted_coefficient(cascade_matrix(ch, k), all);
    s -= std::log2(trace_product(c, V) + ch.sigma2_l[k]);
  }
  return s;
}

double lifted_sum_rate(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z,
                       const ChannelSet& ch) {
  return -(n2_value(V, W, Z, ch) - d2tilde_value_and_gradient(V, W, Z, ch, 1.0).d2);
}

double penalized_objective(const ComplexMatrix& V, const std::vector<Hermitian>& W, const Hermitian& Z,
                           const ChannelSet& ch, double rho) {
  const auto ns = nuclear_and_spectral_norm(V);
  return -lifted_sum_rate(V, W, Z, ch) + (ns.nuclear - ns.spectral) / (2.0 * rho);
}

RealVector PhaseProblem::embed(const ComplexMatrix& Vm, const std::vector<std::vector<double>>& pv) const {
  RealVector x = RealVector::Zero(problem.num_vars);
  V.embed(Vm, x);
  for (std::size_t k = 0; k < p.size(); ++k)
    for (std::size_t j = 0; j < p[k].size(); ++j)
      if (p[k][j] >= 0 && k < pv.size() && j < pv[k].size()) x(p[k][j]) = pv[k][j];
  return x;
}

PhaseProblem build_phase_subproblem(const Instance& inst, const std::vector<Hermitian>& W, const Hermitian& Z,
                                    const ComplexMatrix& V_ref, double rho) {
  const ChannelSet& ch = inst.channels;
  const int K = ch.users(), J = ch.eves(), m = ch.m();
  PhaseProblem pp;
  auto& prob = pp.problem;
  pp.V = conic::unit_diagonal_layout(m, prob.add_variables(m * (m - 1)));
  pp.p.assign(K, std::vector<int>(J, -1));
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j)
      if (has_slack(ch, j)) pp.p[k][j] = prob.add_variables(1);

  // (1/2 rho) Tr(V) is constant: the diagonal is fixed to one
  double c = static_cast<double>(m) / (2.0 * rho);
  const Hermitian all = sum_except(W, Z, -1);
  for (int k = 0; k < K; ++k) {
    const ComplexMatrix ck = lifted_coefficient(cascade_matrix(ch, k), all);
    conic::LogTerm lt;
    lt.weight = kInvLn2;
    lt.offset = ch.sigma2_l[k] + ck.diagonal().real().sum();
    pp.V.linear_functional(ck, 1.0, lt.row);
    prob.log_terms.push_back(std::move(lt));
  }
  const auto d2 = d2tilde_value_and_gradient(V_ref, W, Z, ch, rho);
  pp.V.linear_functional(d2.grad, -1.0, prob.objective);
  c += -d2.grad.matrix().diagonal().real().sum();
  c += -d2.value + trace_product(d2.grad, V_ref);
  prob.objective_constant = c;

  // V >= 0
  {
    conic::PsdConstraint blk("V", m);
    blk.constant = ComplexMatrix::Identity(m, m);
    std::vector<int> cols;
    for (int i = 0; i < m; ++i) cols.push_back(blk.add_vector(ComplexMatrix::Identity(m, m).col(i)));
    pp.V.add_congruence(blk, cols, 1.0);
    prob.psd.push_back(std::move(blk));
  }
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j) {
      const double tau = inst.tau[k][j];
      const RkOperator rk = make_rk_operator(ch.G, W[k], Z, tau);
      prob.psd.push_back(assemble_c4bar_phase(ch, rk, k, j, tau, pp.V, pp.p[k][j]));
      if (pp.p[k][j] >= 0) prob.add_lower_bound(pp.p[k][j], 0.0, "p>=0");
    }
  return pp;
}

PhaseExtraction extract_phases_detail(const ComplexMatrix& V, double rank_tol, bool check) {
  const Eigen::Index m = V.rows();
  const auto ns = nuclear_and_spectral_norm(V);
  PhaseExtraction e;
  e.gap = ns.nuclear - ns.spectral;
  e.spectral = ns.spectral;
  if (check && e.gap > rank_tol * ns.spectral)
    throw RankGapError("extract_phases: rank gap " + std::to_string(e.gap) + " exceeds tolerance", e.gap,
                       ns.spectral);
  const auto ed = eig_hermitian(V);
  const ComplexVector lead = std::sqrt(std::max(ed.values(m - 1), 0.0)) * ed.vectors.col(m - 1);
  e.v.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a = std::abs(lead(i));
    e.modulus_error = std::max(e.modulus_error, std::abs(1.0 - a));
    e.v(i) = a > 0.0 ? lead(i) / a : cd(1.0, 0.0);
  }
  const cd rot = std::conj(e.v(0)) / std::abs(e.v(0));
  e.v *= rot;
  return e;
}

ComplexVector extract_phases(const ComplexMatrix& V, double rank_tol) { return extract_phases_detail(V, rank_tol).v; }

PhaseIterate solve_phase_step(const Instance& inst, const std::vector<Hermitian>& W, const Hermitian& Z,
                              const ComplexVector& v_ref, double rho, double rank_tol,
                              const conic::SolverOptions& options) {
  const ChannelSet& ch = inst.channels;
  PhaseIterate it;
  const ComplexMatrix V_ref = v_ref * v_ref.adjoint();
  it.V = Hermitian(V_ref);
  it.v = v_ref;
  it.p.assign(ch.users(), std::vector<double>(ch.eves(), 0.0));
  Solution ref{W, Z, v_ref, std::nullopt};
  it.sum_rate_ref = sum_rate(ch, ref);
  it.sum_rate = it.sum_rate_ref;
  it.penalized_ref = penalized_objective(V_ref, W, Z, ch, rho);
  it.surrogate_ref = it.penalized_ref;

  const PhaseProblem pp = build_phase_subproblem(inst, W, Z, V_ref, rho);
  conic::ConicSolution cs = conic::solve(pp.problem, options);
  if (cs.status != conic::SolveStatus::optimal) {
    conic::SolverOptions retry = options;
    retry.barrier_growth = std::max(2.0, options.barrier_growth / 4.0);
    retry.max_total_newton = options.max_total_newton * 2;
    cs = conic::solve(pp.problem, retry);
  }
  it.status = cs.status;
  it.solver_iterations = cs.iterations;
  if (cs.status != conic::SolveStatus::optimal) {
    it.message = std::string("phase solve: ") + conic::to_string(cs.status) + " " + cs.message;
    return it;
  }
  it.V = pp.V.extract(cs.x);
  for (int k = 0; k < ch.users(); ++k)
    for (int j = 0; j < ch.eves(); ++j)
      if (pp.p[k][j] >= 0) it.p[k][j] = cs.x(pp.p[k][j]);
  it.surrogate = cs.objective;
  it.penalized = penalized_objective(it.V, W, Z, ch, rho);
  const auto ex = extract_phases_detail(it.V, rank_tol, false);
  it.gap = ex.gap;
  it.spectral = ex.spectral;
  it.modulus_error = ex.modulus_error;
  it.rank_ok = ex.gap <= rank_tol * ex.spectral;
  it.v = ex.v;
  Solution s{W, Z, it.v, std::nullopt};
  it.sum_rate = sum_rate(ch, s);
  it.accepted = true;
  return it;
}

}  // namespace irsguard
