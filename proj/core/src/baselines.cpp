#include "irsguard/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irsguard/beamforming.hpp"
#include "irsguard/errors.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"

namespace irsguard {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

enum Stream : std::uint64_t {
  kStreamDirectUser = 11,
  kStreamDirectEve = 12,
};

struct ScalarModel {
  // c[k][i] = |f_k^H u_i|^2, g[k] = ||f_k||^2 / N_t
  std::vector<std::vector<double>> c;
  std::vector<double> g;
};

ScalarModel scalar_model(const ChannelSet& ch, const std::vector<ComplexVector>& f,
                         const std::vector<ComplexVector>& u) {
  const int K = ch.users();
  ScalarModel m;
  m.c.assign(K, std::vector<double>(K, 0.0));
  m.g.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    m.g[k] = f[k].squaredNorm() / ch.nt();
    for (int i = 0; i < K; ++i) m.c[k][i] = std::norm(f[k].dot(u[i]));
  }
  return m;
}

double scalar_sum_rate(const ChannelSet& ch, const ScalarModel& m, const std::vector<double>& rho, double a) {
  double r = 0.0;
  for (int k = 0; k < ch.users(); ++k) {
    double interf = ch.sigma2_l[k] + a * m.g[k];
    for (int i = 0; i < ch.users(); ++i)
      if (i != k) interf += rho[i] * m.c[k][i];
    r += std::log2(1.0 + rho[k] * m.c[k][k] / interf);
  }
  return r;
}

}  // namespace

Solution Baseline1Solution::to_solution() const {
  const int K = static_cast<int>(rho_power.size());
  const int nt = directions.empty() ? 0 : static_cast<int>(directions[0].size());
  Solution s = zero_solution(K, nt, static_cast<int>(v.size()));
  s.v = v;
  for (int k = 0; k < K; ++k) s.W[k] = Hermitian::outer(directions[k]) * rho_power[k];
  if (nt > 0) s.Z = Hermitian::identity(nt) * (p_an / nt);
  return s;
}

Baseline1Solution solve_baseline1(const Instance& inst, const ComplexVector& v, const conic::SolverOptions& options,
                                  int max_passes, double eps_conv) {
  const ChannelSet& ch = inst.channels;
  const int K = ch.users(), J = ch.eves(), nt = ch.nt();
  Baseline1Solution out;
  out.v = v;
  out.rho_power.assign(K, 0.0);
  out.slack.assign(K, std::vector<double>(J, 0.0));

  std::vector<ComplexVector> f;
  for (int k = 0; k < K; ++k) {
    f.push_back(effective_user_channel(ch, v, k));
    ComplexVector u = f.back();
    const double n = u.norm();
    if (n > 0.0) {
      u /= n;
    } else {
      u = ComplexVector::Zero(nt);
      u(0) = 1.0;
    }
    out.directions.push_back(u);
  }
  const ScalarModel sm = scalar_model(ch, f, out.directions);

  // starting allocation from the certified MRT/isotropic point
  std::vector<double> rho(K, 0.0);
  double a = 0.0;
  try {
    const Solution init = initial_point(inst, v, 0.5);
    for (int k = 0; k < K; ++k) rho[k] = init.W[k].trace();
    a = init.Z.trace();
  } catch (const TrialInfeasible& e) {
    out.infeasible = true;
    out.message = e.what();
    return out;
  }

  double r_prev = scalar_sum_rate(ch, sm, rho, a);
  for (int pass = 1; pass <= max_passes; ++pass) {
    conic::ConicProblem prob;
    const int rv = prob.add_variables(K);
    const int av = prob.add_variables(1);
    std::vector<std::vector<int>> pv(K, std::vector<int>(J, -1));
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        if (has_slack(ch, j)) pv[k][j] = prob.add_variables(1);

    // -sum_k log2(N_k) + linearized sum_k log2(D_k)
    double cst = 0.0;
    for (int k = 0; k < K; ++k) {
      conic::LogTerm lt;
      lt.weight = kInvLn2;
      lt.offset = ch.sigma2_l[k];
      for (int i = 0; i < K; ++i) lt.row.add(rv + i, sm.c[k][i]);
      lt.row.add(av, sm.g[k]);
      prob.log_terms.push_back(std::move(lt));

      double d = ch.sigma2_l[k] + a * sm.g[k];
      for (int i = 0; i < K; ++i)
        if (i != k) d += rho[i] * sm.c[k][i];
      const double s = kInvLn2 / d;
      cst += std::log2(d);
      for (int i = 0; i < K; ++i)
        if (i != k) {
          prob.objective(rv + i) += s * sm.c[k][i];
          cst -= s * sm.c[k][i] * rho[i];
        }
      prob.objective(av) += s * sm.g[k];
      cst -= s * sm.g[k] * a;
    }
    prob.objective_constant = cst;

    conic::LinearConstraint power;
    power.label = "power";
    for (int k = 0; k < K; ++k) power.row.add(rv + k, 1.0);
    power.row.add(av, 1.0);
    power.rhs = inst.power;
    prob.inequalities.push_back(std::move(power));
    for (int k = 0; k < K; ++k) prob.add_lower_bound(rv + k, 0.0, "rho>=0");
    prob.add_lower_bound(av, 0.0, "p_an>=0");

    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j) {
        const int nr = ch.nr(j);
        const double gamma = leakage_gamma(inst.tau[k][j]);
        const ComplexMatrix t = stacked_channel(ch, j) * v.asDiagonal() * ch.G;
        conic::PsdConstraint blk("b1_c4bar[" + std::to_string(k) + "," + std::to_string(j) + "]", t.rows());
        blk.constant.topLeftCorner(nr, nr).diagonal().array() += ch.sigma2_e[j] * gamma;
        blk.add_outer_term(rv + k, blk.add_vector(t * out.directions[k]), -1.0);
        conic::FactoredTerm an;
        an.var = av;
        for (Eigen::Index c = 0; c < t.cols(); ++c) {
          const int u = blk.add_vector(t.col(c));
          an.alpha.emplace_back(gamma / nt, 0.0);
          an.left.push_back(u);
          an.right.push_back(u);
        }
        blk.terms.push_back(std::move(an));
        if (pv[k][j] >= 0) {
          add_slack_term(blk, nr, pv[k][j]);
          prob.add_lower_bound(pv[k][j], 0.0, "p>=0");
        }
        prob.psd.push_back(std::move(blk));
      }

    conic::ConicSolution cs = conic::solve(prob, options);
    if (cs.status != conic::SolveStatus::optimal) {
      conic::SolverOptions retry = options;
      retry.barrier_growth = std::max(2.0, options.barrier_growth / 4.0);
      retry.max_total_newton = options.max_total_newton * 2;
      cs = conic::solve(prob, retry);
    }
    out.passes = pass;
    if (cs.status != conic::SolveStatus::optimal) {
      out.message = std::string("baseline1 solve: ") + conic::to_string(cs.status);
      break;
    }
    std::vector<double> rho_new(K);
    for (int k = 0; k < K; ++k) rho_new[k] = std::max(0.0, cs.x(rv + k));
    const double a_new = std::max(0.0, cs.x(av));
    const double r_new = scalar_sum_rate(ch, sm, rho_new, a_new);
    if (r_new < r_prev - 1e-9) break;  // SCA cannot decrease; treat as converged
    rho = rho_new;
    a = a_new;
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        if (pv[k][j] >= 0) out.slack[k][j] = std::max(0.0, cs.x(pv[k][j]));
    const double rel = r_prev > 0.0 ? (r_new - r_prev) / r_prev : r_new - r_prev;
    r_prev = r_new;
    if (rel <= eps_conv) break;
  }
  out.rho_power = rho;
  out.p_an = a;
  double total = a;
  for (double r : rho) total += r;
  if (!(total > 0.0)) {
    out.infeasible = true;
    if (out.message.empty()) out.message = "baseline1: only the zero allocation is feasible";
  }
  return out;
}

Baseline2Channels build_direct_channels(const SystemConfig& config, const Geometry& geo, std::uint64_t seed) {
  Baseline2Channels d;
  RiceanParams params = config.fading;
  const ComplexVector one = ComplexVector::Ones(1);
  for (int k = 0; k < config.users; ++k) {
    Rng rng(derive_seed(seed, {kStreamDirectUser, static_cast<std::uint64_t>(k)}));
    const ComplexVector a_tx = ula_response(config.nt, bearing(geo.ap, geo.users[k]));
    const ComplexMatrix row = ricean_channel(1, config.nt, distance(geo.ap, geo.users[k]), params, false, one,
                                             a_tx, rng, DrawOrder::column_major);
    d.h.push_back(row.adjoint());
  }
  for (int j = 0; j < config.eves; ++j) {
    Rng rng(derive_seed(seed, {kStreamDirectEve, static_cast<std::uint64_t>(j)}));
    const Point& e = geo.eves[j];
    const ComplexVector a_rx = ula_response(config.nr, bearing(e, geo.ap) - geo.eve_orientation[j]);
    const ComplexVector a_tx = ula_response(config.nt, bearing(geo.ap, e));
    d.H_bar.push_back(
        ricean_channel(config.nr, config.nt, distance(geo.ap, e), params, true, a_rx, a_tx, rng,
                       DrawOrder::column_major));
  }
  return d;
}

ChannelSet direct_channel_set(const SystemConfig& config, const Baseline2Channels& direct) {
  ChannelSet ch;
  ch.G = ComplexMatrix::Identity(config.nt, config.nt);
  ch.h = direct.h;
  ch.H_bar = direct.H_bar;
  ch.irs_sizes = {config.nt};
  for (std::size_t j = 0; j < direct.H_bar.size(); ++j) {
    const double kappa = config.kappa.empty() ? 0.0 : config.kappa[j];
    ch.eps.push_back(kappa * direct.H_bar[j].norm());
  }
  ch.sigma2_l.assign(direct.h.size(), config.noise_watts);
  ch.sigma2_e.assign(direct.H_bar.size(), config.noise_watts);
  return ch;
}

Baseline2Result solve_baseline2(const Instance& direct, const AoOptions& options) {
  const ChannelSet& ch = direct.channels;
  Baseline2Result res;
  const ComplexVector v = ComplexVector::Ones(ch.m());
  try {
    res.solution = initial_point(direct, v, options.signal_fraction);
  } catch (const TrialInfeasible& e) {
    res.failed = true;
    res.message = e.what();
    res.solution = zero_solution(ch.users(), ch.nt(), ch.m());
    res.solution.v = v;
    return res;
  }
  double r_prev = sum_rate(ch, res.solution);
  for (int t = 1; t <= options.max_iter; ++t) {
    const BeamformingIterate bf =
        solve_beamforming_step(direct, v, res.solution.W, res.solution.Z, options.solver);
    if (!bf.accepted) {
      res.failed = true;
      res.message = bf.message;
      break;
    }
    res.iterations = t;
    if (bf.sum_rate < r_prev - 1e-4) break;
    res.solution.W = bf.W;
    res.solution.Z = bf.Z;
    const double rel = r_prev > 0.0 ? (bf.sum_rate - r_prev) / r_prev : bf.sum_rate - r_prev;
    r_prev = bf.sum_rate;
    if (rel <= options.eps_conv) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Instance nominal_instance(const Instance& inst) {
  Instance out = inst;
  std::fill(out.channels.eps.begin(), out.channels.eps.end(), 0.0);
  return out;
}

}  // namespace irsguard
