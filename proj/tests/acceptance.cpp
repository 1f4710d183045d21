// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--irsguard PATH] [--work DIR] [--only 1,2,...] [--seed N]
//
// Criteria 7 to 10 run the scenario defaults through the experiment harness
// (50 trials per point); criterion 11 invokes the command-line tool twice.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "irsguard/ao.hpp"
#include "irsguard/beamforming.hpp"
#include "irsguard/experiment.hpp"
#include "irsguard/phase.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"
#include "test_util.hpp"

using namespace irsguard;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void progress(const std::string& msg) {
  static const auto t0 = std::chrono::steady_clock::now();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "[" << fmt(s) << " s] " << msg << std::endl;
}

// ---------------------------------------------------------------------------
// 1. gradients

Verdict gradients(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {1}));
  const int pairs = 120;
  double worst1 = 0.0, worst2 = 0.0;
  for (int rep = 0; rep < pairs; ++rep) {
    const Instance inst = testutil::desk_instance(derive_seed(seed, {1, 1, static_cast<std::uint64_t>(rep)}));
    const ChannelSet& ch = inst.channels;
    std::vector<Hermitian> W, dW;
    for (int k = 0; k < ch.users(); ++k) {
      W.push_back(testutil::random_psd(ch.nt(), 0.3, rng));
      dW.push_back(testutil::random_hermitian(ch.nt(), rng));
    }
    const Hermitian Z = testutil::random_psd(ch.nt(), 0.2, rng);
    const Hermitian dZ = testutil::random_hermitian(ch.nt(), rng);
    const ComplexVector v = testutil::unit_modulus(ch.m(), rng);

    const D1Result g1 = d1_value_and_gradients(W, Z, ch, v);
    double an1 = trace_product(g1.grad_Z, dZ);
    for (int k = 0; k < ch.users(); ++k) an1 += trace_product(g1.grad_W[k], dW[k]);
    auto d1_at = [&](double s) {
      std::vector<Hermitian> w;
      for (int k = 0; k < ch.users(); ++k) w.push_back(W[k] + dW[k] * s);
      return d1_value_and_gradients(w, Z + dZ * s, ch, v).value;
    };
    const double h1 = 1e-5;
    const double fd1 = (d1_at(h1) - d1_at(-h1)) / (2 * h1);
    worst1 = std::max(worst1, std::abs(fd1 - an1) / std::max(std::abs(an1), 1e-8));

    const Hermitian V = Hermitian::outer(v) + testutil::random_psd(ch.m(), 0.5, rng);
    const Hermitian dV = testutil::random_hermitian(ch.m(), rng);
    const D2Result g2 = d2tilde_value_and_gradient(V, W, Z, ch, 5e-4);
    const double an2 = trace_product(g2.grad, dV);
    const double h2 = 1e-6;
    const double fd2 = (d2tilde_value_and_gradient((V + dV * h2).matrix(), W, Z, ch, 5e-4).value -
                        d2tilde_value_and_gradient((V - dV * h2).matrix(), W, Z, ch, 5e-4).value) /
                       (2 * h2);
    worst2 = std::max(worst2, std::abs(fd2 - an2) / std::max(std::abs(an2), 1e-8));
  }
  return {worst1 <= 1e-4 && worst2 <= 1e-4, std::to_string(pairs) + " pairs each, max rel err D1 " + fmt(worst1) +
                                                 ", D2 " + fmt(worst2) + " (limit 1e-4)"};
}

// ---------------------------------------------------------------------------
// 2, 3, 5 share the AO runs of the convergence scenario

struct AoRun {
  AoTrace trace;
  FeasibilityReport feas;
  bool monotone = true;
  double worst_drop = 0.0;
};

std::vector<AoRun> convergence_runs(std::uint64_t seed) {
  const ExperimentSpec spec = default_spec("convergence");
  const SystemConfig cfg = spec.config_at(spec.grid.front());
  const AoOptions opt = AoOptions::from_config(cfg);
  std::vector<AoRun> runs;
  for (int t = 0; t < 20; ++t) {
    const std::uint64_t ts = derive_seed(seed, {2, static_cast<std::uint64_t>(t)});
    const Instance inst = sample_instance(cfg, ts);
    Rng rng(derive_seed(ts, {1}));
    AoRun r;
    r.trace = run_ao(inst, opt, rng);
    const auto& rec = r.trace.records;
    for (std::size_t i = 1; i < rec.size(); ++i) {
      const double drop = rec[i - 1].sum_rate - rec[i].sum_rate;
      r.worst_drop = std::max(r.worst_drop, drop);
      if (drop > 1e-6) r.monotone = false;
    }
    Rng frng(derive_seed(ts, {2}));
    r.feas = check_feasibility(inst, r.trace.solution, 1000, frng);
    runs.push_back(std::move(r));
  }
  return runs;
}

Verdict ao_monotonicity(const std::vector<AoRun>& runs) {
  int monotone = 0, converged = 0;
  double worst = 0.0;
  for (const auto& r : runs) {
    monotone += r.monotone;
    converged += (r.trace.converged && r.trace.iterations <= 100);
    worst = std::max(worst, r.worst_drop);
  }
  const int n = static_cast<int>(runs.size());
  const bool pass = monotone == n && converged >= static_cast<int>(std::ceil(0.95 * n));
  return {pass, std::to_string(monotone) + "/" + std::to_string(n) + " monotone (worst drop " + fmt(worst) + "), " +
                    std::to_string(converged) + "/" + std::to_string(n) + " converged within 100 iterations"};
}

// ---------------------------------------------------------------------------
// 4. rank-one recovery

Verdict rank_one_recovery(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {4}));
  int solves = 0, failures = 0;
  double worst_ratio = 0.0, worst_power = 0.0, worst_obj = 0.0;
  for (int rep = 0; solves < 50 && rep < 200; ++rep) {
    const Instance inst = testutil::desk_instance(derive_seed(seed, {4, 1, static_cast<std::uint64_t>(rep)}));
    const ChannelSet& ch = inst.channels;
    const ComplexVector v = testutil::unit_modulus(ch.m(), rng);
    Solution init;
    try {
      init = initial_point(inst, v, 0.5);
    } catch (const std::exception&) {
      continue;
    }
    const BeamformingProblem bp = build_subproblem(inst, v, init.W, init.Z);
    const conic::ConicSolution cs = conic::solve(bp.problem);
    if (cs.status != conic::SolveStatus::optimal) continue;
    ++solves;
    std::vector<Hermitian> Ws;
    for (const auto& l : bp.W) Ws.push_back(l.extract(cs.x));
    const Hermitian Zs = bp.Z.extract(cs.x);
    std::vector<std::vector<double>> ps(ch.users(), std::vector<double>(ch.eves(), 0.0));
    for (int k = 0; k < ch.users(); ++k)
      for (int j = 0; j < ch.eves(); ++j)
        if (bp.p[k][j] >= 0) ps[k][j] = cs.x(bp.p[k][j]);
    try {
      const RecoveryResult r = recover_rank_one(Ws, Zs, ps, inst, v, bp);
      for (double x : r.ratio_after) worst_ratio = std::max(worst_ratio, x);
      worst_power = std::max(worst_power, r.power_identity_error);
      worst_obj = std::max(worst_obj, std::abs(r.objective_after - r.objective_before) /
                                          std::max(1.0, std::abs(r.objective_before)));
    } catch (const std::exception&) {
      ++failures;
    }
  }
  const bool pass = solves == 50 && failures == 0 && worst_ratio <= 1e-6 && worst_power <= 1e-10 && worst_obj <= 1e-6;
  return {pass, std::to_string(solves) + " solves, " + std::to_string(failures) + " construction failures, max l2/l1 " +
                    fmt(worst_ratio) + ", power identity " + fmt(worst_power) + ", objective change " +
                    fmt(worst_obj)};
}

// ---------------------------------------------------------------------------
// 6. S-procedure against a brute-force grid
//
// For a unit x the QMI margin is gs2 + min_{||d|| <= eps} (a + d)^H A (a + d)
// with a = H_bar^H x: every d in the ball is reached by a rank-one dH. The
// inner minimum is an exact trust-region problem; x runs over a grid on the
// Bloch sphere, since the margin ignores the global phase of x.

double trust_region_min(const EigenDecomposition& ed, const ComplexVector& a, double eps) {
  const RealVector& lam = ed.values;
  const ComplexVector c = ed.vectors.adjoint() * a;
  const Eigen::Index n = lam.size();
  // f(d) = sum_i lam_i |c_i + e_i|^2 over ||e|| <= eps in the eigenbasis
  auto value_at = [&](const ComplexVector& e) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) f += lam(i) * std::norm(c(i) + e(i));
    return f;
  };
  auto step = [&](double mu) {
    ComplexVector e(n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) = -lam(i) * c(i) / (lam(i) + mu);
    return e;
  };
  const double lmin = lam(0);
  if (lmin >= 0.0) {
    // unconstrained minimizers reach zero when the range part of a fits
    double r2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (lam(i) > 0.0) r2 += std::norm(c(i));
    if (r2 <= eps * eps) return 0.0;
  }
  const double lo0 = std::max(0.0, -lmin);
  auto norm_at = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double den = lam(i) + mu;
      if (den <= 0.0) {
        if (std::abs(lam(i) * c(i)) > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      s += std::norm(lam(i) * c(i) / den);
    }
    return std::sqrt(s);
  };
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  double lo = lo0, hi = lo0 + scale;
  while (norm_at(hi) > eps) hi = lo0 + 2.0 * (hi - lo0);
  if (norm_at(lo0 + 1e-300) < eps && lmin < 0.0) {
    // hard case: fill the remaining radius along the bottom eigenvector
    ComplexVector e = ComplexVector::Zero(n);
    for (Eigen::Index i = 1; i < n; ++i)
      if (lam(i) + lo0 > 0.0) e(i) = -lam(i) * c(i) / (lam(i) + lo0);
    const double t = std::sqrt(std::max(0.0, eps * eps - e.squaredNorm()));
    ComplexVector e1 = e, e2 = e;
    e1(0) += t;
    e2(0) -= t;
    return std::min(value_at(e1), value_at(e2));
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm_at(mid) > eps)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return value_at(step(hi));
}

struct GridOracle {
  ComplexMatrix H;
  EigenDecomposition ed;
  double eps = 0.0;
  double gs2 = 0.0;

  double margin(double theta, double phi) const {
    ComplexVector x(2);
    x(0) = std::cos(0.5 * theta);
    x(1) = std::polar(std::sin(0.5 * theta), phi);
    return gs2 + trust_region_min(ed, H.adjoint() * x, eps);
  }

  // Coarse grid, then grid refinement at resolution 1e-3 around the best cells.
  double minimum() const {
    const double pi = std::numbers::pi;
    const int nt = 315, np = 630;  // 1e-2 resolution
    std::vector<std::pair<double, std::pair<double, double>>> cells;
    for (int i = 0; i <= nt; ++i) {
      const double th = pi * i / nt;
      for (int k = 0; k < np; ++k) {
        const double ph = 2.0 * pi * k / np;
        cells.push_back({margin(th, ph), {th, ph}});
      }
    }
    std::partial_sort(cells.begin(), cells.begin() + 8, cells.end());
    double best = cells.front().first;
    for (int c = 0; c < 8; ++c) {
      const auto [th0, ph0] = cells[c].second;
      for (int i = -25; i <= 25; ++i)
        for (int k = -25; k <= 25; ++k) {
          const double th = std::clamp(th0 + 1e-3 * i, 0.0, pi);
          best = std::min(best, margin(th, ph0 + 1e-3 * k));
        }
    }
    return best;
  }
};

Verdict sprocedure_oracle(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {6}));
  int disagreements = 0, banded = 0, feasible = 0;
  double worst_gap = 0.0;
  for (int inst_id = 0; inst_id < 50; ++inst_id) {
    ChannelSet ch;
    const int nt = 2, m = 2, nr = 2;
    ch.irs_sizes = {m};
    ch.G = testutil::random_matrix(m, nt, rng);
    ch.h = {testutil::random_vector(m, rng)};
    ch.H_bar = {testutil::random_matrix(nr, m, rng)};
    ch.sigma2_l = {1.0};
    ch.sigma2_e = {1.0};
    const double kappa = 0.02 + 0.4 * uniform01(rng);
    ch.eps = {kappa * ch.H_bar[0].norm()};
    Solution sol = zero_solution(1, nt, m);
    sol.v = testutil::unit_modulus(m, rng);
    sol.W[0] = Hermitian::outer(testutil::random_vector(nt, rng)) * (0.5 + uniform01(rng));
    sol.Z = testutil::random_psd(nt, 0.5 * uniform01(rng), rng);
    const double tau = 0.25 + 2.0 * uniform01(rng);

    const bool lmi = certify_c4bar(ch, sol, 0, 0, tau).min_eig >= 0.0;
    const double gamma = leakage_gamma(tau);
    const ComplexMatrix T = sol.v.asDiagonal() * ch.G;
    GridOracle o;
    o.H = ch.H_bar[0];
    o.ed = eig_hermitian(T * (gamma * sol.Z.matrix() - sol.W[0].matrix()) * T.adjoint());
    o.eps = ch.eps[0];
    o.gs2 = gamma * ch.sigma2_e[0];
    const double brute = o.minimum();
    const bool grid_ok = brute >= 0.0;
    feasible += grid_ok;
    if (std::abs(brute) <= 1e-6) {
      ++banded;
      continue;
    }
    if (grid_ok != lmi) {
      ++disagreements;
      worst_gap = std::max(worst_gap, std::abs(brute));
    }
  }
  return {disagreements == 0,
          "50 instances (" + std::to_string(feasible) + " robustly feasible), " + std::to_string(disagreements) +
              " disagreements, " + std::to_string(banded) + " inside the 1e-6 band" +
              (disagreements ? ", worst |margin| " + fmt(worst_gap) : "")};
}

// ---------------------------------------------------------------------------
// harness-based criteria

std::map<std::string, ExperimentResult> g_results;

const ExperimentResult& scenario(const std::string& id, int workers) {
  auto it = g_results.find(id);
  if (it != g_results.end()) return it->second;
  progress("running scenario " + id);
  ExperimentSpec spec = default_spec(id);
  ExperimentResult r = run_experiment(spec, {workers, false, {}});
  progress("scenario " + id + " done, " + std::to_string(r.rows.size()) + " rows");
  return g_results.emplace(id, std::move(r)).first->second;
}

// Per-trial values of a metric for one (scheme, sweep value), indexed by trial.
std::map<int, double> values(const ExperimentResult& r, const std::string& scheme, double x,
                             double ResultRow::*field) {
  std::map<int, double> out;
  for (const auto& row : r.rows)
    if (row.scheme == scheme && row.sweep_value == x && row.status != "error")
      out[row.trial] = std::stod(format_number(row.*field));
  return out;
}

double mean_of(const std::map<int, double>& v) {
  double s = 0.0;
  for (const auto& [t, x] : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

// Mean and standard error of a - b over the trials present in both.
std::pair<double, double> paired(const std::map<int, double>& a, const std::map<int, double>& b) {
  std::vector<double> d;
  for (const auto& [t, x] : a) {
    auto it = b.find(t);
    if (it != b.end()) d.push_back(x - it->second);
  }
  if (d.size() < 2) return {NAN, NAN};
  double m = 0.0;
  for (double x : d) m += x;
  m /= static_cast<double>(d.size());
  double ss = 0.0;
  for (double x : d) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(d.size() - 1));
  return {m, sd / std::sqrt(static_cast<double>(d.size()))};
}

Verdict dominance(int workers) {
  const ExperimentResult& r = scenario("sumrate_vs_power", workers);
  const ExperimentSpec spec = default_spec("sumrate_vs_power");
  bool pass = true, mono = true;
  std::ostringstream os;
  double prev = -INFINITY;
  for (double p : spec.grid) {
    const auto prop = values(r, "proposed", p, &ResultRow::sum_rate);
    const double mp = mean_of(prop);
    os << p << " dBm: proposed " << fmt(mp);
    for (const std::string b : {"baseline1", "baseline2"}) {
      const auto [diff, se] = paired(prop, values(r, b, p, &ResultRow::sum_rate));
      const bool ok = diff > se;
      pass = pass && ok;
      os << ", -" << b << " " << fmt(diff) << " (se " << fmt(se) << ")";
    }
    const SummaryRow* s = find_summary(r.summary, "proposed", p, "sum_rate");
    if (s == nullptr || prop.size() != 50u) pass = false;
    if (!(mp >= prev)) mono = false;
    prev = mp;
    os << "; ";
  }
  return {pass && mono, os.str() + "proposed non-decreasing in P: " + std::string(mono ? "yes" : "no")};
}

Verdict tau_trends(int workers) {
  const ExperimentResult& r = scenario("secrecy_vs_tau", workers);
  const ExperimentSpec spec = default_spec("secrecy_vs_tau");
  bool an_ok = true, rate_ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    const double t = spec.grid[i];
    os << "tau " << t << ": an " << fmt(mean_of(values(r, "proposed", t, &ResultRow::an_fraction))) << " rate "
       << fmt(mean_of(values(r, "proposed", t, &ResultRow::sum_rate))) << "; ";
    if (i == 0) continue;
    const double tp = spec.grid[i - 1];
    const auto [dan, se_an] =
        paired(values(r, "proposed", t, &ResultRow::an_fraction), values(r, "proposed", tp, &ResultRow::an_fraction));
    if (!(dan <= se_an)) an_ok = false;
    const double rate_now = mean_of(values(r, "proposed", t, &ResultRow::sum_rate));
    const double rate_prev = mean_of(values(r, "proposed", tp, &ResultRow::sum_rate));
    if (!(rate_now >= rate_prev)) rate_ok = false;
  }
  return {an_ok && rate_ok, os.str() + "an non-increasing within 1 se: " + (an_ok ? "yes" : "no") +
                                ", rate non-decreasing: " + (rate_ok ? "yes" : "no")};
}

Verdict outage(int workers) {
  ExperimentSpec spec = default_spec("outage");
  const double target_db = 10.0 * std::log10(leakage_gamma(spec.tau));
  progress("running scenario outage");
  spec.target_sinr_db = {target_db};
  const ExperimentResult r = run_experiment(spec, {workers, false, {}});
  g_results.emplace("outage", r);
  double robust = NAN, nonrobust = NAN;
  int n_robust = 0, n_nonrobust = 0;
  for (const auto& o : r.outage) {
    if (o.scheme == "proposed") {
      robust = o.outage;
      n_robust = o.samples;
    }
    if (o.scheme == "nonrobust") {
      nonrobust = o.outage;
      n_nonrobust = o.samples;
    }
  }
  const bool pass = robust == 0.0 && nonrobust >= 0.10 && n_robust >= 200 && n_nonrobust >= 200;
  return {pass, "target " + fmt(target_db) + " dB: robust outage " + fmt(robust) + " over " +
                    std::to_string(n_robust) + " samples, non-robust " + fmt(nonrobust) + " over " +
                    std::to_string(n_nonrobust)};
}

Verdict multi_irs(int workers) {
  const ExperimentResult& r = scenario("multi_irs_split", workers);
  const ExperimentSpec spec = default_spec("multi_irs_split");
  double best_m = -1, best = -INFINITY;
  std::ostringstream os;
  for (double m1 : spec.grid) {
    const double mu = mean_of(values(r, "proposed", m1, &ResultRow::sum_rate));
    os << fmt(mu) << (m1 == spec.grid.back() ? "" : " ");
    if (mu > best) {
      best = mu;
      best_m = m1;
    }
  }
  const auto mid = values(r, "proposed", 5, &ResultRow::sum_rate);
  const auto [d1, se1] = paired(mid, values(r, "proposed", 1, &ResultRow::sum_rate));
  const auto [d9, se9] = paired(mid, values(r, "proposed", 9, &ResultRow::sum_rate));
  const bool pass = best_m == 5 && d1 > se1 && d9 > se9;
  return {pass, "means over M1=1..9: " + os.str() + "; argmax M1=" + fmt(best_m) + ", M1=5 minus M1=1 " + fmt(d1) +
                    " (se " + fmt(se1) + "), minus M1=9 " + fmt(d9) + " (se " + fmt(se9) + ")"};
}

// Every converged proposed solution: certified and sampled leakage checks.
Verdict robust_feasibility(const std::vector<AoRun>& runs) {
  int checked = 0, bad = 0;
  double worst_eig = INFINITY, worst_excess = -INFINITY;
  for (const auto& r : runs) {
    if (!r.trace.converged) continue;
    ++checked;
    for (const auto& row : r.feas.certified_min_eig)
      for (double e : row) worst_eig = std::min(worst_eig, e);
    worst_excess = std::max(worst_excess, r.feas.worst_leakage_excess);
    bool ok = r.feas.worst_leakage_excess <= 1e-3;
    for (const auto& row : r.feas.certified_min_eig)
      for (double e : row) ok = ok && e >= -1e-7;
    bad += !ok;
  }
  for (const auto& [id, res] : g_results)
    for (const auto& row : res.rows) {
      if (row.scheme != "proposed" || row.status != "ok") continue;
      ++checked;
      worst_eig = std::min(worst_eig, row.certified_margin);
      worst_excess = std::max(worst_excess, row.leakage_excess);
      if (!(row.certified_margin >= -1e-7 && row.leakage_excess <= 1e-3)) ++bad;
    }
  return {bad == 0 && checked > 0, std::to_string(checked) + " converged solutions, " + std::to_string(bad) +
                                       " violations, min LMI eig " + fmt(worst_eig) +
                                       ", max sampled leakage - tau " + fmt(worst_excess)};
}

Verdict penalty_exactness(const std::vector<AoRun>& runs) {
  int total = 0, tight = 0;
  double worst_mod = 0.0, worst_gap = 0.0;
  for (const auto& r : runs) {
    ++total;
    tight += r.trace.final_rank_gap_rel <= 1e-4;
    worst_gap = std::max(worst_gap, r.trace.final_rank_gap_rel);
    worst_mod = std::max(worst_mod, r.trace.final_modulus_error);
  }
  for (const auto& [id, res] : g_results)
    for (const auto& row : res.rows) {
      if (row.scheme != "proposed" || row.status != "ok") continue;
      ++total;
      tight += row.rank_gap <= 1e-4;
      worst_gap = std::max(worst_gap, row.rank_gap);
    }
  const bool pass = total > 0 && tight >= 0.95 * total && worst_mod <= 1e-3;
  return {pass, std::to_string(tight) + "/" + std::to_string(total) + " with gap <= 1e-4 ||V||_2 (rho 5e-4), worst " +
                    fmt(worst_gap) + ", max modulus error " + fmt(worst_mod)};
}

// ---------------------------------------------------------------------------
// 11. determinism of the command-line tool

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const std::string& exe, const fs::path& work) {
  if (exe.empty() || !fs::exists(exe)) return {false, "irsguard executable not found"};
  fs::create_directories(work);
  const fs::path spec = work / "determinism.json";
  std::ofstream(spec) << "{\n  \"scenario\": \"sumrate_vs_power\",\n  \"trials\": 3,\n  \"seed\": 2024\n}\n";
  bool ok = true;
  std::string detail;
  for (const char* tag : {"a", "b"}) {
    fs::remove_all(work / tag);
    const std::string cmd = "\"" + exe + "\" run \"" + spec.string() + "\" --out \"" + (work / tag).string() +
                            "\" --workers " + (tag[0] == 'a' ? "1" : "2") + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "run failed: " + cmd};
  }
  for (const char* f : {"results.csv", "summary.csv"}) {
    const std::string a = slurp(work / "a" / f), b = slurp(work / "b" / f);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += std::string(f) + (same ? " identical (" + std::to_string(a.size()) + " bytes)" : " differs") + "; ";
  }
  return {ok, detail + "workers 1 vs 2"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string exe;
  fs::path work = fs::temp_directory_path() / "irsguard_acceptance";
  std::set<int> only;
  std::uint64_t seed = 20240601;
  int workers = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value after " << a << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--irsguard") exe = next();
    else if (a == "--work") work = next();
    else if (a == "--seed") seed = std::stoull(next());
    else if (a == "--workers") workers = std::stoi(next());
    else if (a == "--only") {
      std::stringstream ss(next());
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: acceptance [--irsguard PATH] [--work DIR] [--only 1,2,..] [--seed N] [--workers N]\n";
      return 2;
    }
  }
  auto want = [&](int c) { return only.empty() || only.count(c); };

  std::map<int, Verdict> verdicts;
  std::map<int, std::string> names{{1, "gradient correctness"},   {2, "AO monotonicity"},
                                   {3, "robust feasibility"},     {4, "rank-one recovery"},
                                   {5, "penalty exactness"},      {6, "S-procedure oracle"},
                                   {7, "dominance trends"},       {8, "tau-sweep trends"},
                                   {9, "outage"},                 {10, "multi-IRS split"},
                                   {11, "determinism"}};
  auto timed = [&](int c, const std::function<Verdict()>& f) {
    if (!want(c)) return;
    progress("criterion " + std::to_string(c) + " (" + names[c] + ")");
    try {
      verdicts[c] = f();
    } catch (const std::exception& e) {
      verdicts[c] = {false, std::string("exception: ") + e.what()};
    }
  };

  timed(1, [&] { return gradients(seed); });
  std::vector<AoRun> runs;
  if (want(2) || want(3) || want(5)) {
    progress("AO runs for criteria 2, 3 and 5");
    runs = convergence_runs(seed);
  }
  timed(2, [&] { return ao_monotonicity(runs); });
  timed(4, [&] { return rank_one_recovery(seed); });
  timed(6, [&] { return sprocedure_oracle(seed); });
  timed(7, [&] { return dominance(workers); });
  timed(8, [&] { return tau_trends(workers); });
  timed(9, [&] { return outage(workers); });
  timed(10, [&] { return multi_irs(workers); });
  timed(3, [&] { return robust_feasibility(runs); });
  timed(5, [&] { return penalty_exactness(runs); });
  timed(11, [&] { return determinism(exe, work); });

  int failed = 0;
  for (const auto& [c, v] : verdicts) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << names[c] << "): " << v.detail << "\n";
    failed += !v.pass;
  }
  std::cout << (failed ? "FAILED " : "PASSED ") << verdicts.size() - failed << "/" << verdicts.size() << std::endl;
  return failed ? 1 : 0;
}
