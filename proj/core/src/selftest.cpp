#include "irsguard/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "irsguard/ao.hpp"
#include "irsguard/beamforming.hpp"
#include "irsguard/phase.hpp"
#include "irsguard/random.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"

namespace irsguard {

namespace {

ComplexMatrix random_matrix(int r, int c, Rng& rng) {
  ComplexMatrix a(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) a(i, j) = complex_gaussian(rng);
  return a;
}

Hermitian random_psd(int n, double scale, Rng& rng) {
  const ComplexMatrix a = random_matrix(n, n, rng);
  return Hermitian(a * a.adjoint() * (scale / n));
}

Hermitian random_direction(int n, Rng& rng) {
  const ComplexMatrix a = random_matrix(n, n, rng);
  Hermitian d(a);
  return d * (1.0 / d.frobenius());
}

double rel_error(double fd, double an) { return std::abs(fd - an) / std::max(std::abs(an), 1e-8); }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

SuiteResult gradient_suite(const SystemConfig& cfg, std::uint64_t seed, int pairs) {
  SuiteResult r{"gradient", 0, 0, ""};
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    Rng rng(derive_seed(seed, {1, static_cast<std::uint64_t>(t)}));
    const Instance inst = sample_instance(cfg, derive_seed(seed, {2, static_cast<std::uint64_t>(t)}));
    const ChannelSet& ch = inst.channels;
    const ComplexVector v = random_phases(ch.m(), rng);
    std::vector<Hermitian> W;
    for (int k = 0; k < ch.users(); ++k) W.push_back(random_psd(ch.nt(), 0.3, rng));
    const Hermitian Z = random_psd(ch.nt(), 0.3, rng);
    const double h = 1e-5;

    // beamforming gradient along a random direction in (W, Z)
    std::vector<Hermitian> dW;
    for (int k = 0; k < ch.users(); ++k) dW.push_back(random_direction(ch.nt(), rng));
    const Hermitian dZ = random_direction(ch.nt(), rng);
    auto shifted = [&](double s) {
      std::vector<Hermitian> w = W;
      for (int k = 0; k < ch.users(); ++k) w[k] = W[k] + dW[k] * s;
      return w;
    };
    const D1Result g = d1_value_and_gradients(W, Z, ch, v);
    double an = trace_product(g.grad_Z, dZ);
    for (int k = 0; k < ch.users(); ++k) an += trace_product(g.grad_W[k], dW[k]);
    const double fd = (d1_value_and_gradients(shifted(h), Z + dZ * h, ch, v).value -
                       d1_value_and_gradients(shifted(-h), Z - dZ * h, ch, v).value) /
                      (2.0 * h);
    const double e1 = rel_error(fd, an);

    // phase gradient at a point with a distinct leading eigenvalue
    const ComplexVector u = random_phases(ch.m(), rng);
    Hermitian V = Hermitian::outer(u) + random_psd(ch.m(), 0.2, rng);
    const Hermitian dV = random_direction(ch.m(), rng);
    const double rho = 5e-4;
    const D2Result g2 = d2tilde_value_and_gradient(V.matrix(), W, Z, ch, rho);
    const double an2 = trace_product(g2.grad, dV);
    const double h2 = 1e-6;
    const double fd2 = (d2tilde_value_and_gradient((V + dV * h2).matrix(), W, Z, ch, rho).value -
                        d2tilde_value_and_gradient((V - dV * h2).matrix(), W, Z, ch, rho).value) /
                       (2.0 * h2);
    const double e2 = rel_error(fd2, an2);
    r.total += 2;
    r.passed += (e1 <= 1e-4) + (e2 <= 1e-4);
    worst = std::max({worst, e1, e2});
  }
  r.worst = "max rel err " + fmt(worst);
  return r;
}

SuiteResult monotonicity_suite(const SystemConfig& cfg, std::uint64_t seed, int trials) {
  SuiteResult r{"ao_monotonicity", 0, 0, ""};
  double worst_drop = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Instance inst = sample_instance(cfg, derive_seed(seed, {3, static_cast<std::uint64_t>(t)}));
    Rng rng(derive_seed(seed, {4, static_cast<std::uint64_t>(t)}));
    const AoTrace tr = run_ao(inst, AoOptions::from_config(cfg), rng);
    bool ok = tr.converged;
    for (std::size_t i = 1; i < tr.records.size(); ++i) {
      const double drop = tr.records[i - 1].sum_rate - tr.records[i].sum_rate;
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-6) ok = false;
    }
    ++r.total;
    r.passed += ok;
  }
  r.worst = "max step decrease " + fmt(worst_drop);
  return r;
}

SuiteResult rank_suite(const SystemConfig& cfg, std::uint64_t seed, int solves) {
  SuiteResult r{"rank_one_recovery", 0, 0, ""};
  double worst = 0.0;
  for (int t = 0; t < solves; ++t) {
    const Instance inst = sample_instance(cfg, derive_seed(seed, {5, static_cast<std::uint64_t>(t)}));
    Rng rng(derive_seed(seed, {6, static_cast<std::uint64_t>(t)}));
    const ComplexVector v = random_phases(inst.channels.m(), rng);
    const Solution init = initial_point(inst, v, cfg.init_signal_fraction);
    const BeamformingIterate it = solve_beamforming_step(inst, v, init.W, init.Z, cfg.solver);
    bool ok = it.accepted;
    if (ok) {
      for (const auto& w : it.W) {
        const RealVector ev = eig_hermitian(w.matrix()).values;
        const double l1 = ev(ev.size() - 1);
        const double ratio = l1 > 0.0 ? std::abs(ev(ev.size() - 2)) / l1 : 0.0;
        worst = std::max(worst, ratio);
        if (ratio > 1e-6) ok = false;
      }
      Rng frng(derive_seed(seed, {7, static_cast<std::uint64_t>(t)}));
      const Solution s{it.W, it.Z, v, std::nullopt};
      if (!check_feasibility(inst, s, 200, frng).ok()) ok = false;
    }
    ++r.total;
    r.passed += ok;
  }
  r.worst = "max lambda2/lambda1 " + fmt(worst);
  return r;
}

SuiteResult sprocedure_suite(std::uint64_t seed, int instances) {
  // LMI certificate must imply the sampled matrix inequality
  SuiteResult r{"s_procedure", 0, 0, ""};
  int disagreements = 0;
  SystemConfig cfg = default_config();
  cfg.irs_sizes = {2};
  for (int t = 0; t < instances; ++t) {
    const Instance inst = sample_instance(cfg, derive_seed(seed, {8, static_cast<std::uint64_t>(t)}));
    Rng rng(derive_seed(seed, {9, static_cast<std::uint64_t>(t)}));
    const ComplexVector v = random_phases(inst.channels.m(), rng);
    Solution s = initial_point(inst, v, 0.5);
    const SlackCertificate cert = certify_c4bar(inst.channels, s, 0, 0, inst.tau[0][0]);
    const Prop1Report rep = prop1_equivalence_check(inst.channels, s, 0, 0, inst.tau[0][0], 200, rng);
    const bool ok = !(cert.min_eig >= 0.0) || rep.matrix_ok();
    ++r.total;
    r.passed += ok;
    disagreements += !ok;
  }
  r.worst = std::to_string(disagreements) + " certified instances violated by samples";
  return r;
}

}  // namespace

std::vector<SuiteResult> run_selftest(std::uint64_t seed, int scale) {
  SystemConfig cfg = default_config();
  cfg.seed = seed;
  scale = std::max(1, scale);
  return {gradient_suite(cfg, seed, 20 * scale), monotonicity_suite(cfg, seed, 2 * scale),
          rank_suite(cfg, seed, 3 * scale), sprocedure_suite(seed, 10 * scale)};
}

void print_selftest(std::ostream& os, const std::vector<SuiteResult>& results) {
  int passed = 0, total = 0;
  for (const auto& r : results) {
    os << r.name << ": " << r.passed << "/" << r.total << " passed (" << r.worst << ")\n";
    passed += r.passed;
    total += r.total;
  }
  os << "total: " << passed << "/" << total << " passed\n";
}

}  // namespace irsguard
