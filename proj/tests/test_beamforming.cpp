#include <cmath>

#include "doctest.h"
#include "irsguard/beamforming.hpp"
#include "irsguard/errors.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"
#include "test_util.hpp"

using namespace irsguard;

namespace {

struct TestPoint {
  std::vector<Hermitian> W;
  Hermitian Z;
  ComplexVector v;
};

TestPoint random_point(const ChannelSet& ch, Rng& rng) {
  TestPoint p;
  for (int k = 0; k < ch.users(); ++k) p.W.push_back(testutil::random_psd(ch.nt(), 0.2, rng));
  p.Z = testutil::random_psd(ch.nt(), 0.2, rng);
  p.v = testutil::unit_modulus(ch.m(), rng);
  return p;
}

}  // namespace

TEST_CASE("beamforming interference term gradient matches central differences") {
  Rng rng(31);
  double worst = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const Instance inst = testutil::desk_instance(100 + rep);
    const ChannelSet& ch = inst.channels;
    const TestPoint pt = random_point(ch, rng);
    std::vector<Hermitian> dW;
    for (int k = 0; k < ch.users(); ++k) dW.push_back(testutil::random_hermitian(ch.nt(), rng));
    const Hermitian dZ = testutil::random_hermitian(ch.nt(), rng);
    const D1Result g = d1_value_and_gradients(pt.W, pt.Z, ch, pt.v);
    double an = trace_product(g.grad_Z, dZ);
    for (int k = 0; k < ch.users(); ++k) an += trace_product(g.grad_W[k], dW[k]);
    const double h = 1e-5;
    auto at = [&](double s) {
      std::vector<Hermitian> w;
      for (int k = 0; k < ch.users(); ++k) w.push_back(pt.W[k] + dW[k] * s);
      return d1_value_and_gradients(w, pt.Z + dZ * s, ch, pt.v).value;
    };
    const double fd = (at(h) - at(-h)) / (2 * h);
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-8));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("surrogate is a tight upper bound on the negative sum-rate") {
  const Instance inst = testutil::desk_instance(32);
  const ChannelSet& ch = inst.channels;
  Rng rng(33);
  const TestPoint ref = random_point(ch, rng);
  Solution sref{ref.W, ref.Z, ref.v, std::nullopt};
  CHECK(beamforming_surrogate(ref.W, ref.Z, ch, ref.v, ref.W, ref.Z) ==
        doctest::Approx(-sum_rate(ch, sref)).epsilon(1e-12));
  for (int rep = 0; rep < 50; ++rep) {
    const TestPoint x = random_point(ch, rng);
    Solution sx{x.W, x.Z, ref.v, std::nullopt};
    CHECK(beamforming_surrogate(x.W, x.Z, ch, ref.v, ref.W, ref.Z) >= -sum_rate(ch, sx) - 1e-12);
  }
}

TEST_CASE("conic subproblem objective equals the surrogate") {
  const Instance inst = testutil::desk_instance(34);
  const ChannelSet& ch = inst.channels;
  Rng rng(35);
  const TestPoint ref = random_point(ch, rng);
  const TestPoint x = random_point(ch, rng);
  const BeamformingProblem bp = build_subproblem(inst, ref.v, ref.W, ref.Z);
  std::vector<std::vector<double>> p(ch.users(), std::vector<double>(ch.eves(), 0.1));
  const RealVector vec = bp.embed(x.W, x.Z, p);
  CHECK(bp.problem.objective_value(vec) ==
        doctest::Approx(beamforming_surrogate(x.W, x.Z, ch, ref.v, ref.W, ref.Z)).epsilon(1e-10));
}

TEST_CASE("beamforming step improves, stays feasible and returns rank-one beams") {
  for (int rep = 0; rep < 5; ++rep) {
    const Instance inst = testutil::desk_instance(200 + rep);
    const ChannelSet& ch = inst.channels;
    Rng rng(36 + rep);
    const ComplexVector v = testutil::unit_modulus(ch.m(), rng);
    const Solution init = initial_point(inst, v, 0.5);
    const BeamformingIterate it = solve_beamforming_step(inst, v, init.W, init.Z, {});
    REQUIRE(it.accepted);
    CHECK(it.surrogate <= it.surrogate_ref + 1e-7);
    CHECK(it.sum_rate >= it.sum_rate_ref - 1e-6);
    Solution s{it.W, it.Z, v, std::nullopt};
    CHECK(s.total_power() <= inst.power * (1 + 1e-8));
    for (const auto& w : it.W) {
      const RealVector ev = eig_hermitian(w.matrix()).values;
      CHECK(std::abs(ev(ev.size() - 2)) <= 1e-6 * ev(ev.size() - 1));
    }
    for (int k = 0; k < ch.users(); ++k)
      for (int j = 0; j < ch.eves(); ++j) CHECK(certify_c4bar(ch, s, k, j, inst.tau[k][j]).min_eig >= -1e-7);
  }
}

TEST_CASE("rank-one recovery preserves power, objective and feasibility") {
  const Instance inst = testutil::desk_instance(37);
  const ChannelSet& ch = inst.channels;
  Rng rng(38);
  const ComplexVector v = testutil::unit_modulus(ch.m(), rng);
  const Solution init = initial_point(inst, v, 0.5);
  const BeamformingProblem bp = build_subproblem(inst, v, init.W, init.Z);
  const conic::ConicSolution cs = conic::solve(bp.problem);
  REQUIRE(cs.status == conic::SolveStatus::optimal);
  std::vector<Hermitian> Ws;
  for (const auto& l : bp.W) Ws.push_back(l.extract(cs.x));
  const Hermitian Zs = bp.Z.extract(cs.x);
  std::vector<std::vector<double>> ps(ch.users(), std::vector<double>(ch.eves(), 0.0));
  for (int k = 0; k < ch.users(); ++k)
    for (int j = 0; j < ch.eves(); ++j)
      if (bp.p[k][j] >= 0) ps[k][j] = cs.x(bp.p[k][j]);
  const RecoveryResult r = recover_rank_one(Ws, Zs, ps, inst, v, bp);
  ComplexMatrix before = Zs.matrix(), after = r.Z.matrix();
  for (int k = 0; k < ch.users(); ++k) {
    before += Ws[k].matrix();
    after += r.W[k].matrix();
    CHECK(r.ratio_after[k] <= 1e-6);
  }
  CHECK((before - after).norm() <= 1e-10 * std::max(1.0, before.norm()));
  CHECK(std::abs(r.objective_after - r.objective_before) <= 1e-6 * std::max(1.0, std::abs(r.objective_before)));
  CHECK(min_eigenvalue(r.Z) >= -1e-12);
}

TEST_CASE("single user without eavesdroppers reaches the MRT optimum in one step") {
  SystemConfig c = default_config();
  c.users = 1;
  c.eves = 0;
  c.set_tau(1.0);
  c.set_kappa2(0.1);
  const Instance inst = sample_instance(c, 39);
  Rng rng(40);
  const ComplexVector v = testutil::unit_modulus(inst.channels.m(), rng);
  const Solution init = initial_point(inst, v, 0.5);
  const BeamformingIterate it = solve_beamforming_step(inst, v, init.W, init.Z, {});
  REQUIRE(it.accepted);
  const ComplexVector f = effective_user_channel(inst.channels, v, 0);
  CHECK(it.sum_rate == doctest::Approx(std::log2(1.0 + inst.power * f.squaredNorm())).epsilon(1e-6));
  CHECK(it.Z.trace() <= 1e-6);
}

TEST_CASE("initial point is certified feasible and collapses to zero when tau = 0") {
  Instance inst = testutil::desk_instance(41);
  Rng rng(42);
  const ComplexVector v = testutil::unit_modulus(inst.channels.m(), rng);
  const Solution s = initial_point(inst, v, 0.5);
  CHECK(certify_c4bar(inst.channels, s, 0, 0, inst.tau[0][0]).min_eig >= 0.0);
  CHECK(s.total_power() <= inst.power * (1 + 1e-12));
  for (auto& row : inst.tau) std::fill(row.begin(), row.end(), 0.0);
  const Solution z = initial_point(inst, v, 0.5);
  CHECK(z.total_power() <= 1e-12);
}
