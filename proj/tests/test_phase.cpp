#include <cmath>

#include "doctest.h"
#include "irsguard/beamforming.hpp"
#include "irsguard/errors.hpp"
#include "irsguard/phase.hpp"
#include "irsguard/robust_lmi.hpp"
#include "irsguard/system_model.hpp"
#include "test_util.hpp"

using namespace irsguard;

TEST_CASE("phase interference term gradient with the spectral penalty matches central differences") {
  Rng rng(51);
  double worst = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const Instance inst = testutil::desk_instance(300 + rep);
    const ChannelSet& ch = inst.channels;
    std::vector<Hermitian> W;
    for (int k = 0; k < ch.users(); ++k) W.push_back(testutil::random_psd(ch.nt(), 0.2, rng));
    const Hermitian Z = testutil::random_psd(ch.nt(), 0.2, rng);
    const Hermitian V = Hermitian::outer(testutil::unit_modulus(ch.m(), rng)) + testutil::random_psd(ch.m(), 0.3, rng);
    const Hermitian dV = testutil::random_hermitian(ch.m(), rng);
    const D2Result g = d2tilde_value_and_gradient(V, W, Z, ch, 5e-4);
    const double an = trace_product(g.grad, dV);
    const double h = 1e-6;
    const double fd = (d2tilde_value_and_gradient((V + dV * h).matrix(), W, Z, ch, 5e-4).value -
                       d2tilde_value_and_gradient((V - dV * h).matrix(), W, Z, ch, 5e-4).value) /
                      (2 * h);
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-8));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("lifted rate equals the vector-form rate on rank-one unit-modulus V") {
  const Instance inst = testutil::desk_instance(52);
  const ChannelSet& ch = inst.channels;
  Rng rng(53);
  Solution s = zero_solution(ch.users(), ch.nt(), ch.m());
  s.v = testutil::unit_modulus(ch.m(), rng);
  for (int k = 0; k < ch.users(); ++k) s.W[k] = testutil::random_psd(ch.nt(), 0.2, rng);
  s.Z = testutil::random_psd(ch.nt(), 0.1, rng);
  const ComplexMatrix V = s.v * s.v.adjoint();
  CHECK(lifted_sum_rate(V, s.W, s.Z, ch) == doctest::Approx(sum_rate(ch, s)).epsilon(1e-9));
  CHECK(penalized_objective(V, s.W, s.Z, ch, 5e-4) == doctest::Approx(-sum_rate(ch, s)).epsilon(1e-9));
  // global phase does not change the rate
  Solution r = s;
  r.v *= std::polar(1.0, 1.234);
  CHECK(sum_rate(ch, r) == doctest::Approx(sum_rate(ch, s)).epsilon(1e-12));
}

TEST_CASE("phase extraction") {
  Rng rng(54);
  const ComplexVector v0 = testutil::unit_modulus(5, rng);
  const PhaseExtraction e = extract_phases_detail(v0 * v0.adjoint(), 1e-4);
  const cd rot = e.v(0) / v0(0);
  CHECK((e.v - v0 * rot).norm() <= 1e-10);
  CHECK(std::abs(e.v(0).imag()) <= 1e-12);
  CHECK(e.v(0).real() > 0.0);
  CHECK(e.modulus_error <= 1e-10);
  CHECK(e.gap <= 1e-10);
  CHECK_THROWS_AS(extract_phases(ComplexMatrix::Identity(4, 4)), RankGapError);
  const PhaseExtraction u = extract_phases_detail(ComplexMatrix::Identity(4, 4), 1e-4, false);
  CHECK(u.gap == doctest::Approx(3.0));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(u.v(i)) == doctest::Approx(1.0));
  CHECK(extract_phases(ComplexMatrix::Ones(1, 1))(0) == cd(1.0, 0.0));
}

TEST_CASE("phase subproblem objective at the reference is the penalized objective") {
  const Instance inst = testutil::desk_instance(55);
  const ChannelSet& ch = inst.channels;
  Rng rng(56);
  const ComplexVector v = testutil::unit_modulus(ch.m(), rng);
  const Solution s0 = initial_point(inst, v, 0.5);
  const ComplexMatrix Vref = v * v.adjoint();
  const PhaseProblem pp = build_phase_subproblem(inst, s0.W, s0.Z, Vref, 5e-4);
  std::vector<std::vector<double>> p(ch.users(), std::vector<double>(ch.eves(), 0.2));
  CHECK(pp.problem.objective_value(pp.embed(Vref, p)) ==
        doctest::Approx(penalized_objective(Vref, s0.W, s0.Z, ch, 5e-4)).epsilon(1e-9));
  // the surrogate majorizes the penalized objective
  const Hermitian V2 = Hermitian::outer(testutil::unit_modulus(ch.m(), rng)) * 0.5 +
                       Hermitian::outer(testutil::unit_modulus(ch.m(), rng)) * 0.5;
  CHECK(pp.problem.objective_value(pp.embed(V2, p)) >= penalized_objective(V2, s0.W, s0.Z, ch, 5e-4) - 1e-9);
}

TEST_CASE("phase step is monotone and keeps a rank-one unit-modulus solution") {
  for (int rep = 0; rep < 4; ++rep) {
    const Instance inst = testutil::desk_instance(400 + rep);
    const ChannelSet& ch = inst.channels;
    Rng rng(57 + rep);
    const ComplexVector v = testutil::unit_modulus(ch.m(), rng);
    const Solution s0 = initial_point(inst, v, 0.5);
    const BeamformingIterate bf = solve_beamforming_step(inst, v, s0.W, s0.Z, {});
    REQUIRE(bf.accepted);
    const PhaseIterate ph = solve_phase_step(inst, bf.W, bf.Z, v, 5e-4, 1e-4, {});
    REQUIRE(ph.accepted);
    CHECK(ph.surrogate <= ph.surrogate_ref + 1e-7);
    CHECK(ph.penalized <= ph.penalized_ref + 1e-6);
    CHECK(ph.sum_rate >= bf.sum_rate - 1e-5);
    CHECK(ph.rank_ok);
    CHECK(ph.modulus_error <= 1e-3);
    for (int i = 0; i < ch.m(); ++i) CHECK(std::abs(ph.V(i, i) - cd(1.0, 0.0)) <= 1e-8);
    CHECK(min_eigenvalue(ph.V) >= -1e-8);
  }
}

TEST_CASE("a single reflecting element leaves only the slack to optimize") {
  SystemConfig c = default_config();
  c.irs_sizes = {1};
  const Instance inst = sample_instance(c, 58);
  Rng rng(59);
  const ComplexVector v = ComplexVector::Ones(1);
  const Solution s0 = initial_point(inst, v, 0.5);
  const PhaseIterate ph = solve_phase_step(inst, s0.W, s0.Z, v, 5e-4, 1e-4, {});
  REQUIRE(ph.accepted);
  CHECK(std::abs(ph.V(0, 0) - cd(1.0, 0.0)) <= 1e-12);
  CHECK(ph.sum_rate == doctest::Approx(sum_rate(inst.channels, s0)).epsilon(1e-9));
}
