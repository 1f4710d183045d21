#include <benchmark/benchmark.h>

#include "irsguard/ao.hpp"
#include "irsguard/beamforming.hpp"
#include "irsguard/channel.hpp"
#include "irsguard/phase.hpp"

using namespace irsguard;

namespace {

// A fixed instance at the given IRS size plus a feasible starting point.
struct Fixture {
  SystemConfig config;
  Instance inst;
  ComplexVector v;
  Solution start;

  explicit Fixture(int m) {
    config = default_config();
    config.irs_sizes = {m};
    inst = sample_instance(config, 42);
    Rng rng(7);
    v = random_phases(inst.channels.m(), rng);
    start = initial_point(inst, v, config.init_signal_fraction);
  }
};

void BM_BeamformingStep(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  int iterations = 0;
  for (auto _ : state) {
    const BeamformingIterate it = solve_beamforming_step(fx.inst, fx.v, fx.start.W, fx.start.Z, fx.config.solver);
    iterations = it.solver_iterations;
    benchmark::DoNotOptimize(it.surrogate);
  }
  state.counters["newton"] = iterations;
}
BENCHMARK(BM_BeamformingStep)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_PhaseStep(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  const BeamformingIterate bf = solve_beamforming_step(fx.inst, fx.v, fx.start.W, fx.start.Z, fx.config.solver);
  int iterations = 0;
  for (auto _ : state) {
    const PhaseIterate it = solve_phase_step(fx.inst, bf.W, bf.Z, fx.v, fx.config.rho, fx.config.rank_tol,
                                             fx.config.solver);
    iterations = it.solver_iterations;
    benchmark::DoNotOptimize(it.surrogate);
  }
  state.counters["newton"] = iterations;
}
BENCHMARK(BM_PhaseStep)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_AlternatingOptimization(benchmark::State& state) {
  const Fixture fx(4);
  const AoOptions options = AoOptions::from_config(fx.config);
  for (auto _ : state) {
    const AoTrace trace = run_ao_from(fx.inst, options, fx.v);
    benchmark::DoNotOptimize(trace.iterations);
  }
}
BENCHMARK(BM_AlternatingOptimization)->Unit(benchmark::kMillisecond);

void BM_SemidefiniteSolve(benchmark::State& state) {
  // largest eigenvalue of a random Hermitian matrix via min -Tr(CW), Tr W <= 1
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = complex_gaussian(rng);
  const Hermitian c(ComplexMatrix(a + a.adjoint()));
  conic::ConicProblem p;
  const conic::HermitianLayout w = conic::embed_hermitian(n, p.add_variables(n * n));
  w.linear_functional(c, -1.0, p.objective);
  conic::LinearConstraint tr;
  w.linear_functional(ComplexMatrix::Identity(n, n), 1.0, tr.row);
  tr.rhs = 1.0;
  p.inequalities.push_back(tr);
  conic::PsdConstraint f("w", n);
  f.constant = ComplexMatrix::Zero(n, n);
  std::vector<int> cols;
  for (int i = 0; i < n; ++i) cols.push_back(f.add_vector(ComplexVector::Unit(n, i)));
  w.add_congruence(f, cols, 1.0);
  p.psd.push_back(f);
  for (auto _ : state) {
    const conic::ConicSolution s = conic::solve(p);
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_SemidefiniteSolve)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
