// Writes beamforming and phase subproblems in the plain-text dump format
// together with the objective found by the built-in solver, for comparison
// against an external conic solver.
//
//   conic_dump_cases DIR
#include <filesystem>
#include <fstream>
#include <iostream>

#include "irsguard/ao.hpp"
#include "irsguard/beamforming.hpp"
#include "irsguard/channel.hpp"
#include "irsguard/phase.hpp"

using namespace irsguard;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: conic_dump_cases DIR\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "cases.txt");
  index.precision(17);
  int id = 0;
  auto emit = [&](const conic::ConicProblem& p, const std::string& kind) {
    const conic::ConicSolution s = conic::solve(p);
    const std::string name = "case" + std::to_string(id++) + ".txt";
    std::ofstream os(dir / name);
    conic::dump(p, os);
    index << name << ' ' << kind << ' ' << conic::to_string(s.status) << ' ' << s.objective << '\n';
  };
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SystemConfig cfg = default_config();
    cfg.power_watts = dbm_to_watts(20.0);
    cfg.irs_distances = {50.0};
    const Instance inst = sample_instance(cfg, seed);
    Rng rng(seed + 100);
    const ComplexVector v = random_phases(inst.channels.m(), rng);
    const Solution s0 = initial_point(inst, v, cfg.init_signal_fraction);
    emit(build_subproblem(inst, v, s0.W, s0.Z).problem, "beamforming");
    const BeamformingIterate bf = solve_beamforming_step(inst, v, s0.W, s0.Z, cfg.solver);
    emit(build_phase_subproblem(inst, bf.W, bf.Z, v * v.adjoint(), cfg.rho).problem, "phase");
  }
  return 0;
}
