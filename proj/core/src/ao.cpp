#include "irsguard/ao.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "irsguard/beamforming.hpp"
#include "irsguard/errors.hpp"
#include "irsguard/phase.hpp"
#include "irsguard/system_model.hpp"
#include "irsguard/tolerances.hpp"

namespace irsguard {

AoOptions AoOptions::from_config(const SystemConfig& c) {
  AoOptions o;
  o.rho = c.rho;
  o.eps_conv = c.eps_conv;
  o.max_iter = c.max_iter;
  o.signal_fraction = c.init_signal_fraction;
  o.rank_tol = c.rank_tol;
  o.rho_decrease = c.rho_decrease;
  o.solver = c.solver;
  return o;
}

ComplexVector random_phases(int m, Rng& rng) {
  ComplexVector v(m);
  for (int i = 0; i < m; ++i) v(i) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));
  return v;
}

AoTrace run_ao(const Instance& inst, const AoOptions& options, Rng& rng) {
  return run_ao_from(inst, options, random_phases(inst.channels.m(), rng));
}

AoTrace run_ao_from(const Instance& inst, const AoOptions& opt, const ComplexVector& v0) {
  using clock = std::chrono::steady_clock;
  const ChannelSet& ch = inst.channels;
  AoTrace tr;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  Solution cur = initial_point(inst, v0, opt.signal_fraction);
  double r_prev = sum_rate(ch, cur);
  {
    AoRecord rec;
    rec.sum_rate = r_prev;
    rec.sum_rate_after_bf = r_prev;
    rec.rho = opt.rho;
    rec.wall_time = elapsed();
    tr.records.push_back(rec);
  }
  double rho = opt.rho;
  int stagnant = 0;
  bool stepped = false;

  for (int t = 1; t <= opt.max_iter; ++t) {
    AoRecord rec;
    rec.iteration = t;
    rec.rho = rho;
    const BeamformingIterate bf = solve_beamforming_step(inst, cur.v, cur.W, cur.Z, opt.solver);
    rec.bf_status = conic::to_string(bf.status);
    if (!bf.accepted) {
      tr.aborted = true;
      tr.message = bf.message;
      break;
    }
    Solution next = cur;
    next.W = bf.W;
    next.Z = bf.Z;
    rec.sum_rate_after_bf = bf.sum_rate;
    rec.bf_surrogate = bf.surrogate;
    rec.raw_rank_one = bf.raw_rank_one;

    const PhaseIterate ph = solve_phase_step(inst, next.W, next.Z, next.v, rho, opt.rank_tol, opt.solver);
    rec.phase_status = conic::to_string(ph.status);
    if (ph.accepted) {
      rec.phase_surrogate = ph.surrogate;
      rec.rank_gap = ph.gap;
      rec.rank_gap_rel = ph.spectral > 0.0 ? ph.gap / ph.spectral : 0.0;
      rec.modulus_error = ph.modulus_error;
      // keep the old phases if the extracted ones lose rate
      if (ph.sum_rate >= bf.sum_rate - Tolerances::divergence_guard) {
        next.v = ph.v;
        next.V = ph.V;
      }
      tr.final_rank_gap_rel = rec.rank_gap_rel;
      tr.final_modulus_error = ph.modulus_error;
      if (!ph.rank_ok) {
        if (++stagnant >= 5 && opt.rho_decrease) {
          rho *= 0.5;
          stagnant = 0;
        }
      } else {
        stagnant = 0;
      }
    } else {
      rec.phase_status += " (kept previous phases)";
    }
    const double r_new = sum_rate(ch, next);
    rec.sum_rate = r_new;
    rec.wall_time = elapsed();
    if (r_new < r_prev - Tolerances::divergence_guard) {
      tr.diverged = true;
      tr.message = "sum-rate decreased; step rejected";
      tr.records.push_back(rec);
      break;
    }
    cur = next;
    stepped = true;
    tr.records.push_back(rec);
    tr.iterations = t;
    const double rel = r_prev > 0.0 ? (r_new - r_prev) / r_prev : (r_new - r_prev);
    r_prev = r_new;
    if (rel <= opt.eps_conv) {
      tr.converged = true;
      break;
    }
  }

  if (opt.final_polish && stepped && !tr.aborted) {
    // the last phase update may leave the leakage LMIs marginally violated
    // when V is only numerically rank one; a beamforming step at the final
    // phases restores certified feasibility and cannot reduce the sum-rate
    const BeamformingIterate bf = solve_beamforming_step(inst, cur.v, cur.W, cur.Z, opt.solver);
    if (bf.accepted) {
      cur.W = bf.W;
      cur.Z = bf.Z;
      AoRecord rec;
      rec.iteration = tr.iterations + 1;
      rec.sum_rate = bf.sum_rate;
      rec.sum_rate_after_bf = bf.sum_rate;
      rec.bf_surrogate = bf.surrogate;
      rec.bf_status = conic::to_string(bf.status);
      rec.phase_status = "skipped";
      rec.rank_gap_rel = tr.final_rank_gap_rel;
      rec.rho = rho;
      rec.raw_rank_one = bf.raw_rank_one;
      rec.wall_time = elapsed();
      tr.records.push_back(rec);
    } else {
      tr.message = "final beamforming step failed: " + bf.message;
    }
  }
  tr.solution = cur;
  return tr;
}

StationarityReport stationarity_report(const AoTrace& trace, const Instance& inst, const AoOptions& opt,
                                       double threshold) {
  StationarityReport rep;
  rep.threshold = threshold;
  const Solution& s = trace.solution;
  const BeamformingIterate bf = solve_beamforming_step(inst, s.v, s.W, s.Z, opt.solver);
  rep.beamforming_improvement = bf.accepted ? bf.surrogate_ref - bf.surrogate : INFINITY;
  const PhaseIterate ph = solve_phase_step(inst, s.W, s.Z, s.v, opt.rho, opt.rank_tol, opt.solver);
  rep.phase_improvement = ph.accepted ? ph.surrogate_ref - ph.surrogate : INFINITY;
  rep.stationary = rep.beamforming_improvement <= threshold && rep.phase_improvement <= threshold;
  return rep;
}

}  // namespace irsguard
