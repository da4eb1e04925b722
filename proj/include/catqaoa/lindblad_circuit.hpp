/**
 * lindblad_circuit.hpp
 *
 * Executes a compiled rotation-gate circuit directly on the cat-qubit modes:
 * every gate becomes its pulse schedule, run back to back on the full Fock
 * space, as a closed-system ket when lossless or as a master equation with
 * photon loss otherwise.  The result is projected onto the logical cat
 * subspace and measured there.
 *
 * Angles are first folded into the pulse ranges: Z-type and Y rotations take
 * a signed drive in (-pi, pi]; X rotations are calibrated for [0, pi] only,
 * so larger angles split into a pi pulse plus the remainder.  Single-mode
 * gates of the same kind acting on distinct modes commute exactly, so a
 * mixer layer runs as one merged schedule instead of leaving the other
 * modes idling in the loss channel.
 */

#ifndef _catqaoa_lindblad_circuit_hpp_
#define _catqaoa_lindblad_circuit_hpp_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catqaoa/dynamics.hpp"
#include "catqaoa/fock.hpp"
#include "catqaoa/gates.hpp"
#include "catqaoa/qaoa.hpp"
#include "catqaoa/qubit_sim.hpp"

namespace catqaoa {

struct LindbladCircuitConfig {
  KnrParams params;
  int dim = 20;        // Fock levels per mode
  double kappa = 0.0;  // photon loss rate; 0 selects the ket path
  IntegratorConfig integ;
  const RxCalibrationTable *rx_table = nullptr;  // required for X rotations
  bool merge_single_mode_layers = true;
};

// Sub-angles actually pulsed for a requested rotation.  Zero rotations play
// no pulse at all, so they return an empty list.
inline std::vector<double> physical_angles(GateKind kind, double angle) {
  double r = std::fmod(angle, 2.0 * M_PI);
  if (kind == GateKind::RX) {
    if (r < 0.0) r += 2.0 * M_PI;
    if (r < 1e-12) return {};
    if (r <= M_PI) return {r};
    if (r - M_PI < 1e-12) return {M_PI};
    return {M_PI, r - M_PI};
  }
  if (r > M_PI) r -= 2.0 * M_PI;
  else if (r <= -M_PI) r += 2.0 * M_PI;
  if (std::abs(r) < 1e-12) return {};
  return {r};
}

struct LindbladRunResult {
  QubitState logical;         // projected logical density, not renormalized
  MeasuredDistribution dist;  // computational-basis outcome distribution
  double subspace_trace = 1.0;
  double total_time = 0.0;    // summed schedule durations
  long n_schedules = 0;
};

namespace detail {

// one schedule worth of simultaneous same-kind pulses on distinct modes
struct PulseGroup {
  GateKind kind = GateKind::RZ;
  std::vector<int> modes;
  std::vector<double> angles;  // pulsed sub-angle per mode
};

inline bool group_has_mode(const PulseGroup &g, int mode) {
  for (int m : g.modes)
    if (m == mode) return true;
  return false;
}

// Folds the gate list into pulse groups.  Consecutive single-mode gates of
// one kind on distinct modes form stages: stage s carries every mode whose
// folded rotation needs an s-th pulse.
inline std::vector<PulseGroup> plan_groups(const std::vector<CircuitGate> &gates,
                                           int n_modes, bool merge) {
  std::vector<PulseGroup> plan;
  size_t i = 0;
  while (i < gates.size()) {
    const CircuitGate &g = gates[size_t(i)];
    for (int t : g.targets)
      if (t < 0 || t >= n_modes)
        throw std::invalid_argument("run_circuit_lindblad: target out of range");
    if (g.kind == GateKind::RZZ) {
      if (n_modes != 2 || g.targets != std::vector<int>{0, 1})
        throw std::invalid_argument(
            "run_circuit_lindblad: two-mode coupler only supported on modes "
            "{0, 1}");
      for (double sub : physical_angles(g.kind, g.angle))
        plan.push_back({g.kind, {0, 1}, {sub}});
      ++i;
      continue;
    }
    // collect the run of mergeable single-mode gates
    std::vector<const CircuitGate *> run{&g};
    size_t j = i + 1;
    while (merge && j < gates.size()) {
      const CircuitGate &nx = gates[j];
      if (nx.kind != g.kind || nx.targets.size() != 1) break;
      bool dup = false;
      for (const CircuitGate *prev : run)
        if (prev->targets[0] == nx.targets[0]) dup = true;
      if (dup) break;
      run.push_back(&nx);
      ++j;
    }
    std::vector<std::vector<double>> subs;
    size_t n_stages = 0;
    for (const CircuitGate *cg : run) {
      subs.push_back(physical_angles(cg->kind, cg->angle));
      n_stages = std::max(n_stages, subs.back().size());
    }
    for (size_t s = 0; s < n_stages; ++s) {
      PulseGroup pg;
      pg.kind = g.kind;
      for (size_t r = 0; r < run.size(); ++r)
        if (s < subs[r].size()) {
          pg.modes.push_back(run[r]->targets[0]);
          pg.angles.push_back(subs[r][s]);
        }
      plan.push_back(std::move(pg));
    }
    i = j;
  }
  return plan;
}

inline PulseSchedule group_schedule(const PulseGroup &g, const FockSpace &space,
                                    const LindbladCircuitConfig &cfg) {
  if (g.kind == GateKind::RZZ)
    return rzz_schedule(g.angles[0], cfg.params, space);
  const double T = default_gate_time(g.kind, cfg.params);
  PulseSchedule sched;
  sched.space = space;
  sched.t_total = T;
  sched.add_term(all_mode_stabilizers(space, cfg.params),
                 constant_envelope(1.0, 0.0, T));
  for (size_t k = 0; k < g.modes.size(); ++k) {
    const int mode = g.modes[k];
    const double theta = g.angles[k];
    switch (g.kind) {
      case GateKind::RZ:
        append_rz_drive(sched, theta, cfg.params, T, mode);
        break;
      case GateKind::RX: {
        if (!cfg.rx_table)
          throw std::invalid_argument(
              "run_circuit_lindblad: X rotations need a calibration table");
        const double th = std::min(theta, cfg.rx_table->max_theta());
        append_rx_drive(sched, cfg.rx_table->delta0_for(th), cfg.params, T, mode);
        break;
      }
      case GateKind::RY:
        append_ry_drive(sched, theta, cfg.params, kRyDriveSign, mode);
        break;
      default:
        throw std::invalid_argument("group_schedule: bad kind");
    }
  }
  return sched;
}

}  // namespace detail

// Product of identical per-mode logical states, mode 0 leftmost.
inline FockKet circuit_input_ket(const CatBasis &cb, int n_modes,
                                 InputState input) {
  if (n_modes < 1)
    throw std::invalid_argument("circuit_input_ket: no modes");
  const cxd up = (input == InputState::plus_i) ? cxd(0, 1) : cxd(1, 0);
  FockKet single((cb.ket0.amplitudes + up * cb.ket1.amplitudes) / std::sqrt(2.0),
                 cb.space);
  FockKet out = single;
  for (int m = 1; m < n_modes; ++m) out = kron(out, single);
  return out;
}

inline LindbladRunResult run_circuit_lindblad(
    const std::vector<CircuitGate> &gates, int n_modes, InputState input,
    const LindbladCircuitConfig &cfg) {
  if (n_modes < 1)
    throw std::invalid_argument("run_circuit_lindblad: no modes");
  const FockSpace space(cfg.dim, n_modes);
  const Eigen::Index total = space.size();
  if (cfg.kappa > 0.0 ? total > 1024 : total > 8192)
    throw std::invalid_argument("run_circuit_lindblad: space too large (" +
                                std::to_string(total) + " levels)");
  const CatBasis cb = cat_basis(FockSpace(cfg.dim, 1), cfg.params.alpha());
  const MatrixXcd frame = logical_frame(cb, n_modes);
  const std::vector<detail::PulseGroup> plan =
      detail::plan_groups(gates, n_modes, cfg.merge_single_mode_layers);

  LindbladRunResult out;
  MatrixXcd rho_logical;
  if (cfg.kappa <= 0.0) {
    FockKet psi = circuit_input_ket(cb, n_modes, input);
    for (const detail::PulseGroup &g : plan) {
      const PulseSchedule sched = detail::group_schedule(g, space, cfg);
      psi = evolve_ket(sched, psi, cfg.integ);
      out.total_time += sched.t_total;
      ++out.n_schedules;
    }
    const VectorXcd logical_amps = frame.adjoint() * psi.amplitudes;
    rho_logical = logical_amps * logical_amps.adjoint();
  } else {
    const FockKet psi0 = circuit_input_ket(cb, n_modes, input);
    MatrixXcd rho = psi0.amplitudes * psi0.amplitudes.adjoint();
    for (const detail::PulseGroup &g : plan) {
      PulseSchedule sched = detail::group_schedule(g, space, cfg);
      add_photon_loss(sched, cfg.kappa);
      rho = evolve_density(sched, rho, cfg.integ);
      out.total_time += sched.t_total;
      ++out.n_schedules;
    }
    rho_logical = frame.adjoint() * rho * frame;
  }

  out.logical.n_qubits = n_modes;
  out.logical.rho = std::move(rho_logical);
  out.subspace_trace = out.logical.rho.trace().real();
  out.dist = measure_distribution(out.logical);
  return out;
}

}  // namespace catqaoa

#endif
