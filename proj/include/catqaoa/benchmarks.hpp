/**
 * benchmarks.hpp
 *
 * End-to-end benchmark drivers shared by the command-line tool and the
 * release gate: the pulsed-gate fidelity report, the two-qubit exact-cover
 * success table on the master-equation backend, and the seeded MaxCut sweep
 * comparing encoded-cat and standard-qubit replay against the ideal
 * optimizer.
 */

#ifndef _catqaoa_benchmarks_hpp_
#define _catqaoa_benchmarks_hpp_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "catqaoa/gates.hpp"
#include "catqaoa/lindblad_circuit.hpp"
#include "catqaoa/noise_library.hpp"
#include "catqaoa/qaoa.hpp"

namespace catqaoa {

//------------------------------------------------------------------------------
// pulsed gate fidelity report
//------------------------------------------------------------------------------

struct GateReportConfig {
  KnrParams params;
  int dim = 20;
  double kappa = 1.0 / 1500.0;
  int n_angles = 20;  // uniform in [0, pi], endpoints included
  IntegratorConfig integ;
  int n_threads = 0;
};

struct GateFidelityRow {
  GateKind kind = GateKind::RZ;
  std::vector<double> angles;
  std::vector<double> lossless;  // average gate fidelity per angle, kappa = 0
  std::vector<double> lossy;     // same with photon loss at the configured rate
  double mean_lossless = 0.0;
  double mean_lossy = 0.0;
  double min_lossy = 1.0;
};

namespace detail {

inline PulseSchedule gate_report_schedule(GateKind kind, double theta,
                                          const KnrParams &p,
                                          const FockSpace &space,
                                          const RxCalibrationTable &rx_table) {
  switch (kind) {
    case GateKind::RZ: return rz_schedule(theta, p, space);
    case GateKind::RX: return rx_schedule(rx_table.delta0_for(theta), p, space);
    case GateKind::RY: return ry_schedule(theta, p, space);
    case GateKind::RZZ: return rzz_schedule(theta, p, space);
  }
  throw std::invalid_argument("gate_report_schedule: bad kind");
}

}  // namespace detail

// Sweeps each gate over uniformly spaced angles in [0, pi] and scores the
// extracted logical channel against the requested rotation (for X rotations
// the detuning comes from the inverted calibration table, so calibration
// error lands in the reported fidelity).  The lossy channel uses the
// first-order jump expansion throughout, matching the library builder.
inline std::vector<GateFidelityRow> gate_fidelity_report(
    const RxCalibrationTable &rx_table, const GateReportConfig &cfg = {}) {
  if (cfg.n_angles < 2)
    throw std::invalid_argument("gate_fidelity_report: n_angles < 2");
  const FockSpace one(cfg.dim, 1);
  const FockSpace two(cfg.dim, 2);
  const CatBasis cb = cat_basis(one, cfg.params.alpha());
  const MatrixXcd frame1 = logical_frame(cb);
  const MatrixXcd frame2 = logical_frame(cb, 2);

  std::vector<GateFidelityRow> rows;
  for (GateKind kind :
       {GateKind::RZ, GateKind::RX, GateKind::RY, GateKind::RZZ}) {
    const FockSpace &space = gate_arity(kind) == 2 ? two : one;
    const MatrixXcd &frame = gate_arity(kind) == 2 ? frame2 : frame1;
    GateFidelityRow row;
    row.kind = kind;
    for (int j = 0; j < cfg.n_angles; ++j) {
      const double theta = M_PI * double(j) / double(cfg.n_angles - 1);
      const MatrixXcd target = target_unitary(kind, theta);

      PulseSchedule sched =
          detail::gate_report_schedule(kind, theta, cfg.params, space, rx_table);
      const PauliChannel free =
          subspace_channel(sched, frame, cfg.integ, cfg.n_threads);
      add_photon_loss(sched, cfg.kappa);
      const PauliChannel lossy =
          subspace_channel(sched, frame, cfg.integ, cfg.n_threads,
                           ChannelMethod::jump_expansion);

      row.angles.push_back(theta);
      row.lossless.push_back(average_gate_fidelity(free, target));
      row.lossy.push_back(average_gate_fidelity(lossy, target));
    }
    for (double f : row.lossless) row.mean_lossless += f;
    for (double f : row.lossy) {
      row.mean_lossy += f;
      row.min_lossy = std::min(row.min_lossy, f);
    }
    row.mean_lossless /= double(cfg.n_angles);
    row.mean_lossy /= double(cfg.n_angles);
    rows.push_back(std::move(row));
  }
  return rows;
}

//------------------------------------------------------------------------------
// two-qubit exact-cover success table
//------------------------------------------------------------------------------

// two elements, one subset covering both and one covering only the first:
// the unique optimum picks the two-element subset alone
inline IsingProblem toy_cover_problem() {
  return encode_exact_cover(2, {{0, 1}, {0}});
}

struct ToyRowSpec {
  InputState input = InputState::plus;
  Mixer mixer = Mixer::X;
  int p = 1;
};

inline std::vector<ToyRowSpec> default_toy_rows() {
  return {{InputState::plus, Mixer::X, 1},   {InputState::plus, Mixer::X, 2},
          {InputState::plus_i, Mixer::X, 1}, {InputState::plus_i, Mixer::Y, 1},
          {InputState::plus_i, Mixer::Y, 2}, {InputState::plus, Mixer::Y, 1}};
}

struct ToyTableConfig {
  KnrParams params;
  int dim = 20;
  double kappa = 1.0 / 1500.0;
  IntegratorConfig integ;
  const RxCalibrationTable *rx_table = nullptr;  // required for X mixers
  bool merge_layers = true;
  GridSpec grid;           // depth-one angle selection
  InterpOptions interp;    // deeper levels
  bool run_lossless = true;
  bool run_lossy = true;
};

struct ToySuccessRow {
  ToyRowSpec spec;
  QaoaParams params;              // cost-expectation optimum on the ideal backend
  double ideal = 0.0;             // statevector success at those angles
  double pulsed_lossless = 0.0;   // master-equation backend, kappa = 0
  double pulsed_lossy = 0.0;
  double subspace_trace_lossy = 1.0;
};

// Optimizes the toy problem per row on the ideal backend, then replays the
// best angles through the time-domain pulse simulation with and without
// photon loss.  Success is the raw probability mass on the optimal
// assignment, leakage included.
inline std::vector<ToySuccessRow> toy_success_table(
    const ToyTableConfig &cfg,
    const std::vector<ToyRowSpec> &specs = default_toy_rows()) {
  const IsingProblem prob = toy_cover_problem();
  const BruteForceResult bf = brute_force_solve(prob);

  std::vector<ToySuccessRow> rows;
  for (const ToyRowSpec &spec : specs) {
    ToySuccessRow row;
    row.spec = spec;
    if (spec.p == 1) {
      row.params = optimize_grid(prob, spec.mixer, spec.input, cfg.grid).params;
    } else {
      InterpOptions opt = cfg.interp;
      opt.p_max = spec.p;
      opt.grid = cfg.grid;
      row.params =
          optimize_interp(prob, spec.mixer, spec.input, opt).back().params;
    }
    row.ideal = evaluate(prob, row.params, spec.mixer, spec.input,
                         Backend::ideal, nullptr, bf.solutions)
                    .success_probability;

    const std::vector<CircuitGate> gates = compile(prob, row.params, spec.mixer);
    LindbladCircuitConfig lcfg;
    lcfg.params = cfg.params;
    lcfg.dim = cfg.dim;
    lcfg.integ = cfg.integ;
    lcfg.rx_table = cfg.rx_table;
    lcfg.merge_single_mode_layers = cfg.merge_layers;
    if (cfg.run_lossless) {
      lcfg.kappa = 0.0;
      const LindbladRunResult r =
          run_circuit_lindblad(gates, prob.n, spec.input, lcfg);
      row.pulsed_lossless = success_probability(r.dist.probs, bf.solutions);
    }
    if (cfg.run_lossy) {
      lcfg.kappa = cfg.kappa;
      const LindbladRunResult r =
          run_circuit_lindblad(gates, prob.n, spec.input, lcfg);
      row.pulsed_lossy = success_probability(r.dist.probs, bf.solutions);
      row.subspace_trace_lossy = r.subspace_trace;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

//------------------------------------------------------------------------------
// seeded MaxCut sweep
//------------------------------------------------------------------------------

struct SweepConfig {
  int n_vertices = 8;
  double edge_prob = 0.5;
  int p_max = 5;
  Mixer mixer = Mixer::X;
  InputState input = InputState::plus;
  InterpOptions interp;
  const NoiseLibrary *cat_lib = nullptr;
  const NoiseLibrary *standard_lib = nullptr;
};

struct SweepScore {
  double ratio = 0.0;    // expectation / best cut value
  double success = 0.0;  // probability mass on the optimal assignments
  double trace = 1.0;
};

struct SweepInstanceResult {
  MaxCutInstance instance;
  std::vector<InterpLevel> levels;       // ideal optimum per depth, 1..p_max
  std::vector<SweepScore> ideal;         // scored at those angles
  std::vector<SweepScore> cat;           // empty when no cat library given
  std::vector<SweepScore> standard_;     // empty when no standard library given
};

namespace detail {

inline SweepScore sweep_score(const IsingProblem &prob,
                              const MaxCutInstance &inst,
                              const QaoaParams &params, const SweepConfig &cfg,
                              Backend backend, const NoiseLibrary *lib) {
  const QaoaResult r = evaluate(prob, params, cfg.mixer, cfg.input, backend,
                                lib, inst.solutions);
  SweepScore s;
  s.ratio = approximation_ratio(r.expectation, inst.c_max);
  s.success = r.success_probability;
  s.trace = r.trace;
  return s;
}

}  // namespace detail

// One seeded instance: optimize every depth on the ideal backend, then score
// the same angles on each requested noisy replay backend.
inline SweepInstanceResult sweep_instance(std::uint64_t seed,
                                          const SweepConfig &cfg) {
  SweepInstanceResult out;
  out.instance = make_maxcut_instance(cfg.n_vertices, cfg.edge_prob, seed);
  const IsingProblem prob = maxcut_hamiltonian(out.instance.graph);

  InterpOptions opt = cfg.interp;
  opt.p_max = cfg.p_max;
  out.levels = optimize_interp(prob, cfg.mixer, cfg.input, opt);

  for (const InterpLevel &lvl : out.levels) {
    out.ideal.push_back(detail::sweep_score(prob, out.instance, lvl.params, cfg,
                                            Backend::ideal, nullptr));
    if (cfg.cat_lib)
      out.cat.push_back(detail::sweep_score(prob, out.instance, lvl.params, cfg,
                                            Backend::cat, cfg.cat_lib));
    if (cfg.standard_lib)
      out.standard_.push_back(detail::sweep_score(
          prob, out.instance, lvl.params, cfg, Backend::standard,
          cfg.standard_lib));
  }
  return out;
}

}  // namespace catqaoa

#endif
