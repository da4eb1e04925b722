/**
 * noise_library.hpp
 *
 * Binned per-gate noise channels for circuit replay.  Each entry factors a
 * simulated gate channel into the exact target unitary followed by a Kraus
 * noise family, indexed by gate kind and rotation angle.  Builders cover the
 * cat-qubit device (time-domain simulation with photon loss) and a standard
 * qubit device with a matched relaxation rate.
 *
 * File format (JSON): {"format", "config_hash", "entries": [{"kind", "angle",
 * "source", "leakage", "metadata": {alpha, kappa, t_gate, dim, gamma1},
 * "kraus": [op][row][col] = [re, im]}]}.  Kraus matrices are row-major.
 */

#ifndef _catqaoa_noise_library_hpp_
#define _catqaoa_noise_library_hpp_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "catqaoa/gates.hpp"
#include "catqaoa/tomography.hpp"

namespace catqaoa {

struct NoiseEntryMeta {
  double alpha = 0.0;   // cat amplitude (0 for standard qubits)
  double kappa = 0.0;   // photon loss rate (0 for standard qubits)
  double t_gate = 0.0;
  int dim = 0;          // per-mode truncation used to build the entry
  double gamma1 = 0.0;  // qubit relaxation rate (0 for cat entries)
};

struct NoiseLibraryEntry {
  GateKind kind = GateKind::RX;
  double angle = 0.0;   // bin center, in [0, pi]
  KrausSet noise;       // composes after the exact unitary
  double leakage = 0.0; // trace lost out of the qubit subspace
  std::string source;   // "cat" or "standard"
  NoiseEntryMeta meta;
};

//------------------------------------------------------------------------------
// library container with nearest-bin lookup
//------------------------------------------------------------------------------

struct NoiseLibrary {
  std::vector<NoiseLibraryEntry> entries;  // sorted by (kind, angle)
  std::string config_hash;

  // Folds an arbitrary rotation angle into the binned range [0, pi]: reduce
  // modulo 2 pi, then mirror, since a rotation by angle in (pi, 2 pi) equals
  // the opposite rotation by 2 pi - angle up to global phase.
  static double reduce_angle(double angle) {
    double r = std::fmod(angle, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    if (r > M_PI) r = 2.0 * M_PI - r;
    return r;
  }

  void sort() {
    std::sort(entries.begin(), entries.end(),
              [](const NoiseLibraryEntry &a, const NoiseLibraryEntry &b) {
                if (a.kind != b.kind) return int(a.kind) < int(b.kind);
                return a.angle < b.angle;
              });
  }

  // Closest bin of the given kind, or nullptr when the kind has no entries.
  const NoiseLibraryEntry *find(GateKind kind, double angle) const {
    const double r = reduce_angle(angle);
    const NoiseLibraryEntry *best = nullptr;
    double best_gap = 0.0;
    for (const NoiseLibraryEntry &e : entries) {
      if (e.kind != kind) continue;
      const double gap = std::abs(e.angle - r);
      if (!best || gap < best_gap) {
        best = &e;
        best_gap = gap;
      }
    }
    return best;
  }

  const NoiseLibraryEntry &nearest(GateKind kind, double angle) const {
    const NoiseLibraryEntry *e = find(kind, angle);
    if (!e)
      throw std::out_of_range(std::string("noise library: no entries for ") +
                              gate_name(kind));
    return *e;
  }

  long count(GateKind kind) const {
    long n = 0;
    for (const NoiseLibraryEntry &e : entries)
      if (e.kind == kind) ++n;
    return n;
  }
};

namespace detail {

// Extracts the noise factor of a simulated channel relative to the exact
// target unitary and packages it as a library entry.  Throws, naming the bin,
// if the factor fails the complete-positivity or completeness checks.
inline NoiseLibraryEntry make_noise_entry(GateKind kind, double angle,
                                          const PauliChannel &ch,
                                          const MatrixXcd &ideal,
                                          const char *source,
                                          const NoiseEntryMeta &meta) {
  NoiseLibraryEntry e;
  e.kind = kind;
  e.angle = angle;
  e.source = source;
  e.meta = meta;
  e.leakage = channel_leakage(ch);
  try {
    const PauliTransferMatrix r_noise =
        noise_ptm(ptm_from_channel(ch), unitary_ptm(ideal));
    e.noise = choi_to_kraus(ptm_to_choi(r_noise));
    const Eigen::Index d = ideal.rows();
    const MatrixXcd gap =
        MatrixXcd::Identity(d, d) - kraus_completeness(e.noise, d);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (gap + gap.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-6)
      throw std::runtime_error("Kraus completeness exceeds identity by " +
                               std::to_string(-es.eigenvalues().minCoeff()));
  } catch (const std::exception &err) {
    throw std::runtime_error(std::string(gate_name(kind)) + " bin at angle " +
                             std::to_string(angle) + ": " + err.what());
  }
  return e;
}

}  // namespace detail

//------------------------------------------------------------------------------
// builders
//------------------------------------------------------------------------------

struct CatLibraryConfig {
  KnrParams params{};
  int dim = 20;
  double kappa = 1.0 / 1500.0;
  int n_bins = 180;      // rx bins over [0, pi]; rzz keeps a single bin at 0
  int jump_nodes = 16;   // quadrature order of the jump expansion
  IntegratorConfig integ{};
  int n_threads = 0;
};

inline NoiseLibrary build_cat_library(const CatLibraryConfig &cfg,
                                      const RxCalibrationTable &table) {
  if (cfg.n_bins < 2)
    throw std::invalid_argument("build_cat_library: n_bins < 2");
  if (cfg.kappa <= 0.0)
    throw std::invalid_argument("build_cat_library: kappa must be positive");
  NoiseLibrary lib;
  const FockSpace one{cfg.dim, 1};
  const CatBasis cb = cat_basis(one, cfg.params.alpha());
  const MatrixXcd frame1 = logical_frame(cb);

  NoiseEntryMeta meta;
  meta.alpha = cfg.params.alpha();
  meta.kappa = cfg.kappa;
  meta.dim = cfg.dim;

  meta.t_gate = default_gate_time(GateKind::RX, cfg.params);
  std::vector<NoiseLibraryEntry> rx_entries(size_t(cfg.n_bins));
  parallel_for(
      cfg.n_bins,
      [&](long i) {
        const double theta = M_PI * double(i) / double(cfg.n_bins - 1);
        PulseSchedule sched =
            rx_schedule(table.delta0_for(std::min(theta, table.max_theta())),
                        cfg.params, one);
        add_photon_loss(sched, cfg.kappa);
        const PauliChannel ch =
            subspace_channel_jump(sched, frame1, cfg.integ, cfg.jump_nodes);
        rx_entries[size_t(i)] = detail::make_noise_entry(
            GateKind::RX, theta, ch, rx_gate(theta), "cat", meta);
      },
      cfg.n_threads);
  for (NoiseLibraryEntry &e : rx_entries) lib.entries.push_back(std::move(e));

  meta.t_gate = default_gate_time(GateKind::RZZ, cfg.params);
  const FockSpace two{cfg.dim, 2};
  PulseSchedule sched = rzz_schedule(0.0, cfg.params, two);
  add_photon_loss(sched, cfg.kappa);
  const PauliChannel ch = subspace_channel_jump(sched, logical_frame(cb, 2),
                                                cfg.integ, cfg.jump_nodes,
                                                cfg.n_threads);
  lib.entries.push_back(detail::make_noise_entry(GateKind::RZZ, 0.0, ch,
                                                 rzz_gate(0.0), "cat", meta));
  lib.sort();
  return lib;
}

struct StandardLibraryConfig {
  double fbar_rx = 0.0;   // cat-device average fidelity to match, rx family
  double fbar_rzz = 0.0;  // same for the rzz family
  double t_rx = 10.0;
  double t_rzz = 2.0;
  int n_bins = 180;       // per gate kind, over [0, pi]
  IntegratorConfig integ{};
  int n_threads = 0;
};

inline NoiseLibrary build_standard_library(const StandardLibraryConfig &cfg) {
  if (cfg.n_bins < 2)
    throw std::invalid_argument("build_standard_library: n_bins < 2");
  NoiseLibrary lib;
  const struct {
    GateKind kind;
    double fbar, t_gate;
  } fams[] = {{GateKind::RX, cfg.fbar_rx, cfg.t_rx},
              {GateKind::RZZ, cfg.fbar_rzz, cfg.t_rzz}};
  for (const auto &fam : fams) {
    const double gamma1 =
        matched_relaxation_rate(fam.fbar, fam.t_gate, gate_arity(fam.kind));
    NoiseEntryMeta meta;
    meta.t_gate = fam.t_gate;
    meta.dim = 2;
    meta.gamma1 = gamma1;
    std::vector<NoiseLibraryEntry> entries(size_t(cfg.n_bins));
    parallel_for(
        cfg.n_bins,
        [&](long i) {
          const double theta = M_PI * double(i) / double(cfg.n_bins - 1);
          const PauliChannel ch = standard_qubit_gate_channel(
              fam.kind, theta, gamma1, fam.t_gate, cfg.integ);
          entries[size_t(i)] = detail::make_noise_entry(
              fam.kind, theta, ch, target_unitary(fam.kind, theta), "standard",
              meta);
        },
        cfg.n_threads);
    for (NoiseLibraryEntry &e : entries) lib.entries.push_back(std::move(e));
  }
  lib.sort();
  return lib;
}

//------------------------------------------------------------------------------
// replay
//------------------------------------------------------------------------------

// Full channel for one replayed gate: the exact requested unitary followed by
// the nearest-bin noise.  Kinds absent from the library replay noiselessly.
inline PauliChannel replay_channel(const NoiseLibrary &lib, GateKind kind,
                                   double angle) {
  const MatrixXcd u = target_unitary(kind, angle);
  const NoiseLibraryEntry *e = lib.find(kind, angle);
  return pauli_channel_from_map(gate_arity(kind), [&](const MatrixXcd &p) {
    const MatrixXcd mid = u * p * u.adjoint();
    return e ? apply_kraus(e->noise, mid) : mid;
  });
}

// Mean fidelity of replayed gates against the exact rotations, sampled at
// evenly spaced angles over [0, pi].
inline double library_average_fidelity(const NoiseLibrary &lib, GateKind kind,
                                       int n_points = 20) {
  if (n_points < 2)
    throw std::invalid_argument("library_average_fidelity: n_points < 2");
  double acc = 0.0;
  for (int j = 0; j < n_points; ++j) {
    const double theta = M_PI * double(j) / double(n_points - 1);
    acc += average_gate_fidelity(replay_channel(lib, kind, theta),
                                 target_unitary(kind, theta));
  }
  return acc / double(n_points);
}

//------------------------------------------------------------------------------
// serialization
//------------------------------------------------------------------------------

inline nlohmann::json to_json(const NoiseLibrary &lib) {
  nlohmann::json root;
  root["format"] = "catqaoa-noise-library-v1";
  root["config_hash"] = lib.config_hash;
  nlohmann::json entries = nlohmann::json::array();
  for (const NoiseLibraryEntry &e : lib.entries) {
    nlohmann::json je;
    je["kind"] = gate_name(e.kind);
    je["angle"] = e.angle;
    je["source"] = e.source;
    je["leakage"] = e.leakage;
    je["metadata"] = {{"alpha", e.meta.alpha},
                      {"kappa", e.meta.kappa},
                      {"t_gate", e.meta.t_gate},
                      {"dim", e.meta.dim},
                      {"gamma1", e.meta.gamma1}};
    nlohmann::json ops = nlohmann::json::array();
    for (const MatrixXcd &a : e.noise.operators) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c)
          row.push_back({a(r, c).real(), a(r, c).imag()});
        rows.push_back(std::move(row));
      }
      ops.push_back(std::move(rows));
    }
    je["kraus"] = std::move(ops);
    entries.push_back(std::move(je));
  }
  root["entries"] = std::move(entries);
  return root;
}

inline NoiseLibrary noise_library_from_json(const nlohmann::json &root) {
  if (root.value("format", "") != "catqaoa-noise-library-v1")
    throw std::runtime_error("noise library: unrecognized format tag");
  NoiseLibrary lib;
  lib.config_hash = root.value("config_hash", "");
  for (const nlohmann::json &je : root.at("entries")) {
    NoiseLibraryEntry e;
    e.kind = gate_kind_from_name(je.at("kind").get<std::string>());
    e.angle = je.at("angle").get<double>();
    e.source = je.at("source").get<std::string>();
    e.leakage = je.at("leakage").get<double>();
    const nlohmann::json &m = je.at("metadata");
    e.meta.alpha = m.at("alpha").get<double>();
    e.meta.kappa = m.at("kappa").get<double>();
    e.meta.t_gate = m.at("t_gate").get<double>();
    e.meta.dim = m.at("dim").get<int>();
    e.meta.gamma1 = m.at("gamma1").get<double>();
    for (const nlohmann::json &rows : je.at("kraus")) {
      const Eigen::Index nr = Eigen::Index(rows.size());
      const Eigen::Index nc = nr > 0 ? Eigen::Index(rows[0].size()) : 0;
      MatrixXcd a(nr, nc);
      for (Eigen::Index r = 0; r < nr; ++r) {
        if (Eigen::Index(rows[size_t(r)].size()) != nc)
          throw std::runtime_error("noise library: ragged Kraus matrix");
        for (Eigen::Index c = 0; c < nc; ++c) {
          const nlohmann::json &z = rows[size_t(r)][size_t(c)];
          a(r, c) = cxd(z.at(0).get<double>(), z.at(1).get<double>());
        }
      }
      e.noise.operators.push_back(std::move(a));
    }
    lib.entries.push_back(std::move(e));
  }
  lib.sort();
  return lib;
}

inline void save_noise_library(const NoiseLibrary &lib,
                               const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(lib).dump(1) << "\n";
}

inline NoiseLibrary load_noise_library(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json root;
  in >> root;
  return noise_library_from_json(root);
}

}  // namespace catqaoa

#endif
