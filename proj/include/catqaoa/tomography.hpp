/**
 * tomography.hpp
 *
 * Channel representations on the logical subspace: Pauli transfer matrices,
 * the noise factor of a gate channel, Choi and Kraus forms with CP checks,
 * and the relaxation-matched standard-qubit gate channels.
 *
 * Conventions: Pauli order follows pauli_basis; the Choi matrix is normalized
 * to unit trace for trace-preserving channels; unvectorization is column
 * major, first tensor factor = input, second = output.
 */

#ifndef _catqaoa_tomography_hpp_
#define _catqaoa_tomography_hpp_

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catqaoa/gates.hpp"
#include "catqaoa/pauli.hpp"

namespace catqaoa {

struct PauliTransferMatrix {
  Eigen::MatrixXd entries;  // d^2 x d^2, rows = output Pauli, cols = input
  int n_qubits = 1;

  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }
};

// R_ij = (1/d) Tr[P_i E(P_j)] from a sampled channel.  Entries of a physical
// channel are real and bounded by 1; sampling noise beyond that is an error.
inline PauliTransferMatrix ptm_from_channel(const PauliChannel &ch) {
  const auto basis = pauli_basis(ch.n_qubits);
  const double d = double(ch.dim());
  PauliTransferMatrix r;
  r.n_qubits = ch.n_qubits;
  r.entries.resize(basis.size(), basis.size());
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j) {
      const cxd t = (basis[i].adjoint() * ch.out[j]).trace() / d;
      if (std::abs(t.imag()) > 1e-6)
        throw std::runtime_error("ptm_from_channel: complex entry " +
                                 std::to_string(t.imag()));
      if (std::abs(t.real()) > 1.0 + 1e-6)
        throw std::runtime_error("ptm_from_channel: entry out of range " +
                                 std::to_string(t.real()));
      r.entries(long(i), long(j)) = t.real();
    }
  return r;
}

// Samples a callable density map on every Pauli string and audits linearity
// on a random hermitian combination before trusting the samples.
template <class Map>
PauliTransferMatrix ptm_from_map(int n_qubits, Map &&map) {
  const auto basis = pauli_basis(n_qubits);
  PauliChannel ch;
  ch.n_qubits = n_qubits;
  for (const MatrixXcd &p : basis) ch.out.push_back(map(p));

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Eigen::Index d = ch.dim();
  MatrixXcd probe = MatrixXcd::Zero(d, d);
  MatrixXcd expect = MatrixXcd::Zero(d, d);
  for (size_t j = 0; j < basis.size(); ++j) {
    const double c = coef(rng);
    probe += c * basis[j];
    expect += c * ch.out[j];
  }
  const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
  if ((map(probe) - expect).cwiseAbs().maxCoeff() > 1e-6 * scale)
    throw std::runtime_error("ptm_from_map: channel failed the linearity audit");
  return ptm_from_channel(ch);
}

inline PauliTransferMatrix unitary_ptm(const MatrixXcd &u) {
  return ptm_from_channel(unitary_channel(u));
}

// first row (1, 0, ..., 0) iff the sampled channel preserved the trace
inline bool trace_preserving(const PauliTransferMatrix &r, double tol = 1e-6) {
  if (std::abs(r.entries(0, 0) - 1.0) > tol) return false;
  for (long j = 1; j < r.entries.cols(); ++j)
    if (std::abs(r.entries(0, j)) > tol) return false;
  return true;
}

// Factors the erroneous part out of a gate channel: R_noise = R_E R_ideal^-1,
// so that R_noise R_ideal reproduces the measured transfer matrix.
inline PauliTransferMatrix noise_ptm(const PauliTransferMatrix &r_e,
                                     const PauliTransferMatrix &r_ideal) {
  if (r_e.n_qubits != r_ideal.n_qubits)
    throw std::invalid_argument("noise_ptm: qubit count mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(r_ideal.entries);
  if (!lu.isInvertible())
    throw std::invalid_argument("noise_ptm: singular ideal transfer matrix");
  PauliTransferMatrix r;
  r.n_qubits = r_e.n_qubits;
  r.entries = r_e.entries * lu.inverse();
  return r;
}

//------------------------------------------------------------------------------
// Choi and Kraus forms
//------------------------------------------------------------------------------

struct ChoiMatrix {
  MatrixXcd entries;  // d^2 x d^2, composite index (input, output)
  int n_qubits = 1;

  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }
};

// rho_E = (1/d^2) sum_ij R_ij P_j^T (x) P_i; unit trace for TP channels
inline ChoiMatrix ptm_to_choi(const PauliTransferMatrix &r) {
  const auto basis = pauli_basis(r.n_qubits);
  const Eigen::Index d = r.dim();
  ChoiMatrix choi;
  choi.n_qubits = r.n_qubits;
  choi.entries = MatrixXcd::Zero(d * d, d * d);
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j)
      choi.entries += (r.entries(long(i), long(j)) / double(d * d)) *
                      detail::kron(basis[j].transpose(), basis[i]);
  choi.entries = 0.5 * (choi.entries + choi.entries.adjoint()).eval();
  return choi;
}

// inverse of ptm_to_choi: R_ij = Tr[(P_j^T (x) P_i) rho_E]
inline PauliTransferMatrix choi_to_ptm(const ChoiMatrix &choi) {
  const auto basis = pauli_basis(choi.n_qubits);
  PauliTransferMatrix r;
  r.n_qubits = choi.n_qubits;
  r.entries.resize(basis.size(), basis.size());
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j) {
      const cxd t =
          (detail::kron(basis[j].transpose(), basis[i]) * choi.entries).trace();
      if (std::abs(t.imag()) > 1e-8)
        throw std::runtime_error("choi_to_ptm: complex entry");
      r.entries(long(i), long(j)) = t.real();
    }
  return r;
}

struct KrausSet {
  std::vector<MatrixXcd> operators;
  int n_clipped = 0;           // eigenvalues in [-1e-6, 0) repaired to zero
  double clipped_weight = 0.0; // total weight removed by the repair
};

// Kraus factors from the Choi eigendecomposition, A_k = sqrt(d lambda_k)
// unvec(w_k).  Eigenvalues below -1e-6 mean the channel is not completely
// positive and abort; small negatives are clipped and recorded.
inline KrausSet choi_to_kraus(const ChoiMatrix &choi) {
  const Eigen::Index d = choi.dim();
  if ((choi.entries - choi.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("choi_to_kraus: matrix not hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(choi.entries);
  KrausSet set;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double lambda = es.eigenvalues()[k];
    if (lambda < -1e-6)
      throw std::runtime_error(
          "choi_to_kraus: channel is not completely positive, eigenvalue " +
          std::to_string(lambda));
    if (lambda < 0.0) {
      ++set.n_clipped;
      set.clipped_weight += -lambda;
      continue;
    }
    if (lambda < 1e-10) continue;  // numerically irrelevant weight
    const VectorXcd w = es.eigenvectors().col(k);
    MatrixXcd a = std::sqrt(double(d) * lambda) *
                  Eigen::Map<const MatrixXcd>(w.data(), d, d);
    set.operators.push_back(std::move(a));
  }
  return set;
}

inline MatrixXcd apply_kraus(const KrausSet &set, const MatrixXcd &rho) {
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const MatrixXcd &a : set.operators)
    out.noalias() += a * rho * a.adjoint();
  return out;
}

inline PauliChannel kraus_channel(const KrausSet &set, int n_qubits) {
  return pauli_channel_from_map(
      n_qubits, [&](const MatrixXcd &p) { return apply_kraus(set, p); });
}

// sum_k A_k' A_k; identity for trace preservation, below it for leakage
inline MatrixXcd kraus_completeness(const KrausSet &set, Eigen::Index d) {
  MatrixXcd acc = MatrixXcd::Zero(d, d);
  for (const MatrixXcd &a : set.operators) acc.noalias() += a.adjoint() * a;
  return acc;
}

// half the trace norm of the difference of two channel outputs
inline double trace_distance(const MatrixXcd &a, const MatrixXcd &b) {
  Eigen::JacobiSVD<MatrixXcd> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

//------------------------------------------------------------------------------
// Matched standard-qubit gates
//------------------------------------------------------------------------------

// Relaxation rate that reproduces a measured average infidelity to first
// order, Gamma_1 = 2(d+1)(1-F)/(d T n) for n qubits decaying together.
inline double matched_relaxation_rate(double fbar, double t_gate, int n) {
  if (!(fbar > 0.0) || fbar > 1.0)
    throw std::invalid_argument("matched_relaxation_rate: fbar out of (0, 1]");
  if (n != 1 && n != 2)
    throw std::invalid_argument("matched_relaxation_rate: n must be 1 or 2");
  if (t_gate <= 0.0)
    throw std::invalid_argument("matched_relaxation_rate: t_gate <= 0");
  const double d = double(Eigen::Index(1) << n);
  return 2.0 * (d + 1.0) * (1.0 - fbar) / (d * t_gate * double(n));
}

// Plain two-level gate with amplitude damping: constant H = angle/(2T) X
// (or Z1 Z2), collapse sqrt(Gamma_1) sigma_minus per qubit.  Reuses the
// Lindblad machinery on a dim-2 space, where the lowering operator is exactly
// sigma_minus.
inline PauliChannel standard_qubit_gate_channel(GateKind kind, double angle,
                                                double gamma1, double t_gate,
                                                const IntegratorConfig &cfg = {},
                                                int n_threads = 0) {
  if (t_gate <= 0.0)
    throw std::invalid_argument("standard_qubit_gate_channel: t_gate <= 0");
  if (gamma1 < 0.0)
    throw std::invalid_argument("standard_qubit_gate_channel: gamma1 < 0");
  if (kind != GateKind::RX && kind != GateKind::RZZ)
    throw std::invalid_argument(
        "standard_qubit_gate_channel: only RX and RZZ are modeled");

  const int n_modes = (kind == GateKind::RZZ) ? 2 : 1;
  FockSpace space(2, n_modes);
  PulseSchedule sched;
  sched.space = space;
  sched.t_total = t_gate;
  MatrixXcd h = (kind == GateKind::RX)
                    ? MatrixXcd(pauli_x())
                    : MatrixXcd(detail::kron(pauli_z(), pauli_z()));
  h *= angle / (2.0 * t_gate);
  sched.add_term(FockOperator(std::move(h), space),
                 constant_envelope(1.0, 0.0, t_gate));
  add_photon_loss(sched, gamma1);
  const MatrixXcd frame = MatrixXcd::Identity(space.size(), space.size());
  return subspace_channel(sched, frame, cfg, n_threads,
                          ChannelMethod::master_equation);
}

}  // namespace catqaoa

#endif
