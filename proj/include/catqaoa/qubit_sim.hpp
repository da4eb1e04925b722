/**
 * qubit_sim.hpp
 *
 * Dense n-qubit density-matrix simulator replaying compiled circuits as
 * ideal unitaries followed by per-gate Kraus noise, plus a statevector
 * simulator used for noiseless runs and cross-checks.
 *
 * Index convention: qubit 0 is the most significant bit of the basis index,
 * matching the tensor order of pauli_basis.
 */

#ifndef _catqaoa_qubit_sim_hpp_
#define _catqaoa_qubit_sim_hpp_

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catqaoa/tomography.hpp"

namespace catqaoa {

inline constexpr int kMaxSimQubits = 10;

struct QubitState {
  MatrixXcd rho;
  int n_qubits = 1;

  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }

  // hermiticity, near-unit trace (up to the allowed leakage), positivity
  void validate(double leakage_budget = 0.05) const {
    if (rho.rows() != dim() || rho.cols() != dim())
      throw std::runtime_error("QubitState: matrix does not match qubit count");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::runtime_error("QubitState: density matrix not hermitian");
    const double tr = rho.trace().real();
    if (tr < 1.0 - leakage_budget || tr > 1.0 + 1e-8)
      throw std::runtime_error("QubitState: trace " + std::to_string(tr) +
                               " outside the leakage budget");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-7)
      throw std::runtime_error("QubitState: negative eigenvalue " +
                               std::to_string(es.eigenvalues().minCoeff()));
  }
};

struct StateVector {
  VectorXcd amps;
  int n_qubits = 1;

  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }
};

namespace detail {

inline void check_qubit_count(int n) {
  if (n < 1 || n > kMaxSimQubits)
    throw std::invalid_argument("qubit_sim: qubit count outside [1, " +
                                std::to_string(kMaxSimQubits) + "]");
}

inline VectorXcd product_ket(int n, const Eigen::Vector2cd &single) {
  VectorXcd amps = single;
  for (int q = 1; q < n; ++q) {
    VectorXcd next(amps.size() * 2);
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
      next[2 * i] = amps[i] * single[0];
      next[2 * i + 1] = amps[i] * single[1];
    }
    amps.swap(next);
  }
  return amps;
}

// Applies a dense operator to q bits of an amplitude vector.  pos[j] is the
// global bit carrying the j-th (most significant first) operator index bit.
template <class Vec>
void apply_local(Vec &v, const MatrixXcd &m, const std::vector<int> &pos) {
  const int q = int(pos.size());
  const long sub_count = 1L << q;
  if (m.rows() != sub_count || m.cols() != sub_count)
    throw std::invalid_argument("apply_local: operator size mismatch");
  std::vector<long> offset(size_t(sub_count), 0);
  for (long s = 0; s < sub_count; ++s) {
    long off = 0;
    for (int j = 0; j < q; ++j)
      if ((s >> (q - 1 - j)) & 1) off |= 1L << pos[size_t(j)];
    offset[size_t(s)] = off;
  }
  std::vector<int> asc(pos);
  std::sort(asc.begin(), asc.end());
  const long outer = long(v.size()) >> q;
  VectorXcd gathered(sub_count), mixed(sub_count);
  for (long i = 0; i < outer; ++i) {
    long base = i;
    // re-insert zeros at the operator bits, lowest first
    for (int p : asc) base = ((base >> p) << (p + 1)) | (base & ((1L << p) - 1));
    for (long s = 0; s < sub_count; ++s)
      gathered[s] = v[base + offset[size_t(s)]];
    mixed.noalias() = m * gathered;
    for (long s = 0; s < sub_count; ++s) v[base + offset[size_t(s)]] = mixed[s];
  }
}

inline void check_targets(const std::vector<int> &targets, int n_qubits) {
  if (targets.empty() || targets.size() > 2)
    throw std::invalid_argument("qubit_sim: gates act on one or two qubits");
  for (int t : targets)
    if (t < 0 || t >= n_qubits)
      throw std::invalid_argument("qubit_sim: target out of range");
  if (targets.size() == 2 && targets[0] == targets[1])
    throw std::invalid_argument("qubit_sim: duplicate target");
}

}  // namespace detail

inline QubitState qubit_plus_state(int n, bool i_phase = false) {
  detail::check_qubit_count(n);
  const cxd up = i_phase ? cxd(0, 1) : cxd(1, 0);
  const VectorXcd ket =
      detail::product_ket(n, Eigen::Vector2cd(1.0, up) / std::sqrt(2.0));
  QubitState state;
  state.n_qubits = n;
  state.rho = ket * ket.adjoint();
  return state;
}

inline StateVector statevector_plus_state(int n, bool i_phase = false) {
  detail::check_qubit_count(n);
  const cxd up = i_phase ? cxd(0, 1) : cxd(1, 0);
  StateVector sv;
  sv.n_qubits = n;
  sv.amps = detail::product_ket(n, Eigen::Vector2cd(1.0, up) / std::sqrt(2.0));
  return sv;
}

// One compiled circuit element: ideal unitary on the targets, then the noise
// Kraus family of the matching library bin (empty set = noiseless).
struct NoisyGate {
  MatrixXcd ideal;
  KrausSet kraus;
  std::vector<int> targets;
};

// rho -> sum_k A_k U rho U' A_k', embedded on the targets by permuting the
// index bits of vec(rho) instead of building 2^n x 2^n operators
inline void apply_noisy_gate(QubitState &state, const NoisyGate &gate) {
  detail::check_targets(gate.targets, state.n_qubits);
  const long k = long(gate.targets.size());
  const long gdim = 1L << k;
  if (gate.ideal.rows() != gdim || gate.ideal.cols() != gdim)
    throw std::invalid_argument("apply_noisy_gate: unitary size mismatch");
  for (const MatrixXcd &a : gate.kraus.operators)
    if (a.rows() != gdim || a.cols() != gdim)
      throw std::invalid_argument("apply_noisy_gate: kraus size mismatch");

  MatrixXcd s = MatrixXcd::Zero(gdim * gdim, gdim * gdim);
  if (gate.kraus.operators.empty()) {
    s = detail::kron(gate.ideal.conjugate(), gate.ideal);
  } else {
    for (const MatrixXcd &a : gate.kraus.operators) {
      const MatrixXcd b = a * gate.ideal;
      s += detail::kron(b.conjugate(), b);
    }
  }

  // vec(rho) column major: low n bits = row (ket), high n bits = column (bra)
  const int n = state.n_qubits;
  std::vector<int> pos;
  pos.reserve(2 * gate.targets.size());
  for (int t : gate.targets) pos.push_back(n + (n - 1 - t));
  for (int t : gate.targets) pos.push_back(n - 1 - t);
  Eigen::Map<VectorXcd> v(state.rho.data(), state.rho.size());
  detail::apply_local(v, s, pos);
}

inline void apply_unitary(StateVector &sv, const MatrixXcd &u,
                          const std::vector<int> &targets) {
  detail::check_targets(targets, sv.n_qubits);
  const long gdim = 1L << targets.size();
  if (u.rows() != gdim || u.cols() != gdim)
    throw std::invalid_argument("apply_unitary: size mismatch");
  std::vector<int> pos;
  for (int t : targets) pos.push_back(sv.n_qubits - 1 - t);
  detail::apply_local(sv.amps, u, pos);
}

inline QubitState run_circuit(const std::vector<NoisyGate> &circuit,
                              QubitState state) {
  for (const NoisyGate &g : circuit) apply_noisy_gate(state, g);
  return state;
}

inline StateVector run_circuit_statevector(const std::vector<NoisyGate> &circuit,
                                           StateVector sv) {
  for (const NoisyGate &g : circuit) apply_unitary(sv, g.ideal, g.targets);
  return sv;
}

// Computational-basis distribution.  Probabilities are the clipped diagonal;
// when leakage pushed the trace below one the distribution is renormalized
// and the factor reported, otherwise it sums to the reported trace.
struct MeasuredDistribution {
  Eigen::VectorXd probs;
  double trace = 1.0;   // clipped diagonal mass before renormalization
  double renorm = 1.0;  // factor applied to probs (1 = untouched)
};

inline MeasuredDistribution measure_distribution(const QubitState &state) {
  MeasuredDistribution out;
  out.probs = state.rho.diagonal().real().cwiseMax(0.0);
  out.trace = out.probs.sum();
  if (out.trace < 1.0 && out.trace > 0.0) {
    out.renorm = 1.0 / out.trace;
    out.probs *= out.renorm;
  }
  return out;
}

inline MeasuredDistribution measure_distribution(const StateVector &sv) {
  QubitState state;
  state.n_qubits = sv.n_qubits;
  state.rho = sv.amps * sv.amps.adjoint();
  return measure_distribution(state);
}

}  // namespace catqaoa

#endif
