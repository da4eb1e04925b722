/**
 * pauli.hpp
 *
 * Qubit-space building blocks: Pauli strings in a fixed lexicographic order,
 * rotation unitaries, and the sampled-channel representation used to move
 * between physical evolutions and qubit-level descriptions.
 */

#ifndef _catqaoa_pauli_hpp_
#define _catqaoa_pauli_hpp_

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catqaoa/fock.hpp"

namespace catqaoa {

inline const MatrixXcd &pauli_i() {
  static const MatrixXcd m = MatrixXcd::Identity(2, 2);
  return m;
}
inline const MatrixXcd &pauli_x() {
  static const MatrixXcd m = (MatrixXcd(2, 2) << 0, 1, 1, 0).finished();
  return m;
}
inline const MatrixXcd &pauli_y() {
  static const MatrixXcd m =
      (MatrixXcd(2, 2) << 0, cxd(0, -1), cxd(0, 1), 0).finished();
  return m;
}
inline const MatrixXcd &pauli_z() {
  static const MatrixXcd m = (MatrixXcd(2, 2) << 1, 0, 0, -1).finished();
  return m;
}

// Pauli strings for n qubits in lexicographic {I,X,Y,Z} order; the first
// qubit is the leftmost tensor factor (most significant index digit).
inline std::vector<MatrixXcd> pauli_basis(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 8)
    throw std::invalid_argument("pauli_basis: unsupported qubit count");
  const MatrixXcd *singles[4] = {&pauli_i(), &pauli_x(), &pauli_y(), &pauli_z()};
  long count = 1;
  for (int q = 0; q < n_qubits; ++q) count *= 4;
  std::vector<MatrixXcd> basis;
  basis.reserve(count);
  for (long idx = 0; idx < count; ++idx) {
    long rem = idx;
    long stride = count / 4;
    MatrixXcd p = *singles[rem / stride];
    rem %= stride;
    for (int q = 1; q < n_qubits; ++q) {
      stride /= 4;
      p = detail::kron(p, *singles[rem / stride]);
      rem %= stride;
    }
    basis.push_back(std::move(p));
  }
  return basis;
}

inline std::string pauli_label(long index, int n_qubits) {
  static const char names[] = "IXYZ";
  std::string s(n_qubits, 'I');
  for (int q = n_qubits - 1; q >= 0; --q) {
    s[q] = names[index % 4];
    index /= 4;
  }
  return s;
}

//------------------------------------------------------------------------------
// Rotation unitaries
//------------------------------------------------------------------------------

inline MatrixXcd rx_gate(double theta) {
  MatrixXcd u(2, 2);
  u << std::cos(theta / 2), cxd(0, -std::sin(theta / 2)),
      cxd(0, -std::sin(theta / 2)), std::cos(theta / 2);
  return u;
}

inline MatrixXcd ry_gate(double theta) {
  MatrixXcd u(2, 2);
  u << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2),
      std::cos(theta / 2);
  return u;
}

inline MatrixXcd rz_gate(double theta) {
  MatrixXcd u = MatrixXcd::Zero(2, 2);
  u(0, 0) = std::exp(cxd(0, -theta / 2));
  u(1, 1) = std::exp(cxd(0, theta / 2));
  return u;
}

inline MatrixXcd rzz_gate(double theta) {
  MatrixXcd u = MatrixXcd::Zero(4, 4);
  const cxd minus = std::exp(cxd(0, -theta / 2));
  const cxd plus = std::exp(cxd(0, theta / 2));
  u(0, 0) = minus;
  u(1, 1) = plus;
  u(2, 2) = plus;
  u(3, 3) = minus;
  return u;
}

//------------------------------------------------------------------------------
// Sampled channels
//------------------------------------------------------------------------------

// A channel recorded by its action on every Pauli string: out[j] = E(P_j).
// This is the raw object behind transfer matrices and fidelity estimates.
struct PauliChannel {
  int n_qubits = 1;
  std::vector<MatrixXcd> out;

  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }
};

template <class Map>
PauliChannel pauli_channel_from_map(int n_qubits, Map &&map) {
  PauliChannel ch;
  ch.n_qubits = n_qubits;
  for (const MatrixXcd &p : pauli_basis(n_qubits)) ch.out.push_back(map(p));
  return ch;
}

inline PauliChannel unitary_channel(const MatrixXcd &u) {
  int n = 0;
  while ((Eigen::Index(1) << n) < u.rows()) ++n;
  return pauli_channel_from_map(
      n, [&](const MatrixXcd &p) { return MatrixXcd(u * p * u.adjoint()); });
}

// Average gate fidelity between a sampled channel and a target unitary,
//   F = [ sum_j Tr(U P_j U^+ E(P_j)) + d^2 ] / (d^2 (d + 1)).
// The sum is real for physical channels; a large imaginary part or a value
// outside [0, 1] indicates a broken channel and raises.
inline double average_gate_fidelity(const PauliChannel &channel,
                                    const MatrixXcd &target) {
  const Eigen::Index d = channel.dim();
  if (target.rows() != d || target.cols() != d)
    throw std::invalid_argument("average_gate_fidelity: target size mismatch");
  const auto basis = pauli_basis(channel.n_qubits);
  cxd acc = 0.0;
  for (size_t j = 0; j < basis.size(); ++j) {
    const MatrixXcd rotated = target * basis[j] * target.adjoint();
    acc += (rotated.adjoint() * channel.out[j]).trace();
  }
  const double d2 = double(d) * double(d);
  const cxd f = (acc + d2) / (d2 * (d + 1.0));
  if (std::abs(f.imag()) > 1e-9)
    throw std::runtime_error("average_gate_fidelity: non-real value " +
                             std::to_string(f.imag()));
  if (f.real() < -1e-9 || f.real() > 1.0 + 1e-9)
    throw std::runtime_error("average_gate_fidelity: value out of range " +
                             std::to_string(f.real()));
  return f.real();
}

}  // namespace catqaoa

#endif
