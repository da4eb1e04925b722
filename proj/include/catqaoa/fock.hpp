/**
 * fock.hpp
 *
 * Truncated Fock-space types: modes, operators, kets, the Kerr-nonlinear
 * resonator Hamiltonian and the cat-state logical basis extracted from it.
 */

#ifndef _catqaoa_fock_hpp_
#define _catqaoa_fock_hpp_

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace catqaoa {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

//------------------------------------------------------------------------------
// Spaces, operators, kets
//------------------------------------------------------------------------------

struct FockSpace {
  int dim = 20;      // levels kept per mode
  int n_modes = 1;

  FockSpace() = default;
  FockSpace(int dim_, int n_modes_ = 1) : dim(dim_), n_modes(n_modes_) {
    if (dim < 2 || n_modes < 1)
      throw std::invalid_argument("FockSpace: need dim >= 2 and n_modes >= 1");
  }

  // total dimension dim^n_modes
  Eigen::Index size() const {
    Eigen::Index s = 1;
    for (int m = 0; m < n_modes; ++m) s *= dim;
    return s;
  }

  bool operator==(const FockSpace &o) const {
    return dim == o.dim && n_modes == o.n_modes;
  }
  bool operator!=(const FockSpace &o) const { return !(*this == o); }
};

struct FockOperator {
  MatrixXcd matrix;
  FockSpace space;

  FockOperator() = default;
  FockOperator(MatrixXcd m, FockSpace s) : matrix(std::move(m)), space(s) {
    if (matrix.rows() != space.size() || matrix.cols() != space.size())
      throw std::invalid_argument("FockOperator: matrix does not match space");
  }

  bool is_hermitian(double tol = 1e-12) const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }
};

struct FockKet {
  VectorXcd amplitudes;
  FockSpace space;

  FockKet() = default;
  FockKet(VectorXcd a, FockSpace s) : amplitudes(std::move(a)), space(s) {
    if (amplitudes.size() != space.size())
      throw std::invalid_argument("FockKet: amplitude vector does not match space");
  }

  double norm() const { return amplitudes.norm(); }
};

// Kerr-nonlinear resonator parameters.  In units where K sets the scale,
// the stabilized cat amplitude is alpha = sqrt(G/K).
struct KnrParams {
  double K = 1.0;      // Kerr nonlinearity
  double G = 4.0;      // two-photon drive amplitude
  double delta = 0.0;  // detuning
  double phi = 0.0;    // drive phase

  double alpha() const { return std::sqrt(G / K); }
};

//------------------------------------------------------------------------------
// Elementary operators
//------------------------------------------------------------------------------

namespace detail {

inline MatrixXcd kron(const MatrixXcd &a, const MatrixXcd &b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Embed a single-mode matrix on the given mode.  Mode 0 is the leftmost
// tensor factor, i.e. the most significant digit of the composite index.
inline MatrixXcd embed(const FockSpace &space, const MatrixXcd &m, int mode) {
  if (mode < 0 || mode >= space.n_modes)
    throw std::out_of_range("embed: mode " + std::to_string(mode) +
                            " out of range for " + std::to_string(space.n_modes) +
                            " mode(s)");
  MatrixXcd out = (mode == 0) ? m : MatrixXcd(MatrixXcd::Identity(space.dim, space.dim));
  for (int k = 1; k < space.n_modes; ++k) {
    const MatrixXcd &next =
        (k == mode) ? m : MatrixXcd(MatrixXcd::Identity(space.dim, space.dim));
    out = kron(out, next);
  }
  return out;
}

inline MatrixXcd lower_single(int dim) {
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

}  // namespace detail

inline FockOperator annihilation_op(const FockSpace &space, int mode = 0) {
  return FockOperator(detail::embed(space, detail::lower_single(space.dim), mode), space);
}

inline FockOperator number_op(const FockSpace &space, int mode = 0) {
  MatrixXcd n = MatrixXcd::Zero(space.dim, space.dim);
  for (int k = 0; k < space.dim; ++k) n(k, k) = double(k);
  return FockOperator(detail::embed(space, n, mode), space);
}

// photon-number parity exp(i*pi*n) on one mode
inline FockOperator parity_op(const FockSpace &space, int mode = 0) {
  MatrixXcd p = MatrixXcd::Zero(space.dim, space.dim);
  for (int k = 0; k < space.dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return FockOperator(detail::embed(space, p, mode), space);
}

inline FockOperator identity_op(const FockSpace &space) {
  return FockOperator(MatrixXcd::Identity(space.size(), space.size()), space);
}

// tensor product of kets on single- or multi-mode spaces with equal dim
inline FockKet kron(const FockKet &a, const FockKet &b) {
  if (a.space.dim != b.space.dim)
    throw std::invalid_argument("kron: mismatched per-mode dimensions");
  FockSpace s(a.space.dim, a.space.n_modes + b.space.n_modes);
  VectorXcd v(s.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i)
    v.segment(i * b.amplitudes.size(), b.amplitudes.size()) =
        a.amplitudes(i) * b.amplitudes;
  return FockKet(std::move(v), s);
}

inline cxd expectation(const FockOperator &op, const FockKet &psi) {
  return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

//------------------------------------------------------------------------------
// States
//------------------------------------------------------------------------------

inline FockKet coherent_state(const FockSpace &space, cxd alpha) {
  if (space.n_modes != 1)
    throw std::invalid_argument("coherent_state: single-mode space expected");
  const double n_mean = std::norm(alpha);
  if (n_mean > space.dim / 3.0)
    std::fprintf(stderr,
                 "coherent_state: warning: |alpha|^2 = %.3f exceeds dim/3 = %.3f, "
                 "truncation error will be significant\n",
                 n_mean, space.dim / 3.0);
  VectorXcd v(space.dim);
  cxd c = std::exp(-0.5 * n_mean);
  for (int n = 0; n < space.dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(double(n + 1));
  }
  return FockKet(std::move(v), space);
}

enum class Parity { even, odd };

// (|alpha> +/- |-alpha>) normalized on the truncated space
inline FockKet cat_state(const FockSpace &space, cxd alpha, Parity parity) {
  FockKet plus = coherent_state(space, alpha);
  FockKet minus = coherent_state(space, -alpha);
  VectorXcd v = (parity == Parity::even) ? (plus.amplitudes + minus.amplitudes).eval()
                                         : (plus.amplitudes - minus.amplitudes).eval();
  const double n = v.norm();
  if (n < 1e-14)
    throw std::invalid_argument("cat_state: vanishing norm, alpha too small");
  return FockKet(v / n, space);
}

//------------------------------------------------------------------------------
// Cat-qubit logical basis
//------------------------------------------------------------------------------

// Logical basis spanned by the even/odd cats,
//   |0> = (|C+> + |C->)/sqrt2,  |1> = (|C+> - |C->)/sqrt2,
// together with the embedded Pauli operators and the subspace projector.
// eta and alpha_eff are fixed by the matrix elements of the annihilation
// operator between the two cats on the truncated space, so that
//   P a P = (alpha_eff/2) [ (eta + 1/eta) Z + i (eta - 1/eta) Y ]
// holds to machine precision.
struct CatBasis {
  double alpha = 0.0;
  double eta = 1.0;
  double alpha_eff = 0.0;
  FockSpace space;
  FockKet cat_even;   // |C+>
  FockKet cat_odd;    // |C->
  FockKet ket0;
  FockKet ket1;
  MatrixXcd pauli_x;
  MatrixXcd pauli_y;
  MatrixXcd pauli_z;
  MatrixXcd projector;
};

inline CatBasis cat_basis(const FockSpace &space, double alpha) {
  if (space.n_modes != 1)
    throw std::invalid_argument("cat_basis: single-mode space expected");
  CatBasis cb;
  cb.alpha = alpha;
  cb.space = space;
  cb.cat_even = cat_state(space, alpha, Parity::even);
  cb.cat_odd = cat_state(space, alpha, Parity::odd);
  const VectorXcd &cp = cb.cat_even.amplitudes;
  const VectorXcd &cm = cb.cat_odd.amplitudes;
  cb.ket0 = FockKet(((cp + cm) / std::sqrt(2.0)).eval(), space);
  cb.ket1 = FockKet(((cp - cm) / std::sqrt(2.0)).eval(), space);

  const VectorXcd &k0 = cb.ket0.amplitudes;
  const VectorXcd &k1 = cb.ket1.amplitudes;
  cb.pauli_x = k0 * k1.adjoint() + k1 * k0.adjoint();
  cb.pauli_y = cxd(0, -1) * (k0 * k1.adjoint()) + cxd(0, 1) * (k1 * k0.adjoint());
  cb.pauli_z = k0 * k0.adjoint() - k1 * k1.adjoint();
  cb.projector = k0 * k0.adjoint() + k1 * k1.adjoint();

  // a|C+> = A|C->, a|C-> = B|C+> up to truncation; the geometric mean and
  // ratio of A and B give the effective amplitude and the basis asymmetry.
  MatrixXcd a = detail::lower_single(space.dim);
  const cxd A = cm.dot(a * cp);
  const cxd B = cp.dot(a * cm);
  cb.eta = std::sqrt(std::abs(A) / std::abs(B));
  cb.alpha_eff = std::sqrt(std::abs(A) * std::abs(B));
  return cb;
}

//------------------------------------------------------------------------------
// Hamiltonian
//------------------------------------------------------------------------------

// H = -delta a'a - K a'a'aa + G (a'a' e^{2i phi} + aa e^{-2i phi})
inline FockOperator knr_hamiltonian(const FockSpace &space, const KnrParams &p,
                                    int mode = 0) {
  MatrixXcd a = detail::lower_single(space.dim);
  MatrixXcd ad = a.adjoint();
  MatrixXcd h = -p.delta * (ad * a) - p.K * (ad * ad * a * a);
  const cxd ph = std::exp(cxd(0, 2.0 * p.phi));
  h += p.G * (ph * (ad * ad) + std::conj(ph) * (a * a));
  return FockOperator(detail::embed(space, h, mode), space);
}

//------------------------------------------------------------------------------
// Wigner function
//------------------------------------------------------------------------------

struct WignerGrid {
  double x_min = -5.0, x_max = 5.0;
  double p_min = -5.0, p_max = 5.0;
  int nx = 201, np = 201;
};

struct WignerResult {
  VectorXd x, p;
  MatrixXd w;  // w(i, j) = W(x(i), p(j))

  // midpoint-free trapezoid-equivalent sum; grids are uniform
  double integral() const {
    const double dx = x(1) - x(0), dp = p(1) - p(0);
    return w.sum() * dx * dp;
  }
};

// Matrix elements <m|D(beta)|n| of the displacement operator, evaluated
// diagonal-by-diagonal with the associated-Laguerre recurrence.  Each entry is
// exact, so truncation only enters through the state the matrix acts on.
inline MatrixXcd displacement_op(int dim, cxd beta) {
  MatrixXcd d(dim, dim);
  const double x = std::norm(beta);
  const double pref = std::exp(-0.5 * x);
  for (int k = 0; k < dim; ++k) {
    // scale(n) = sqrt(n!/(n+k)!) beta^k accumulated as a product to stay tame
    cxd scale = pref;
    for (int j = 1; j <= k; ++j) scale *= beta / std::sqrt(double(j));
    double lprev = 0.0, l = 1.0;  // L_{n-1}^{(k)}, L_n^{(k)}
    for (int n = 0; n + k < dim; ++n) {
      if (n > 0) {
        double lnext = ((2.0 * n - 1.0 + k - x) * l - (n - 1.0 + k) * lprev) / n;
        lprev = l;
        l = lnext;
        scale *= std::sqrt(double(n) / double(n + k));
      }
      d(n + k, n) = scale * l;
      if (k > 0) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        d(n, n + k) = sign * std::conj(scale) * l;
      }
    }
  }
  return d;
}

// W(x,p) = (1/pi) Tr[rho D(2 beta) Pi], beta = (x + i p)/sqrt2.  The kernel
// form avoids displacing the state off the truncated ladder.
inline WignerResult wigner(const MatrixXcd &rho, const FockSpace &space,
                           const WignerGrid &grid = {}) {
  if (space.n_modes != 1)
    throw std::invalid_argument("wigner: single-mode space expected");
  if (rho.rows() != space.dim || rho.cols() != space.dim)
    throw std::invalid_argument("wigner: density matrix does not match space");
  WignerResult res;
  res.x = VectorXd::LinSpaced(grid.nx, grid.x_min, grid.x_max);
  res.p = VectorXd::LinSpaced(grid.np, grid.p_min, grid.p_max);
  res.w.resize(grid.nx, grid.np);
  VectorXd par(space.dim);
  for (int n = 0; n < space.dim; ++n) par(n) = (n % 2 == 0) ? 1.0 : -1.0;
  MatrixXcd pi_rho = par.asDiagonal() * rho;  // Tr[rho D Pi] = Tr[(Pi rho) D]
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.np; ++j) {
      const cxd beta = cxd(res.x(i), res.p(j)) / std::sqrt(2.0);
      MatrixXcd d = displacement_op(space.dim, 2.0 * beta);
      const cxd tr = (pi_rho.transpose().cwiseProduct(d)).sum();
      res.w(i, j) = tr.real() / M_PI;
    }
  }
  return res;
}

inline WignerResult wigner(const FockKet &psi, const WignerGrid &grid = {}) {
  MatrixXcd rho = psi.amplitudes * psi.amplitudes.adjoint();
  return wigner(rho, psi.space, grid);
}

}  // namespace catqaoa

#endif
