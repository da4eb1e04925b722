/**
 * dynamics.hpp
 *
 * Pulsed time evolution: envelope-scheduled Hamiltonian terms, optional
 * photon-loss collapse operators, and an adaptive embedded Dormand-Prince 5(4)
 * integrator for both kets and density matrices.
 */

#ifndef _catqaoa_dynamics_hpp_
#define _catqaoa_dynamics_hpp_

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "catqaoa/fock.hpp"
#include "catqaoa/parallel.hpp"

namespace catqaoa {

//------------------------------------------------------------------------------
// Schedules
//------------------------------------------------------------------------------

struct PulseEnvelope {
  enum class Kind { constant, sine_half, sine_squared, piecewise };

  Kind kind = Kind::constant;
  double amplitude = 1.0;
  double t_start = 0.0;
  double t_end = 0.0;
  // only for Kind::piecewise: (time, value) nodes, linearly interpolated,
  // clamped to the end values outside the node span
  std::vector<std::pair<double, double>> nodes;

  // Curve value ignoring the window; callers segment time so that a term is
  // either fully active or fully inactive between breakpoints.
  double curve(double t) const {
    const double span = t_end - t_start;
    switch (kind) {
      case Kind::constant:
        return amplitude;
      case Kind::sine_half:
        return amplitude * std::sin(M_PI * (t - t_start) / span);
      case Kind::sine_squared: {
        const double s = std::sin(M_PI * (t - t_start) / span);
        return amplitude * s * s;
      }
      case Kind::piecewise: {
        if (nodes.empty()) return 0.0;
        if (t <= nodes.front().first) return amplitude * nodes.front().second;
        if (t >= nodes.back().first) return amplitude * nodes.back().second;
        auto hi = std::upper_bound(
            nodes.begin(), nodes.end(), std::make_pair(t, 0.0),
            [](const auto &a, const auto &b) { return a.first < b.first; });
        auto lo = hi - 1;
        const double f = (t - lo->first) / (hi->first - lo->first);
        return amplitude * ((1.0 - f) * lo->second + f * hi->second);
      }
    }
    return 0.0;
  }

  // windowed value, for callers outside the integrator
  double value(double t) const {
    if (t < t_start || t > t_end) return 0.0;
    return curve(t);
  }
};

inline PulseEnvelope constant_envelope(double amplitude, double t_start,
                                       double t_end) {
  PulseEnvelope e;
  e.kind = PulseEnvelope::Kind::constant;
  e.amplitude = amplitude;
  e.t_start = t_start;
  e.t_end = t_end;
  return e;
}

inline PulseEnvelope sine_half_envelope(double amplitude, double t_start,
                                        double t_end) {
  PulseEnvelope e = constant_envelope(amplitude, t_start, t_end);
  e.kind = PulseEnvelope::Kind::sine_half;
  return e;
}

inline PulseEnvelope sine_squared_envelope(double amplitude, double t_start,
                                           double t_end) {
  PulseEnvelope e = constant_envelope(amplitude, t_start, t_end);
  e.kind = PulseEnvelope::Kind::sine_squared;
  return e;
}

struct ScheduleTerm {
  FockOperator op;  // must be Hermitian; envelope carries the time dependence
  PulseEnvelope envelope;
};

struct CollapseTerm {
  FockOperator op;
  double rate = 0.0;
};

struct PulseSchedule {
  FockSpace space;
  std::vector<ScheduleTerm> terms;
  std::vector<CollapseTerm> collapse_ops;
  double t_total = 0.0;

  void add_term(FockOperator op, PulseEnvelope env) {
    terms.push_back({std::move(op), env});
  }
  void add_collapse(FockOperator op, double rate) {
    collapse_ops.push_back({std::move(op), rate});
  }
};

//------------------------------------------------------------------------------
// Integrator configuration
//------------------------------------------------------------------------------

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  enum class Method { dopri5 } method = Method::dopri5;
};

struct EvolveStats {
  long n_steps = 0;
  long n_rejected = 0;
  long n_rhs = 0;
};

// Thrown when the step size underflows; t_reached reports how far the
// integration got.
struct IntegratorError : std::runtime_error {
  double t_reached;
  IntegratorError(const std::string &msg, double t)
      : std::runtime_error(msg + " (integration reached t = " + std::to_string(t) + ")"),
        t_reached(t) {}
};

//------------------------------------------------------------------------------
// Internals
//------------------------------------------------------------------------------

namespace detail {

using SpMatR = Eigen::SparseMatrix<cxd, Eigen::RowMajor>;
using SpMatC = Eigen::SparseMatrix<cxd, Eigen::ColMajor>;

inline void validate_schedule(const PulseSchedule &sched) {
  if (!(sched.t_total > 0.0))
    throw std::invalid_argument("PulseSchedule: t_total must be positive");
  for (const auto &term : sched.terms) {
    if (term.op.space != sched.space)
      throw std::invalid_argument("PulseSchedule: term on a different space");
    const double scale = std::max(1.0, term.op.matrix.cwiseAbs().maxCoeff());
    if (!term.op.is_hermitian(1e-12 * scale))
      throw std::invalid_argument("PulseSchedule: non-hermitian hamiltonian term");
  }
  for (const auto &col : sched.collapse_ops) {
    if (col.op.space != sched.space)
      throw std::invalid_argument("PulseSchedule: collapse op on a different space");
    if (col.rate < 0.0)
      throw std::invalid_argument("PulseSchedule: negative collapse rate");
  }
}

// Breakpoints where some envelope switches on/off or kinks; the integrator is
// restarted at each so that the right-hand side stays smooth within a segment.
inline std::vector<double> breakpoints(const PulseSchedule &sched) {
  std::vector<double> pts{0.0, sched.t_total};
  auto push = [&](double t) {
    if (t > 0.0 && t < sched.t_total) pts.push_back(t);
  };
  for (const auto &term : sched.terms) {
    push(term.envelope.t_start);
    push(term.envelope.t_end);
    if (term.envelope.kind == PulseEnvelope::Kind::piecewise)
      for (const auto &node : term.envelope.nodes) push(node.first);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  const double tol = 1e-12 * sched.t_total;
  for (double t : pts)
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  out.back() = sched.t_total;
  return out;
}

// Per-segment view: constant-envelope terms folded into one static matrix,
// the rest kept as (matrix, envelope) pairs.
struct SegmentOps {
  SpMatR h_static;          // sum of constant terms over this segment
  bool has_static = false;
  std::vector<SpMatR> h_dyn;
  std::vector<PulseEnvelope> env_dyn;
};

inline SegmentOps compile_segment(const PulseSchedule &sched, double t0, double t1) {
  SegmentOps seg;
  MatrixXcd stat = MatrixXcd::Zero(sched.space.size(), sched.space.size());
  for (const auto &term : sched.terms) {
    if (term.envelope.t_start >= t1 || term.envelope.t_end <= t0) continue;
    if (term.envelope.kind == PulseEnvelope::Kind::constant) {
      stat += term.envelope.amplitude * term.op.matrix;
      seg.has_static = true;
    } else {
      seg.h_dyn.push_back(term.op.matrix.sparseView(1.0, 1e-15));
      seg.env_dyn.push_back(term.envelope);
    }
  }
  if (seg.has_static) seg.h_static = stat.sparseView(1.0, 1e-15);
  return seg;
}

// Collapse operators with the rate folded in as sqrt(rate) * L.  When every
// L'L is diagonal (photon loss), the anticommutator reduces to an elementwise
// weight (n_i + n_j)/2 which is accumulated into anti_weight.
struct CollapseOps {
  std::vector<SpMatR> l_left;
  std::vector<SpMatC> l_right_adj;  // L^dagger, column-major for rho * L^dagger
  MatrixXcd anti_weight;            // sum_l (n_i + n_j)/2 over diagonal L'L
  std::vector<SpMatR> n_general;    // non-diagonal L'L terms
  VectorXcd ket_decay;              // (1/2) sum_l diag(L'L) for the ket drift
  bool any = false;
};

inline CollapseOps compile_collapse(const PulseSchedule &sched) {
  CollapseOps ops;
  const Eigen::Index d = sched.space.size();
  MatrixXd weight = MatrixXd::Zero(d, d);
  VectorXcd decay = VectorXcd::Zero(d);
  for (const auto &col : sched.collapse_ops) {
    if (col.rate == 0.0) continue;
    ops.any = true;
    MatrixXcd l = std::sqrt(col.rate) * col.op.matrix;
    ops.l_left.push_back(l.sparseView(1.0, 1e-15));
    ops.l_right_adj.push_back(SpMatC(l.adjoint().sparseView(1.0, 1e-15)));
    MatrixXcd n = l.adjoint() * l;
    MatrixXcd off = n;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() < 1e-14) {
      VectorXd diag = n.diagonal().real();
      decay += 0.5 * n.diagonal();
      weight += 0.5 * (diag.replicate(1, d) + diag.transpose().replicate(d, 1));
    } else {
      ops.n_general.push_back(n.sparseView(1.0, 1e-15));
    }
  }
  ops.anti_weight = weight.cast<cxd>();
  ops.ket_decay = decay;
  return ops;
}

// ket right-hand side: psi' = -i H(t) psi, optionally with the no-jump drift
// -(1/2) sum_l L'L psi folded in (col != nullptr)
struct KetRhs {
  const SegmentOps *seg;
  const CollapseOps *col = nullptr;
  void operator()(double t, const MatrixXcd &y, MatrixXcd &out) const {
    if (seg->has_static)
      out.noalias() = seg->h_static * y;
    else
      out.setZero(y.rows(), y.cols());
    for (size_t k = 0; k < seg->h_dyn.size(); ++k) {
      const double c = seg->env_dyn[k].curve(t);
      if (c != 0.0) out.noalias() += c * (seg->h_dyn[k] * y);
    }
    out *= cxd(0.0, -1.0);
    if (col && col->any) {
      out.col(0) -= col->ket_decay.cwiseProduct(y.col(0));
      for (const auto &n : col->n_general) out.noalias() -= 0.5 * (n * y);
    }
  }
};

/// density right-hand side, valid for hermitian rho:
//   rho' = -i(H rho - (H rho)^+) + sum_l L rho L^+ - W .* rho
struct DensityRhs {
  const SegmentOps *seg;
  const CollapseOps *col;
  mutable MatrixXcd a, b;
  void operator()(double t, const MatrixXcd &y, MatrixXcd &out) const {
    if (seg->has_static)
      a.noalias() = seg->h_static * y;
    else
      a.setZero(y.rows(), y.cols());
    for (size_t k = 0; k < seg->h_dyn.size(); ++k) {
      const double c = seg->env_dyn[k].curve(t);
      if (c != 0.0) a.noalias() += c * (seg->h_dyn[k] * y);
    }
    out = cxd(0.0, -1.0) * (a - a.adjoint().eval());
    if (!col->any) return;
    for (size_t l = 0; l < col->l_left.size(); ++l) {
      b.noalias() = col->l_left[l] * y;
      out.noalias() += b * col->l_right_adj[l];
    }
    out -= col->anti_weight.cwiseProduct(y);
    for (const auto &n : col->n_general) {
      b.noalias() = n * y;
      out -= 0.5 * (b + b.adjoint().eval());
    }
  }
};

// Embedded Dormand-Prince 5(4) with FSAL and a PI step controller.
template <class Rhs>
void dopri5_segment(const Rhs &rhs, double t0, double t1, MatrixXcd &y,
                    const IntegratorConfig &cfg, EvolveStats *stats) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const Eigen::Index rows = y.rows(), cols = y.cols();
  MatrixXcd k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols),
      k5(rows, cols), k6(rows, cols), k7(rows, cols), ytmp(rows, cols),
      ynew(rows, cols);

  double t = t0;
  rhs(t, y, k1);
  long n_rhs = 1;

  // initial step from the local time scale |y|/|y'|
  const double y_norm = y.cwiseAbs().maxCoeff();
  const double f_norm = k1.cwiseAbs().maxCoeff();
  double h = 0.01 * (y_norm + cfg.abs_tol) / (f_norm + 1e-300);
  h = std::min({h, t1 - t0, cfg.max_step});

  double err_old = 1.0;
  bool just_rejected = false;
  long n_steps = 0, n_rejected = 0;
  const double t_done = 1e-14 * std::max(std::abs(t1), 1.0);

  while (t1 - t > t_done) {
    h = std::min({h, t1 - t, cfg.max_step});
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      if (stats) {
        stats->n_steps += n_steps;
        stats->n_rejected += n_rejected;
        stats->n_rhs += n_rhs;
      }
      throw IntegratorError("dopri5: step size underflow", t);
    }

    ytmp.noalias() = y + h * a21 * k1;
    rhs(t + c2 * h, ytmp, k2);
    ytmp.noalias() = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp.noalias() = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp.noalias() = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp.noalias() = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew.noalias() = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    n_rhs += 6;

    // scaled max-norm of the embedded error estimate
    ytmp.noalias() = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err =
        (ytmp.cwiseAbs().array() /
         (cfg.abs_tol + cfg.rel_tol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array()))
            .maxCoeff();

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      ++n_steps;
      const double fac_max = just_rejected ? 1.0 : 5.0;
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                   std::pow(err_old, 0.4 / 5.0);
      h *= std::clamp(fac, 0.2, fac_max);
      err_old = std::max(err, 1e-10);
      just_rejected = false;
    } else {
      ++n_rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
      just_rejected = true;
    }
  }
  if (stats) {
    stats->n_steps += n_steps;
    stats->n_rejected += n_rejected;
    stats->n_rhs += n_rhs;
  }
}

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
// Legendre recurrence.  Exact for polynomials up to degree 2n-1.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Eigen::VectorXd x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return {x, w};
}

// integrates over [t_from, t_to], restarting at envelope breakpoints
template <class Rhs>
void integrate_range(const PulseSchedule &sched, MatrixXcd &y, double t_from,
                     double t_to, const CollapseOps *col,
                     const IntegratorConfig &cfg, EvolveStats *stats) {
  const double tol = 1e-12 * std::max(1.0, sched.t_total);
  if (t_to - t_from <= tol) return;
  std::vector<double> pts{t_from};
  for (double p : breakpoints(sched))
    if (p > t_from + tol && p < t_to - tol) pts.push_back(p);
  pts.push_back(t_to);
  for (size_t s = 0; s + 1 < pts.size(); ++s) {
    SegmentOps seg = compile_segment(sched, pts[s], pts[s + 1]);
    Rhs rhs{&seg, col};
    dopri5_segment(rhs, pts[s], pts[s + 1], y, cfg, stats);
  }
}

}  // namespace detail

//------------------------------------------------------------------------------
// Public evolutions
//------------------------------------------------------------------------------

inline FockKet evolve_ket(const PulseSchedule &sched, const FockKet &psi0,
                          const IntegratorConfig &cfg = {},
                          EvolveStats *stats = nullptr) {
  detail::validate_schedule(sched);
  if (!sched.collapse_ops.empty())
    throw std::invalid_argument(
        "evolve_ket: collapse operators present, use evolve_density");
  if (psi0.space != sched.space)
    throw std::invalid_argument("evolve_ket: state on a different space");
  MatrixXcd y = psi0.amplitudes;
  detail::integrate_range<detail::KetRhs>(sched, y, 0.0, sched.t_total, nullptr,
                                          cfg, stats);
  return FockKet(VectorXcd(y.col(0)), sched.space);
}

// No-jump propagation under H_eff = H(t) - (i/2) sum_l rate_l L'L; the norm
// decays by the accumulated jump probability.  States are recorded at each
// requested time (sorted, within [t_from, t_total]); the evolution starts at
// t_from so kicked states can be propagated onward from a jump instant.
inline std::vector<VectorXcd> evolve_ket_damped(
    const PulseSchedule &sched, const VectorXcd &psi0,
    const std::vector<double> &record_times, double t_from = 0.0,
    const IntegratorConfig &cfg = {}, EvolveStats *stats = nullptr) {
  detail::validate_schedule(sched);
  if (psi0.size() != sched.space.size())
    throw std::invalid_argument("evolve_ket_damped: state size mismatch");
  detail::CollapseOps col = detail::compile_collapse(sched);
  std::vector<VectorXcd> out;
  out.reserve(record_times.size());
  MatrixXcd y = psi0;
  double t = t_from;
  for (double target : record_times) {
    if (target < t - 1e-12 || target > sched.t_total * (1.0 + 1e-12))
      throw std::invalid_argument("evolve_ket_damped: bad record time");
    detail::integrate_range<detail::KetRhs>(sched, y, t, target, &col, cfg, stats);
    t = std::max(t, target);
    out.push_back(y.col(0));
  }
  return out;
}

// Lindblad evolution of a hermitian matrix (density or observable-like input).
inline MatrixXcd evolve_density(const PulseSchedule &sched, const MatrixXcd &rho0,
                               const IntegratorConfig &cfg = {},
                               EvolveStats *stats = nullptr) {
  detail::validate_schedule(sched);
  if (rho0.rows() != sched.space.size() || rho0.cols() != sched.space.size())
    throw std::invalid_argument("evolve_density: matrix does not match space");
  const double scale = std::max(1.0, rho0.cwiseAbs().maxCoeff());
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("evolve_density: input must be hermitian");
  MatrixXcd y = 0.5 * (rho0 + rho0.adjoint());
  detail::CollapseOps col = detail::compile_collapse(sched);
  detail::integrate_range<detail::DensityRhs>(sched, y, 0.0, sched.t_total,
                                              &col, cfg, stats);
  return y;
}

// Evolves a batch of hermitian inputs through the same schedule.  The map is
// linear, so channels can be reconstructed from a spanning set of inputs.
inline std::vector<MatrixXcd> channel_apply(const PulseSchedule &sched,
                                            const std::vector<MatrixXcd> &inputs,
                                            const IntegratorConfig &cfg = {},
                                            int n_threads = 0) {
  std::vector<MatrixXcd> out(inputs.size());
  parallel_for(
      long(inputs.size()),
      [&](long i) { out[size_t(i)] = evolve_density(sched, inputs[size_t(i)], cfg); },
      n_threads);
  return out;
}

}  // namespace catqaoa

#endif
