#ifndef _catqaoa_lbfgs_hpp_
#define _catqaoa_lbfgs_hpp_

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace catqaoa {

// Limited-memory BFGS minimizer with a numerical gradient, sized for the
// low-dimensional smooth angle landscapes optimized here.

struct LbfgsOptions {
  int max_iterations = 200;
  int memory = 10;            // stored curvature pairs
  double param_tol = 1e-8;    // stop when the step is this small (inf norm)
  double grad_tol = 1e-10;    // stop when the gradient is this small (inf norm)
  double grad_step_rel = 1e-6;  // central-difference step, relative to |x_i|
};

struct LbfgsReport {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using ScalarFn = std::function<double(const Eigen::VectorXd &)>;

inline Eigen::VectorXd numerical_gradient(const ScalarFn &f,
                                          const Eigen::VectorXd &x,
                                          double step_rel, int *n_evals) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_rel * std::max(1.0, std::abs(x[i]));
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
    if (n_evals) *n_evals += 2;
  }
  return g;
}

inline LbfgsReport lbfgs_minimize(const ScalarFn &f, const Eigen::VectorXd &x0,
                                  const LbfgsOptions &opt = {}) {
  if (x0.size() == 0) throw std::invalid_argument("lbfgs_minimize: empty start");
  LbfgsReport rep;
  rep.x = x0;
  rep.value = f(rep.x);
  rep.evaluations = 1;

  Eigen::VectorXd g = numerical_gradient(f, rep.x, opt.grad_step_rel,
                                         &rep.evaluations);
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int it = 0; it < opt.max_iterations; ++it) {
    rep.iterations = it + 1;
    if (g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      rep.converged = true;
      break;
    }

    // two-loop recursion for the quasi-Newton direction
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = int(s_hist.size()) - 1; i >= 0; --i) {
      alpha[size_t(i)] = rho_hist[size_t(i)] * s_hist[size_t(i)].dot(q);
      q -= alpha[size_t(i)] * y_hist[size_t(i)];
    }
    if (!s_hist.empty()) {
      const Eigen::VectorXd &s = s_hist.back();
      const Eigen::VectorXd &y = y_hist.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(g) >= 0.0) dir = -g;  // not a descent direction: restart

    // backtracking Armijo line search
    const double slope = dir.dot(g);
    double step = 1.0;
    double f_new = rep.value;
    Eigen::VectorXd x_new = rep.x;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = rep.x + step * dir;
      f_new = f(x_new);
      ++rep.evaluations;
      if (f_new <= rep.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      rep.converged = true;  // no further progress along any tried step
      break;
    }

    Eigen::VectorXd g_new = numerical_gradient(f, x_new, opt.grad_step_rel,
                                               &rep.evaluations);
    Eigen::VectorXd s = x_new - rep.x;
    Eigen::VectorXd y = g_new - g;
    rep.x = x_new;
    rep.value = f_new;
    g = g_new;

    if (s.lpNorm<Eigen::Infinity>() < opt.param_tol) {
      rep.converged = true;
      break;
    }
    const double ys = y.dot(s);
    if (ys > 1e-12 * y.norm() * s.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / ys);
      if (int(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }
  return rep;
}

}  // namespace catqaoa

#endif
