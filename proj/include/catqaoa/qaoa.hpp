/**
 * qaoa.hpp
 *
 * Ising problems (exact cover, MaxCut on random graphs), QAOA circuit
 * compilation to rotation gates, qubit-level evaluation backends (ideal
 * statevector, noise-library replay), success metrics, and the two-stage
 * optimizer: exhaustive grid at depth one, then interpolation plus local
 * refinement for deeper circuits.
 *
 * Conventions: qubit i maps to spin s_i with bit 0 <-> s = +1, qubit 0 is
 * the most significant bit of a basis index, and the energy of a bitstring
 * is  offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j.
 */

#ifndef _catqaoa_qaoa_hpp_
#define _catqaoa_qaoa_hpp_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "catqaoa/gates.hpp"
#include "catqaoa/lbfgs.hpp"
#include "catqaoa/noise_library.hpp"
#include "catqaoa/qubit_sim.hpp"

namespace catqaoa {

//------------------------------------------------------------------------------
// Ising problems
//------------------------------------------------------------------------------

struct IsingProblem {
  int n = 0;
  Eigen::MatrixXd J;  // couplings, upper triangle (i < j) is used
  Eigen::VectorXd h;  // local fields
  double offset = 0.0;
  bool maximize = false;  // optimization sense for the energy

  void validate() const {
    if (n < 1) throw std::invalid_argument("IsingProblem: no spins");
    if (J.rows() != n || J.cols() != n || h.size() != n)
      throw std::invalid_argument("IsingProblem: size mismatch");
  }
};

// Squared-violation penalty for selecting subsets so that every element is
// covered exactly once; the ground states are the exact covers (energy 0
// when one exists).  Subsets are index lists into {0,...,n_elements-1}.
inline IsingProblem encode_exact_cover(
    int n_elements, const std::vector<std::vector<int>> &subsets) {
  if (n_elements < 1)
    throw std::invalid_argument("encode_exact_cover: empty universe");
  const int n = int(subsets.size());
  if (n < 1) throw std::invalid_argument("encode_exact_cover: no subsets");
  IsingProblem p;
  p.n = n;
  p.J = Eigen::MatrixXd::Zero(n, n);
  p.h = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < n_elements; ++c) {
    std::vector<int> members;
    for (int v = 0; v < n; ++v)
      if (std::find(subsets[size_t(v)].begin(), subsets[size_t(v)].end(), c) !=
          subsets[size_t(v)].end())
        members.push_back(v);
    const int k = int(members.size());
    if (k == 0)
      throw std::invalid_argument("encode_exact_cover: element " +
                                  std::to_string(c) + " is in no subset");
    p.offset += (double((k - 2) * (k - 2)) + k) / 4.0;
    for (int v : members) p.h[v] += -double(k - 2) / 2.0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) p.J(members[size_t(i)], members[size_t(j)]) += 0.5;
  }
  return p;
}

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // each (i, j) with i < j

  void validate() const {
    if (n < 1) throw std::invalid_argument("Graph: no vertices");
    for (auto [i, j] : edges)
      if (i < 0 || j <= i || j >= n)
        throw std::invalid_argument("Graph: bad edge (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
  }
};

// Energy equals the cut size, so the problem is a maximization.
inline IsingProblem maxcut_hamiltonian(const Graph &g) {
  g.validate();
  IsingProblem p;
  p.n = g.n;
  p.J = Eigen::MatrixXd::Zero(g.n, g.n);
  p.h = Eigen::VectorXd::Zero(g.n);
  p.offset = 0.5 * double(g.edges.size());
  p.maximize = true;
  for (auto [i, j] : g.edges) p.J(i, j) -= 0.5;
  return p;
}

// G(n, p) draw: every pair (i, j), i < j in lexicographic order, consumes one
// uniform variate u = (rng() >> 11) * 2^-53 and the edge is kept iff
// u < edge_prob.  This fixes the graph for a given (n, edge_prob, seed).
inline Graph generate_erdos_renyi(int n, double edge_prob, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_erdos_renyi: no vertices");
  if (edge_prob < 0.0 || edge_prob > 1.0)
    throw std::invalid_argument("generate_erdos_renyi: bad edge probability");
  Graph g;
  g.n = n;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double u = double(rng() >> 11) * 0x1.0p-53;
      if (u < edge_prob) g.edges.emplace_back(i, j);
    }
  return g;
}

//------------------------------------------------------------------------------
// energies and brute force
//------------------------------------------------------------------------------

// Energy of every bitstring, indexed with qubit 0 as the most significant bit.
inline Eigen::VectorXd ising_energies(const IsingProblem &p) {
  p.validate();
  if (p.n > 16)
    throw std::invalid_argument("ising_energies: table too large for n = " +
                                std::to_string(p.n));
  const long dim = 1L << p.n;
  Eigen::VectorXd e(dim);
  std::vector<double> s(size_t(p.n));
  for (long b = 0; b < dim; ++b) {
    for (int i = 0; i < p.n; ++i)
      s[size_t(i)] = ((b >> (p.n - 1 - i)) & 1) ? -1.0 : 1.0;
    double acc = p.offset;
    for (int i = 0; i < p.n; ++i) {
      acc += p.h[i] * s[size_t(i)];
      for (int j = i + 1; j < p.n; ++j)
        if (p.J(i, j) != 0.0) acc += p.J(i, j) * s[size_t(i)] * s[size_t(j)];
    }
    e[b] = acc;
  }
  return e;
}

struct BruteForceResult {
  double best = 0.0;                      // optimal energy in the problem sense
  std::vector<std::uint32_t> solutions;   // all optimal bitstrings, ascending
};

// Gray-code sweep with incremental local fields; one spin flip per step keeps
// the update O(n) and exact for half-integer couplings.
inline BruteForceResult brute_force_solve(const IsingProblem &p,
                                          double tie_tol = 1e-9) {
  p.validate();
  if (p.n > 24)
    throw std::invalid_argument("brute_force_solve: n = " + std::to_string(p.n) +
                                " too large");
  const Eigen::MatrixXd upper =
      p.J.triangularView<Eigen::StrictlyUpper>();
  const Eigen::MatrixXd jsym = upper + upper.transpose();
  std::vector<double> s(size_t(p.n), 1.0);
  Eigen::VectorXd field = p.h + jsym * Eigen::VectorXd::Ones(p.n);
  // all-spins-up start: energy = offset + sum h + sum_{i<j} J_ij
  double energy = p.offset + p.h.sum() + upper.sum();
  const double sign = p.maximize ? 1.0 : -1.0;
  BruteForceResult out;
  out.best = energy;
  out.solutions.push_back(0);

  const std::uint64_t total = std::uint64_t(1) << p.n;
  std::uint64_t gray = 0;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int bit = __builtin_ctzll(step);   // index that flips, LSB side
    const int qubit = p.n - 1 - bit;         // qubit 0 is the MSB
    gray ^= (std::uint64_t(1) << bit);
    energy += -2.0 * s[size_t(qubit)] * field[qubit];
    const double delta = -2.0 * s[size_t(qubit)];
    s[size_t(qubit)] = -s[size_t(qubit)];
    for (int j = 0; j < p.n; ++j)
      if (jsym(j, qubit) != 0.0) field[j] += jsym(j, qubit) * delta;

    if (sign * (energy - out.best) > tie_tol) {
      out.best = energy;
      out.solutions.assign(1, std::uint32_t(gray));
    } else if (std::abs(energy - out.best) <= tie_tol) {
      out.solutions.push_back(std::uint32_t(gray));
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end());
  return out;
}

//------------------------------------------------------------------------------
// circuit compilation
//------------------------------------------------------------------------------

enum class Mixer { X, Y };
enum class InputState { plus, plus_i };
enum class Backend { ideal, cat, standard };

inline std::string mixer_name(Mixer m) { return m == Mixer::X ? "x" : "y"; }
inline std::string input_state_name(InputState s) {
  return s == InputState::plus ? "plus" : "plus_i";
}
inline std::string backend_name(Backend b) {
  switch (b) {
    case Backend::ideal: return "ideal";
    case Backend::cat: return "cat";
    case Backend::standard: return "standard";
  }
  throw std::invalid_argument("backend_name: bad backend");
}

inline Mixer mixer_from_name(const std::string &s) {
  if (s == "x") return Mixer::X;
  if (s == "y") return Mixer::Y;
  throw std::invalid_argument("mixer_from_name: unknown mixer \"" + s + "\"");
}
inline InputState input_state_from_name(const std::string &s) {
  if (s == "plus") return InputState::plus;
  if (s == "plus_i") return InputState::plus_i;
  throw std::invalid_argument("input_state_from_name: unknown input \"" + s + "\"");
}
inline Backend backend_from_name(const std::string &s) {
  if (s == "ideal") return Backend::ideal;
  if (s == "cat") return Backend::cat;
  if (s == "standard") return Backend::standard;
  throw std::invalid_argument("backend_from_name: unknown backend \"" + s + "\"");
}

struct QaoaParams {
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;

  int p() const { return int(gamma.size()); }
  void validate() const {
    if (gamma.size() < 1 || gamma.size() != beta.size())
      throw std::invalid_argument("QaoaParams: gamma/beta size mismatch");
  }
};

struct CircuitGate {
  GateKind kind = GateKind::RZ;
  double angle = 0.0;
  std::vector<int> targets;
};

// One layer per (gamma_k, beta_k): exp(-i gamma H) as RZZ(2 gamma J_ij) and
// RZ(2 gamma h_i) on the nonzero terms, then the mixer rotation 2 beta_k on
// every qubit.
inline std::vector<CircuitGate> compile(const IsingProblem &prob,
                                        const QaoaParams &params, Mixer mixer) {
  prob.validate();
  params.validate();
  std::vector<CircuitGate> gates;
  const GateKind mix = (mixer == Mixer::X) ? GateKind::RX : GateKind::RY;
  for (int k = 0; k < params.p(); ++k) {
    const double g = params.gamma[k];
    for (int i = 0; i < prob.n; ++i)
      for (int j = i + 1; j < prob.n; ++j)
        if (prob.J(i, j) != 0.0)
          gates.push_back({GateKind::RZZ, 2.0 * g * prob.J(i, j), {i, j}});
    for (int i = 0; i < prob.n; ++i)
      if (prob.h[i] != 0.0)
        gates.push_back({GateKind::RZ, 2.0 * g * prob.h[i], {i}});
    for (int i = 0; i < prob.n; ++i)
      gates.push_back({mix, 2.0 * params.beta[k], {i}});
  }
  return gates;
}

// Pairs every compiled gate with its exact unitary and, when a library is
// given, the noise family of the nearest angle bin.  Kinds the library does
// not cover replay noiselessly.
inline std::vector<NoisyGate> attach_noise(const std::vector<CircuitGate> &gates,
                                           const NoiseLibrary *lib) {
  std::vector<NoisyGate> out;
  out.reserve(gates.size());
  for (const CircuitGate &g : gates) {
    NoisyGate ng;
    ng.ideal = target_unitary(g.kind, g.angle);
    ng.targets = g.targets;
    if (lib) {
      const NoiseLibraryEntry *e = lib->find(g.kind, g.angle);
      if (e) ng.kraus = e->noise;
    }
    out.push_back(std::move(ng));
  }
  return out;
}

//------------------------------------------------------------------------------
// evaluation
//------------------------------------------------------------------------------

inline double success_probability(const Eigen::VectorXd &probs,
                                  const std::vector<std::uint32_t> &solutions) {
  if (solutions.empty())
    throw std::invalid_argument("success_probability: no target bitstrings");
  double acc = 0.0;
  for (std::uint32_t b : solutions) {
    if (long(b) >= probs.size())
      throw std::out_of_range("success_probability: bitstring out of range");
    acc += probs[long(b)];
  }
  return acc;
}

inline double approximation_ratio(double expectation, double best) {
  if (best <= 0.0)
    throw std::invalid_argument("approximation_ratio: optimum must be positive");
  return expectation / best;
}

struct QaoaResult {
  QaoaParams params;
  Mixer mixer = Mixer::X;
  InputState input = InputState::plus;
  Backend backend = Backend::ideal;
  double expectation = 0.0;
  double success_probability = 0.0;
  double approximation_ratio = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd distribution;
  double trace = 1.0;  // measured mass before renormalization
  bool optimizer_converged = true;
};

// Runs the compiled circuit on the chosen backend and scores the outcome
// distribution.  Noisy backends require a library; the ideal backend stays on
// the statevector path.  solutions may be empty (success then reads 0).
inline QaoaResult evaluate(const IsingProblem &prob, const QaoaParams &params,
                           Mixer mixer, InputState input, Backend backend,
                           const NoiseLibrary *lib = nullptr,
                           const std::vector<std::uint32_t> &solutions = {}) {
  const std::vector<CircuitGate> gates = compile(prob, params, mixer);
  const bool i_phase = (input == InputState::plus_i);
  MeasuredDistribution dist;
  if (backend == Backend::ideal) {
    StateVector sv = run_circuit_statevector(attach_noise(gates, nullptr),
                                             statevector_plus_state(prob.n, i_phase));
    dist = measure_distribution(sv);
  } else {
    if (!lib)
      throw std::invalid_argument("evaluate: backend \"" + backend_name(backend) +
                                  "\" needs a noise library");
    QubitState state = run_circuit(attach_noise(gates, lib),
                                   qubit_plus_state(prob.n, i_phase));
    dist = measure_distribution(state);
  }
  QaoaResult res;
  res.params = params;
  res.mixer = mixer;
  res.input = input;
  res.backend = backend;
  res.distribution = dist.probs;
  res.trace = dist.trace;
  res.expectation = dist.probs.dot(ising_energies(prob));
  if (!solutions.empty())
    res.success_probability = success_probability(dist.probs, solutions);
  return res;
}

//------------------------------------------------------------------------------
// optimizers
//------------------------------------------------------------------------------

struct GridSpec {
  int n_gamma = 100;
  int n_beta = 100;
  double gamma_max = 2.0 * M_PI;  // grid spans [0, max), endpoint excluded
  double beta_max = M_PI;
};

struct GridResult {
  QaoaParams params;
  double value = 0.0;              // expectation at the best grid point
  Eigen::MatrixXd landscape;       // expectation, row = gamma index
};

namespace detail {

// optimization sense: larger score is better
inline double score(const IsingProblem &p, double expectation) {
  return p.maximize ? expectation : -expectation;
}

}  // namespace detail

// Depth-one exhaustive scan.  Ties keep the first best point in row-major
// (gamma, beta) order.
inline GridResult optimize_grid(const IsingProblem &prob, Mixer mixer,
                                InputState input, const GridSpec &spec = {}) {
  if (spec.n_gamma < 1 || spec.n_beta < 1)
    throw std::invalid_argument("optimize_grid: empty grid");
  GridResult best;
  best.landscape.resize(spec.n_gamma, spec.n_beta);
  double best_score = -std::numeric_limits<double>::infinity();
  QaoaParams params;
  params.gamma.resize(1);
  params.beta.resize(1);
  for (int ig = 0; ig < spec.n_gamma; ++ig) {
    params.gamma[0] = spec.gamma_max * double(ig) / double(spec.n_gamma);
    for (int ib = 0; ib < spec.n_beta; ++ib) {
      params.beta[0] = spec.beta_max * double(ib) / double(spec.n_beta);
      const QaoaResult r = evaluate(prob, params, mixer, input, Backend::ideal);
      best.landscape(ig, ib) = r.expectation;
      const double sc = detail::score(prob, r.expectation);
      if (sc > best_score) {
        best_score = sc;
        best.params = params;
        best.value = r.expectation;
      }
    }
  }
  return best;
}

// Linear schedule interpolation from p to p+1 parameters: the new angle i
// mixes the neighbouring old angles with weights (i-1)/p and (p-i+1)/p.
inline Eigen::VectorXd interp_angles(const Eigen::VectorXd &prev) {
  const int p = int(prev.size());
  if (p < 1) throw std::invalid_argument("interp_angles: empty schedule");
  Eigen::VectorXd out(p + 1);
  for (int i = 1; i <= p + 1; ++i) {
    double v = 0.0;
    if (i >= 2) v += (double(i - 1) / p) * prev[i - 2];
    if (i <= p) v += (double(p - i + 1) / p) * prev[i - 1];
    out[i - 1] = v;
  }
  return out;
}

struct InterpOptions {
  int p_max = 5;
  GridSpec grid;
  LbfgsOptions lbfgs;
  int n_restarts = 4;          // extra perturbed starts per level
  double restart_scale = 0.1;  // stddev of the angle perturbations
  std::uint64_t restart_seed = 12345;
};

struct InterpLevel {
  QaoaParams params;
  double value = 0.0;
  bool converged = true;
};

namespace detail {

inline double wrap_angle(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

}  // namespace detail

// Grid search at depth one, then for each deeper level a local refinement
// from the interpolated schedule, from the previous optimum padded with a
// zero layer (which reproduces its value exactly, so the best expectation
// never degrades with depth), and from a few perturbed copies.
inline std::vector<InterpLevel> optimize_interp(const IsingProblem &prob,
                                                Mixer mixer, InputState input,
                                                const InterpOptions &opt = {}) {
  if (opt.p_max < 1) throw std::invalid_argument("optimize_interp: p_max < 1");
  std::vector<InterpLevel> levels;

  const GridResult grid = optimize_grid(prob, mixer, input, opt.grid);
  levels.push_back({grid.params, grid.value, true});

  const auto objective = [&](int p) {
    return [&prob, mixer, input, p](const Eigen::VectorXd &x) {
      QaoaParams params;
      params.gamma = x.head(p);
      params.beta = x.tail(p);
      const QaoaResult r = evaluate(prob, params, mixer, input, Backend::ideal);
      return prob.maximize ? -r.expectation : r.expectation;
    };
  };

  for (int p = 2; p <= opt.p_max; ++p) {
    const QaoaParams &prev = levels.back().params;
    std::vector<Eigen::VectorXd> starts;

    Eigen::VectorXd interp(2 * p);
    interp.head(p) = interp_angles(prev.gamma);
    interp.tail(p) = interp_angles(prev.beta);
    starts.push_back(interp);

    Eigen::VectorXd padded = Eigen::VectorXd::Zero(2 * p);
    padded.head(p - 1) = prev.gamma;
    padded.segment(p, p - 1) = prev.beta;
    starts.push_back(padded);

    std::mt19937_64 rng(opt.restart_seed ^ std::uint64_t(p));
    std::normal_distribution<double> jitter(0.0, opt.restart_scale);
    for (int r = 0; r < opt.n_restarts; ++r) {
      Eigen::VectorXd x = interp;
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += jitter(rng);
      starts.push_back(std::move(x));
    }

    const ScalarFn f = objective(p);
    LbfgsReport best;
    bool have = false;
    for (const Eigen::VectorXd &x0 : starts) {
      const LbfgsReport rep = lbfgs_minimize(f, x0, opt.lbfgs);
      if (!have || rep.value < best.value) {
        best = rep;
        have = true;
      }
    }

    InterpLevel level;
    level.params.gamma = best.x.head(p);
    level.params.beta = best.x.tail(p);
    for (int i = 0; i < p; ++i) {
      level.params.gamma[i] = detail::wrap_angle(level.params.gamma[i], 2.0 * M_PI);
      level.params.beta[i] = detail::wrap_angle(level.params.beta[i], M_PI);
    }
    level.value = prob.maximize ? -best.value : best.value;
    level.converged = best.converged;
    levels.push_back(std::move(level));
  }
  return levels;
}

//------------------------------------------------------------------------------
// serialization
//------------------------------------------------------------------------------

struct MaxCutInstance {
  Graph graph;
  std::uint64_t seed = 0;
  double c_max = 0.0;
  std::vector<std::uint32_t> solutions;
};

inline MaxCutInstance make_maxcut_instance(int n, double edge_prob,
                                           std::uint64_t seed) {
  MaxCutInstance inst;
  inst.graph = generate_erdos_renyi(n, edge_prob, seed);
  inst.seed = seed;
  const BruteForceResult bf = brute_force_solve(maxcut_hamiltonian(inst.graph));
  inst.c_max = bf.best;
  inst.solutions = bf.solutions;
  return inst;
}

inline nlohmann::json to_json(const MaxCutInstance &inst) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [i, j] : inst.graph.edges) edges.push_back({i, j});
  return {{"n", inst.graph.n},
          {"edges", std::move(edges)},
          {"seed", inst.seed},
          {"c_max", inst.c_max},
          {"solutions", inst.solutions}};
}

inline MaxCutInstance maxcut_instance_from_json(const nlohmann::json &j) {
  MaxCutInstance inst;
  inst.graph.n = j.at("n").get<int>();
  for (const auto &e : j.at("edges"))
    inst.graph.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  inst.graph.validate();
  inst.seed = j.value("seed", std::uint64_t(0));
  inst.c_max = j.at("c_max").get<double>();
  inst.solutions = j.at("solutions").get<std::vector<std::uint32_t>>();
  return inst;
}

inline nlohmann::json to_json(const QaoaResult &r) {
  nlohmann::json out;
  out["p"] = r.params.p();
  out["gamma"] = std::vector<double>(r.params.gamma.begin(), r.params.gamma.end());
  out["beta"] = std::vector<double>(r.params.beta.begin(), r.params.beta.end());
  out["mixer"] = mixer_name(r.mixer);
  out["input"] = input_state_name(r.input);
  out["backend"] = backend_name(r.backend);
  out["expectation"] = r.expectation;
  out["success_probability"] = r.success_probability;
  if (std::isfinite(r.approximation_ratio))
    out["approximation_ratio"] = r.approximation_ratio;
  out["trace"] = r.trace;
  out["optimizer_converged"] = r.optimizer_converged;
  out["distribution"] = std::vector<double>(r.distribution.begin(),
                                            r.distribution.end());
  return out;
}

inline QaoaResult qaoa_result_from_json(const nlohmann::json &j) {
  QaoaResult r;
  const auto gamma = j.at("gamma").get<std::vector<double>>();
  const auto beta = j.at("beta").get<std::vector<double>>();
  r.params.gamma = Eigen::Map<const Eigen::VectorXd>(gamma.data(), long(gamma.size()));
  r.params.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), long(beta.size()));
  r.mixer = mixer_from_name(j.at("mixer").get<std::string>());
  r.input = input_state_from_name(j.at("input").get<std::string>());
  r.backend = backend_from_name(j.at("backend").get<std::string>());
  r.expectation = j.at("expectation").get<double>();
  r.success_probability = j.at("success_probability").get<double>();
  r.approximation_ratio = j.value("approximation_ratio",
                                  std::numeric_limits<double>::quiet_NaN());
  r.trace = j.value("trace", 1.0);
  r.optimizer_converged = j.value("optimizer_converged", true);
  const auto dist = j.at("distribution").get<std::vector<double>>();
  r.distribution = Eigen::Map<const Eigen::VectorXd>(dist.data(), long(dist.size()));
  return r;
}

}  // namespace catqaoa

#endif
