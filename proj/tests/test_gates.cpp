#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include "catqaoa/gates.hpp"

using namespace catqaoa;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs(const MatrixXcd &m) { return m.cwiseAbs().maxCoeff(); }

double channel_distance(const PauliChannel &a, const PauliChannel &b) {
  REQUIRE(a.out.size() == b.out.size());
  double d = 0.0;
  for (size_t j = 0; j < a.out.size(); ++j)
    d = std::max(d, max_abs(a.out[j] - b.out[j]));
  return d;
}

// loss-free channel of a schedule against the ideal rotation
double gate_fidelity(const PulseSchedule &sched, const MatrixXcd &frame,
                     const MatrixXcd &target) {
  return average_gate_fidelity(subspace_channel(sched, frame), target);
}

}  // namespace

TEST_CASE("pauli strings are orthogonal and ordered lexicographically",
          "[pauli]") {
  const auto basis = pauli_basis(2);
  REQUIRE(basis.size() == 16);
  CHECK(max_abs(basis[0] - MatrixXcd::Identity(4, 4)) == 0.0);
  // index 7 = XZ: first qubit is the leftmost factor
  CHECK(max_abs(basis[7] - catqaoa::detail::kron(pauli_x(), pauli_z())) == 0.0);
  CHECK(pauli_label(7, 2) == "XZ");
  CHECK(pauli_label(0, 2) == "II");
  CHECK(pauli_label(9, 2) == "YX");
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j) {
      const cxd tr = (basis[i].adjoint() * basis[j]).trace();
      CHECK_THAT(tr.real() - (i == j ? 4.0 : 0.0), WithinAbs(0.0, 1e-12));
      CHECK_THAT(tr.imag(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("rotation gates match their exponential form", "[pauli]") {
  const double theta = 0.83;
  const cxd mi(0, -1);
  CHECK(max_abs(rx_gate(theta) -
                (mi * theta / 2.0 * pauli_x()).exp().eval()) < 1e-14);
  CHECK(max_abs(ry_gate(theta) -
                (mi * theta / 2.0 * pauli_y()).exp().eval()) < 1e-14);
  CHECK(max_abs(rz_gate(theta) -
                (mi * theta / 2.0 * pauli_z()).exp().eval()) < 1e-14);
  const MatrixXcd zz = catqaoa::detail::kron(pauli_z(), pauli_z());
  CHECK(max_abs(rzz_gate(theta) - (mi * theta / 2.0 * zz).exp().eval()) < 1e-14);
}

TEST_CASE("average gate fidelity has the expected fixed points", "[pauli]") {
  // identity channel against identity target
  PauliChannel id = unitary_channel(MatrixXcd::Identity(2, 2));
  CHECK_THAT(average_gate_fidelity(id, MatrixXcd::Identity(2, 2)),
             WithinAbs(1.0, 1e-12));

  // fully depolarizing channel: only the identity string survives
  PauliChannel dep;
  dep.n_qubits = 1;
  dep.out = {MatrixXcd::Identity(2, 2), MatrixXcd::Zero(2, 2),
             MatrixXcd::Zero(2, 2), MatrixXcd::Zero(2, 2)};
  CHECK_THAT(average_gate_fidelity(dep, MatrixXcd::Identity(2, 2)),
             WithinAbs(0.5, 1e-12));
  CHECK_THAT(average_gate_fidelity(dep, rx_gate(1.3)), WithinAbs(0.5, 1e-12));

  // unitary channel against the same unitary
  const MatrixXcd u = rzz_gate(0.7);
  CHECK_THAT(average_gate_fidelity(unitary_channel(u), u),
             WithinAbs(1.0, 1e-12));

  // a channel with a non-hermitian image is reported, not returned
  PauliChannel broken = id;
  broken.out[1] = cxd(0, 1) * pauli_x();
  CHECK_THROWS_AS(average_gate_fidelity(broken, MatrixXcd::Identity(2, 2)),
                  std::runtime_error);

  CHECK(channel_leakage(id) == 0.0);
}

TEST_CASE("Z rotation reaches its angle without loss", "[gates]") {
  KnrParams p;
  FockSpace space(20);
  const MatrixXcd frame = logical_frame(cat_basis(space, p.alpha()));

  for (double phi : {0.3, 1.0, 2.5}) {
    PulseSchedule sched = rz_schedule(phi, p, space);
    const double f = gate_fidelity(sched, frame, rz_gate(phi));
    INFO("phi = " << phi);
    CHECK(f > 0.9999);
  }

  // drive sign flips with the angle, so the fidelity curve is symmetric
  PauliChannel fwd = subspace_channel(rz_schedule(0.9, p, space), frame);
  PauliChannel bwd = subspace_channel(rz_schedule(-0.9, p, space), frame);
  CHECK_THAT(average_gate_fidelity(fwd, rz_gate(0.9)) -
                 average_gate_fidelity(bwd, rz_gate(-0.9)),
             WithinAbs(0.0, 1e-6));
}

TEST_CASE("X rotation calibration covers [0, pi] monotonically", "[gates]") {
  KnrParams p;
  FockSpace space(20);
  RxCalibrationTable table = calibrate_rx(p, space, {}, 10);

  REQUIRE(table.entries.size() == 10);
  CHECK(std::abs(table.entries.front().theta) < 1e-3);
  CHECK(table.entries.back().theta > 3.0);
  for (size_t i = 1; i < table.entries.size(); ++i)
    CHECK(table.entries[i].theta > table.entries[i - 1].theta);
  for (const auto &e : table.entries) {
    INFO("delta0 = " << e.delta0);
    CHECK(e.fidelity > 0.9999);
  }

  // inverse lookup round trip: request an angle, build the pulse, check it
  const double theta_req = 1.0;
  const double delta0 = table.delta0_for(theta_req);
  PulseSchedule sched = rx_schedule(delta0, p, space);
  const MatrixXcd frame = logical_frame(cat_basis(space, p.alpha()));
  const double f = gate_fidelity(sched, frame, rx_gate(theta_req));
  CHECK(f > 0.999);

  CHECK_THROWS_AS(rx_schedule(4.5, p, space), std::out_of_range);
  CHECK_THROWS_AS(rx_schedule(-0.1, p, space), std::out_of_range);
}

TEST_CASE("Y rotation composite realizes R_Y(+phi)", "[gates]") {
  KnrParams p;
  FockSpace space(20);
  const MatrixXcd frame = logical_frame(cat_basis(space, p.alpha()));

  for (double phi : {0.8, 2.0}) {
    const double f =
        gate_fidelity(ry_schedule(phi, p, space), frame, ry_gate(phi));
    INFO("phi = " << phi);
    CHECK(f > 0.999);
  }

  // zero angle leaves the qubit alone up to the composite's own error
  CHECK(gate_fidelity(ry_schedule(0.0, p, space), frame,
                      MatrixXcd::Identity(2, 2)) > 0.99);

  // the drive sign matters: the reversed sign lands far from the target
  const double wrong = gate_fidelity(ry_schedule(0.8, p, space), frame,
                                     ry_gate(-0.8));
  CHECK(wrong < 0.9);
}

TEST_CASE("ZZ rotation reaches its angle on two modes", "[gates]") {
  KnrParams p;
  FockSpace space(20, 2);
  const MatrixXcd frame = logical_frame(cat_basis(FockSpace(20), p.alpha()), 2);

  for (double theta : {0.4, 1.6}) {
    PulseSchedule sched = rzz_schedule(theta, p, space);
    PauliChannel ch = subspace_channel(sched, frame);
    INFO("theta = " << theta);
    CHECK(average_gate_fidelity(ch, rzz_gate(theta)) > 0.999);
    CHECK(channel_leakage(ch) < 0.01);
  }
}

TEST_CASE("single-qubit schedules embed on a chosen mode", "[gates]") {
  KnrParams p;
  FockSpace space(20, 2);
  const MatrixXcd frame = logical_frame(cat_basis(FockSpace(20), p.alpha()), 2);
  const double phi = 0.7;

  // acting on the second mode leaves the first logical qubit alone
  PulseSchedule sched = rz_schedule(phi, p, space, 0.0, 1);
  const MatrixXcd target =
      catqaoa::detail::kron(MatrixXcd::Identity(2, 2), rz_gate(phi));
  CHECK(average_gate_fidelity(subspace_channel(sched, frame), target) > 0.9999);

  CHECK_THROWS_AS(rz_schedule(0.3, p, space, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(ry_schedule(0.3, p, space, -1), std::invalid_argument);
}

TEST_CASE("jump expansion agrees with the master equation on one mode",
          "[gates][lossy]") {
  KnrParams p;
  FockSpace space(20);
  const double kappa = 1.0 / 1500.0;
  const MatrixXcd frame = logical_frame(cat_basis(space, p.alpha()));

  PulseSchedule sched = rz_schedule(1.0, p, space);
  add_photon_loss(sched, kappa);

  PauliChannel exact =
      subspace_channel(sched, frame, {}, 0, ChannelMethod::master_equation);
  PauliChannel jump =
      subspace_channel(sched, frame, {}, 0, ChannelMethod::jump_expansion);

  // two-jump weight ~ (kappa <n> T)^2 / 2 ~ 1e-5 at alpha = 2, T = 2
  CHECK(channel_distance(exact, jump) < 2e-4);

  const double f_exact = average_gate_fidelity(exact, rz_gate(1.0));
  const double f_jump = average_gate_fidelity(jump, rz_gate(1.0));
  CHECK(f_exact > 0.99);
  CHECK(f_exact < 0.999);
  CHECK_THAT(f_exact - f_jump, WithinAbs(0.0, 1e-4));

  // trace can only leave the subspace or be lost to the neglected jumps
  CHECK(jump.out[0].trace().real() <= 2.0 + 1e-9);
}

TEST_CASE("jump expansion agrees with the master equation on two modes",
          "[gates][lossy]") {
  // small space so the dense master equation stays affordable
  KnrParams p;
  p.G = 1.0;  // alpha = 1
  FockSpace space(8, 2);
  const double kappa = 1.0 / 1500.0;
  const MatrixXcd frame = logical_frame(cat_basis(FockSpace(8), p.alpha()), 2);

  PulseSchedule sched = rzz_schedule(0.8, p, space);
  add_photon_loss(sched, kappa);

  PauliChannel exact =
      subspace_channel(sched, frame, {}, 0, ChannelMethod::master_equation);
  PauliChannel jump =
      subspace_channel(sched, frame, {}, 0, ChannelMethod::jump_expansion);

  // neglected two-jump weight: (kappa n_total T)^2 / 2 with n_total ~ 2
  const double budget = kappa * 2.0 * sched.t_total;
  CHECK(channel_distance(exact, jump) < 2.0 * budget * budget + 1e-6);

  const double f_exact = average_gate_fidelity(exact, rzz_gate(0.8));
  const double f_jump = average_gate_fidelity(jump, rzz_gate(0.8));
  CHECK_THAT(f_exact - f_jump, WithinAbs(0.0, 1e-4));
}

TEST_CASE("damped ket evolution reproduces the no-jump propagator", "[gates]") {
  // with a single diagonal collapse the no-jump dynamics stays exact:
  // compare against the dense exponential of H_eff = H - (i/2) kappa n
  FockSpace space(12);
  KnrParams p;
  const double kappa = 0.02, T = 0.9;

  PulseSchedule sched;
  sched.space = space;
  sched.t_total = T;
  sched.add_term(knr_hamiltonian(space, p), constant_envelope(1.0, 0.0, T));
  add_photon_loss(sched, kappa);

  const MatrixXcd h_eff =
      knr_hamiltonian(space, p).matrix -
      cxd(0, 0.5) * kappa * number_op(space).matrix;
  const VectorXcd psi0 = coherent_state(space, 1.1).amplitudes;
  const VectorXcd oracle =
      ((cxd(0, -1) * T * h_eff).exp() * psi0).eval();

  const auto rec = evolve_ket_damped(sched, psi0, {0.5 * T, T});
  REQUIRE(rec.size() == 2);
  CHECK(max_abs(rec[1] - oracle) < 1e-7);
  CHECK(rec[1].norm() < 1.0);

  // restarting from the midpoint state lands on the same endpoint
  const auto rerun = evolve_ket_damped(sched, rec[0], {T}, 0.5 * T);
  CHECK(max_abs(rerun[0] - rec[1]) < 1e-8);
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly", "[gates]") {
  const auto [x, w] = catqaoa::detail::gauss_legendre(16);
  REQUIRE(x.size() == 16);
  CHECK_THAT(w.sum(), WithinAbs(2.0, 1e-13));
  double acc = 0.0;
  for (int i = 0; i < 16; ++i) acc += w[i] * std::pow(x[i], 30);
  CHECK_THAT(acc, WithinAbs(2.0 / 31.0, 1e-12));  // degree 30 < 2*16 - 1
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += w[i] * std::sin(2.0 * x[i]);
  CHECK_THAT(s, WithinAbs(0.0, 1e-13));
}
