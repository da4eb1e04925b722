#include <catch2/catch_amalgamated.hpp>

#include "catqaoa/fock.hpp"

using namespace catqaoa;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

namespace {

// closed-form overlap of two coherent states
cxd coherent_overlap(cxd beta, cxd alpha) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) +
                  std::conj(beta) * alpha);
}

double max_abs(const MatrixXcd &m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("annihilation operator has sqrt(n) ladder entries", "[fock]") {
  FockSpace space(7);
  FockOperator a = annihilation_op(space);
  for (int n = 1; n < space.dim; ++n) {
    CHECK(a.matrix(n - 1, n).real() == Approx(std::sqrt(double(n))));
    CHECK(a.matrix(n - 1, n).imag() == 0.0);
  }
  CHECK(a.matrix.cwiseAbs().sum() == Approx(a.matrix.diagonal(1).cwiseAbs().sum()));

  SECTION("commutator [a, a+] is the identity away from the truncation edge") {
    MatrixXcd comm = a.matrix * a.matrix.adjoint() - a.matrix.adjoint() * a.matrix;
    for (int n = 0; n < space.dim - 1; ++n)
      CHECK(comm(n, n).real() == Approx(1.0));
    CHECK(comm(space.dim - 1, space.dim - 1).real() == Approx(1.0 - space.dim));
  }

  SECTION("mode index is validated") {
    CHECK_THROWS_AS(annihilation_op(space, 1), std::out_of_range);
    CHECK_THROWS_AS(annihilation_op(FockSpace(4, 2), -1), std::out_of_range);
  }
}

TEST_CASE("multi-mode embedding puts mode 0 on the most significant digit",
          "[fock]") {
  FockSpace two(3, 2);
  FockOperator n0 = number_op(two, 0);
  FockOperator n1 = number_op(two, 1);
  // basis state |n0=2, n1=1> sits at composite index 2*3+1
  VectorXcd v = VectorXcd::Zero(two.size());
  v(2 * 3 + 1) = 1.0;
  FockKet ket(v, two);
  CHECK(expectation(n0, ket).real() == Approx(2.0));
  CHECK(expectation(n1, ket).real() == Approx(1.0));

  SECTION("kron of kets matches the same convention") {
    FockSpace one(3);
    VectorXcd a = VectorXcd::Zero(3), b = VectorXcd::Zero(3);
    a(2) = 1.0;
    b(1) = 1.0;
    FockKet prod = kron(FockKet(a, one), FockKet(b, one));
    CHECK_THAT(std::abs(prod.amplitudes(2 * 3 + 1) - cxd(1.0, 0.0)),
               WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("coherent state matches closed-form amplitudes and overlaps", "[fock]") {
  FockSpace space(20);
  const cxd alpha(1.3, -0.4);
  FockKet ket = coherent_state(space, alpha);

  // amplitudes e^{-|a|^2/2} a^n / sqrt(n!)
  double fact = 1.0;
  for (int n = 0; n < 6; ++n) {
    if (n > 0) fact *= n;
    cxd expect = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) /
                 std::sqrt(fact);
    CHECK_THAT(std::abs(ket.amplitudes(n) - expect), WithinAbs(0.0, 1e-12));
  }

  FockKet other = coherent_state(space, cxd(0.7, 0.2));
  cxd ov = other.amplitudes.dot(ket.amplitudes);
  CHECK_THAT(std::abs(ov - coherent_overlap(cxd(0.7, 0.2), alpha)),
             WithinAbs(0.0, 1e-9));

  SECTION("mean photon number is |alpha|^2") {
    CHECK(expectation(number_op(space), ket).real() ==
          Approx(std::norm(alpha)).margin(1e-9));
  }
}

TEST_CASE("coherent state is an approximate annihilation eigenstate", "[fock]") {
  const double alpha = 2.0;

  SECTION("residual below 1e-6 once the ladder is long enough") {
    FockSpace space(32);
    FockKet ket = coherent_state(space, alpha);
    VectorXcd r = annihilation_op(space).matrix * ket.amplitudes -
                  alpha * ket.amplitudes;
    CHECK(r.norm() < 1e-6);
  }

  SECTION("dim=20 truncation floor is a few 1e-4 and equals alpha*c_{d-1}") {
    FockSpace space(20);
    FockKet ket = coherent_state(space, alpha);
    VectorXcd r = annihilation_op(space).matrix * ket.amplitudes -
                  alpha * ket.amplitudes;
    const double expected = alpha * std::abs(ket.amplitudes(space.dim - 1));
    CHECK(r.norm() == Approx(expected).epsilon(1e-10));
    CHECK(r.norm() > 1e-4);
    CHECK(r.norm() < 5e-4);
  }
}

TEST_CASE("cat states are parity eigenstates with disjoint support", "[fock]") {
  FockSpace space(20);
  const double alpha = 2.0;
  FockKet even = cat_state(space, alpha, Parity::even);
  FockKet odd = cat_state(space, alpha, Parity::odd);

  FockOperator pi = parity_op(space);
  CHECK_THAT((pi.matrix * even.amplitudes - even.amplitudes).norm(),
             WithinAbs(0.0, 1e-14));
  CHECK_THAT((pi.matrix * odd.amplitudes + odd.amplitudes).norm(),
             WithinAbs(0.0, 1e-14));
  CHECK_THAT(std::abs(even.amplitudes.dot(odd.amplitudes)), WithinAbs(0.0, 1e-14));
  CHECK(even.norm() == Approx(1.0).margin(1e-12));
  CHECK(odd.norm() == Approx(1.0).margin(1e-12));

  SECTION("overlap with |alpha> follows the normalization constants") {
    FockKet coh = coherent_state(space, alpha);
    const double e2 = std::exp(-2.0 * alpha * alpha);
    CHECK(std::abs(coh.amplitudes.dot(even.amplitudes)) ==
          Approx(std::sqrt((1.0 + e2) / 2.0)).margin(1e-6));
    CHECK(std::abs(coh.amplitudes.dot(odd.amplitudes)) ==
          Approx(std::sqrt((1.0 - e2) / 2.0)).margin(1e-6));
  }
}

TEST_CASE("cat states solve the two-photon-driven Kerr eigenproblem", "[fock]") {
  // H = -K a+a+aa + G(a+a+ + aa) has |alpha = sqrt(G/K)> (both signs) as
  // degenerate eigenstates with eigenvalue G^2/K, because
  // H = -K (a+^2 - G/K)(a^2 - G/K) + G^2/K.
  struct Case {
    double G;
    int dim_ok;
  };
  for (const Case c : {Case{1.0, 20}, Case{4.0, 32}, Case{9.0, 48}}) {
    KnrParams p;
    p.K = 1.0;
    p.G = c.G;
    FockSpace space(c.dim_ok);
    FockOperator h = knr_hamiltonian(space, p);
    const double ev = p.G * p.G / p.K;
    for (Parity par : {Parity::even, Parity::odd}) {
      FockKet cat = cat_state(space, p.alpha(), par);
      VectorXcd r = h.matrix * cat.amplitudes - ev * cat.amplitudes;
      INFO("G = " << c.G << " dim = " << c.dim_ok);
      CHECK(r.norm() < 1e-5);
    }
  }

  SECTION("dim=20 residual floor at alpha=2 is a few 1e-3") {
    KnrParams p;
    FockSpace space(20);
    FockOperator h = knr_hamiltonian(space, p);
    FockKet cat = cat_state(space, p.alpha(), Parity::even);
    VectorXcd r = h.matrix * cat.amplitudes - (p.G * p.G / p.K) * cat.amplitudes;
    CHECK(r.norm() > 5e-3);
    CHECK(r.norm() < 2e-2);
  }
}

TEST_CASE("knr hamiltonian terms behave under detuning and drive phase", "[fock]") {
  FockSpace space(16);
  KnrParams base;

  SECTION("hermitian for generic parameters") {
    KnrParams p;
    p.K = 0.7;
    p.G = 2.3;
    p.delta = 0.11;
    p.phi = 0.9;
    CHECK(knr_hamiltonian(space, p).is_hermitian(1e-12));
  }

  SECTION("detuning adds -delta n") {
    KnrParams p = base;
    p.delta = 0.37;
    MatrixXcd diff = knr_hamiltonian(space, p).matrix -
                     knr_hamiltonian(space, base).matrix;
    CHECK_THAT(max_abs(diff + 0.37 * number_op(space).matrix), WithinAbs(0.0, 1e-12));
  }

  SECTION("drive phase acts as a frame rotation exp(i phi n)") {
    KnrParams p = base;
    p.phi = 0.6;
    VectorXcd ph(space.dim);
    for (int n = 0; n < space.dim; ++n) ph(n) = std::exp(cxd(0, 0.6 * n));
    MatrixXcd u = MatrixXcd(ph.asDiagonal());
    MatrixXcd rotated = u * knr_hamiltonian(space, base).matrix * u.adjoint();
    CHECK_THAT(max_abs(knr_hamiltonian(space, p).matrix - rotated),
               WithinAbs(0.0, 1e-10));
  }

  SECTION("commutes with photon-number parity") {
    KnrParams p = base;
    p.delta = 0.2;
    p.phi = 1.1;
    MatrixXcd h = knr_hamiltonian(space, p).matrix;
    MatrixXcd pi = parity_op(space).matrix;
    CHECK_THAT(max_abs(h * pi - pi * h), WithinAbs(0.0, 1e-12));
  }

  SECTION("two-mode embedding leaves the other mode alone") {
    FockSpace two(6, 2);
    MatrixXcd h1 = knr_hamiltonian(FockSpace(6), base).matrix;
    MatrixXcd h_on_1 = knr_hamiltonian(two, base, 1).matrix;
    MatrixXcd expected = catqaoa::detail::kron(MatrixXcd::Identity(6, 6), h1);
    CHECK_THAT(max_abs(h_on_1 - expected), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("cat basis is orthonormal with idempotent projector", "[fock]") {
  FockSpace space(20);
  for (double alpha : {0.5, 1.0, 2.0}) {
    CatBasis cb = cat_basis(space, alpha);
    INFO("alpha = " << alpha);
    CHECK_THAT(std::abs(cb.ket0.norm() - 1.0), WithinAbs(0.0, 1e-10));
    CHECK_THAT(std::abs(cb.ket1.norm() - 1.0), WithinAbs(0.0, 1e-10));
    CHECK_THAT(std::abs(cb.ket0.amplitudes.dot(cb.ket1.amplitudes)),
               WithinAbs(0.0, 1e-10));
    CHECK_THAT(max_abs(cb.projector * cb.projector - cb.projector),
               WithinAbs(0.0, 1e-10));
  }
}

TEST_CASE("embedded paulis close the su(2) algebra on the cat subspace", "[fock]") {
  CatBasis cb = cat_basis(FockSpace(20), 2.0);
  CHECK_THAT(max_abs(cb.pauli_x * cb.pauli_y - cxd(0, 1) * cb.pauli_z),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(max_abs(cb.pauli_z * cb.pauli_x - cxd(0, 1) * cb.pauli_y),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(max_abs(cb.pauli_y * cb.pauli_z - cxd(0, 1) * cb.pauli_x),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(max_abs(cb.pauli_x * cb.pauli_x - cb.projector), WithinAbs(0.0, 1e-12));

  SECTION("logical kets are pauli_z eigenstates") {
    CHECK_THAT((cb.pauli_z * cb.ket0.amplitudes - cb.ket0.amplitudes).norm(),
               WithinAbs(0.0, 1e-12));
    CHECK_THAT((cb.pauli_z * cb.ket1.amplitudes + cb.ket1.amplitudes).norm(),
               WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("projected annihilation operator decomposes over Z and Y", "[fock]") {
  for (double alpha : {1.0, 2.0}) {
    FockSpace space(20);
    CatBasis cb = cat_basis(space, alpha);
    MatrixXcd a = annihilation_op(space).matrix;
    MatrixXcd lhs = cb.projector * a * cb.projector;
    MatrixXcd rhs = 0.5 * cb.alpha_eff *
                    ((cb.eta + 1.0 / cb.eta) * cb.pauli_z +
                     cxd(0, 1) * (cb.eta - 1.0 / cb.eta) * cb.pauli_y);
    INFO("alpha = " << alpha);
    CHECK(max_abs(lhs - rhs) < 1e-8);
  }

  SECTION("eta approaches the normalization-constant ratio") {
    CatBasis cb = cat_basis(FockSpace(20), 2.0);
    const double e2 = std::exp(-2.0 * 4.0);
    CHECK(cb.eta == Approx(std::sqrt((1.0 - e2) / (1.0 + e2))).margin(1e-6));
    CHECK(cb.alpha_eff == Approx(2.0).margin(1e-6));
    CHECK(cb.eta < 1.0);
  }
}

TEST_CASE("wigner function of the vacuum is the unit gaussian", "[fock][wigner]") {
  FockSpace space(20);
  VectorXcd vac = VectorXcd::Zero(space.dim);
  vac(0) = 1.0;
  FockKet ket(vac, space);

  WignerGrid coarse;
  coarse.nx = coarse.np = 41;
  WignerResult w = wigner(ket, coarse);
  CHECK(w.w((coarse.nx - 1) / 2, (coarse.np - 1) / 2) ==
        Approx(1.0 / M_PI).margin(1e-10));
  for (int i : {5, 13, 27}) {
    for (int j : {8, 20, 33}) {
      const double expect =
          std::exp(-w.x(i) * w.x(i) - w.p(j) * w.p(j)) / M_PI;
      CHECK_THAT(w.w(i, j) - expect, WithinAbs(0.0, 1e-10));
    }
  }

  SECTION("grid integral is unity") {
    WignerGrid grid;
    grid.nx = grid.np = 101;
    CHECK(wigner(ket, grid).integral() == Approx(1.0).margin(1e-3));
  }
}

TEST_CASE("wigner function of a displaced state shifts accordingly",
          "[fock][wigner]") {
  FockSpace space(30);
  const double alpha = 1.5;
  FockKet ket = coherent_state(space, alpha);
  WignerGrid grid;
  grid.nx = grid.np = 81;
  WignerResult w = wigner(ket, grid);
  const double x0 = std::sqrt(2.0) * alpha;
  for (int i : {10, 40, 62}) {
    for (int j : {10, 40, 62}) {
      const double expect =
          std::exp(-(w.x(i) - x0) * (w.x(i) - x0) - w.p(j) * w.p(j)) / M_PI;
      CHECK_THAT(w.w(i, j) - expect, WithinAbs(0.0, 1e-8));
    }
  }
  CHECK(w.integral() == Approx(1.0).margin(1e-3));
}

TEST_CASE("wigner function of cat states shows lobes, parity and fringes",
          "[fock][wigner]") {
  FockSpace space(24);
  const double alpha = 2.0;
  FockKet even = cat_state(space, alpha, Parity::even);
  FockKet odd = cat_state(space, alpha, Parity::odd);

  WignerGrid point;
  point.nx = point.np = 3;  // includes the origin at the center
  CHECK(wigner(even, point).w(1, 1) == Approx(1.0 / M_PI).margin(1e-9));
  CHECK(wigner(odd, point).w(1, 1) == Approx(-1.0 / M_PI).margin(1e-9));

  WignerGrid lobe;
  lobe.x_min = std::sqrt(2.0) * alpha - 0.5;
  lobe.x_max = std::sqrt(2.0) * alpha + 0.5;
  lobe.p_min = -0.5;
  lobe.p_max = 0.5;
  lobe.nx = lobe.np = 5;
  // each lobe carries half the weight of a displaced gaussian
  CHECK(wigner(even, lobe).w(2, 2) == Approx(0.5 / M_PI).epsilon(0.01));

  SECTION("interference fringes alternate sign along p") {
    WignerGrid fringe;
    fringe.x_min = fringe.x_max = 0.0;
    fringe.nx = 1;
    fringe.p_min = 0.0;
    fringe.p_max = 1.0;
    fringe.np = 51;
    WignerResult w = wigner(even, fringe);
    // W(0,p) ~ cos(2 sqrt2 alpha p) has zeros at p = (pi/2 + k pi)/(2 sqrt2 alpha),
    // i.e. p ~ 0.278 and 0.833 inside (0, 1] for alpha = 2
    int sign_changes = 0;
    for (int j = 1; j < fringe.np; ++j)
      if (w.w(0, j) * w.w(0, j - 1) < 0) ++sign_changes;
    const int expected =
        int((2.0 * std::sqrt(2.0) * alpha - M_PI / 2.0) / M_PI) + 1;
    CHECK(sign_changes == expected);
    CHECK(expected == 2);
  }

  SECTION("grid integral stays normalized") {
    WignerGrid grid;
    grid.nx = grid.np = 121;
    CHECK(wigner(even, grid).integral() == Approx(1.0).margin(1e-3));
  }
}

TEST_CASE("displacement operator reproduces coherent states from vacuum",
          "[fock]") {
  const int dim = 40;
  const cxd beta(0.9, -1.2);
  MatrixXcd d = displacement_op(dim, beta);
  FockKet coh = coherent_state(FockSpace(dim), beta);
  CHECK_THAT((d.col(0) - coh.amplitudes).norm(), WithinAbs(0.0, 1e-12));

  SECTION("unitary on the well-converged block") {
    MatrixXcd g = d.adjoint() * d;
    CHECK_THAT(max_abs(g.topLeftCorner(8, 8) - MatrixXcd::Identity(8, 8)),
               WithinAbs(0.0, 1e-8));
  }
}

TEST_CASE("space and ket constructors validate their inputs", "[fock]") {
  CHECK_THROWS_AS(FockSpace(1), std::invalid_argument);
  CHECK_THROWS_AS(FockSpace(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(coherent_state(FockSpace(8, 2), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FockKet(VectorXcd::Zero(5), FockSpace(8)), std::invalid_argument);
  CHECK_THROWS_AS(FockOperator(MatrixXcd::Zero(3, 3), FockSpace(8)),
                  std::invalid_argument);
  CHECK(FockSpace(20, 2).size() == 400);
}
