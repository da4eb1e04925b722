/**
 * test_noise_library.cpp
 */

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include <catqaoa/noise_library.hpp>

using namespace catqaoa;

namespace {

double completeness_excess(const KrausSet &set, Eigen::Index d) {
  const MatrixXcd gap =
      kraus_completeness(set, d) - MatrixXcd::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (gap + gap.adjoint()));
  return es.eigenvalues().maxCoeff();
}

double ptm_distance(const PauliChannel &a, const PauliChannel &b) {
  return (ptm_from_channel(a).entries - ptm_from_channel(b).entries)
      .cwiseAbs()
      .maxCoeff();
}

const RxCalibrationTable &shared_table() {
  static const RxCalibrationTable table = [] {
    KnrParams p;
    return calibrate_rx(p, FockSpace{20, 1});
  }();
  return table;
}

const NoiseLibrary &shared_cat_library() {
  static const NoiseLibrary lib = [] {
    CatLibraryConfig cfg;
    cfg.n_bins = 3;
    return build_cat_library(cfg, shared_table());
  }();
  return lib;
}

}  // namespace

TEST_CASE("angle reduction folds into [0, pi]") {
  CHECK(NoiseLibrary::reduce_angle(0.0) == 0.0);
  CHECK(NoiseLibrary::reduce_angle(1.2) == Catch::Approx(1.2));
  CHECK(NoiseLibrary::reduce_angle(M_PI) == Catch::Approx(M_PI));
  CHECK(NoiseLibrary::reduce_angle(2.0 * M_PI - 0.3) == Catch::Approx(0.3));
  CHECK(NoiseLibrary::reduce_angle(-0.3) == Catch::Approx(0.3));
  CHECK(NoiseLibrary::reduce_angle(2.0 * M_PI + 0.5) == Catch::Approx(0.5));
  CHECK(NoiseLibrary::reduce_angle(3.5 * M_PI) == Catch::Approx(M_PI / 2));
}

TEST_CASE("nearest bin lookup") {
  NoiseLibrary lib;
  for (double a : {3.0, 1.0, 0.0, 2.0}) {
    NoiseLibraryEntry e;
    e.kind = GateKind::RX;
    e.angle = a;
    e.noise.operators = {MatrixXcd::Identity(2, 2)};
    lib.entries.push_back(e);
  }
  lib.sort();
  REQUIRE(lib.entries.size() == 4);
  CHECK(lib.entries.front().angle == 0.0);
  CHECK(lib.entries.back().angle == 3.0);

  CHECK(lib.nearest(GateKind::RX, 1.4).angle == 1.0);
  CHECK(lib.nearest(GateKind::RX, 1.6).angle == 2.0);
  CHECK(lib.nearest(GateKind::RX, 0.2).angle == 0.0);
  CHECK(lib.nearest(GateKind::RX, 2.0 * M_PI - 0.1).angle == 0.0);
  CHECK(lib.nearest(GateKind::RX, -2.9).angle == 3.0);
  CHECK(lib.count(GateKind::RX) == 4);
  CHECK(lib.count(GateKind::RZ) == 0);
  CHECK(lib.find(GateKind::RZ, 0.5) == nullptr);
  CHECK_THROWS_AS(lib.nearest(GateKind::RZ, 0.5), std::out_of_range);
}

TEST_CASE("cat library entries are trace-decreasing channels") {
  const NoiseLibrary &lib = shared_cat_library();
  CHECK(lib.count(GateKind::RX) == 3);
  CHECK(lib.count(GateKind::RZZ) == 1);
  REQUIRE(lib.entries.size() == 4);
  for (const NoiseLibraryEntry &e : lib.entries) {
    INFO(gate_name(e.kind) << " angle " << e.angle);
    const Eigen::Index d = e.noise.operators.at(0).rows();
    CHECK(d == (e.kind == GateKind::RZZ ? 4 : 2));
    CHECK(completeness_excess(e.noise, d) < 1e-6);
    CHECK(e.leakage > 0.0);
    CHECK(e.leakage < 0.01);
    CHECK(e.source == "cat");
    CHECK(e.meta.alpha == Catch::Approx(2.0));
    CHECK(e.meta.kappa == Catch::Approx(1.0 / 1500.0));
    CHECK(e.meta.dim == 20);
    CHECK(e.meta.gamma1 == 0.0);
  }
  const NoiseLibraryEntry &rzz = lib.nearest(GateKind::RZZ, 1.7);
  CHECK(rzz.angle == 0.0);
  CHECK(rzz.meta.t_gate == Catch::Approx(2.0));
  CHECK(lib.nearest(GateKind::RX, 3.0).meta.t_gate == Catch::Approx(10.0));
}

TEST_CASE("replay reproduces the captured channel at bin centers") {
  const NoiseLibrary &lib = shared_cat_library();
  const double theta = lib.nearest(GateKind::RX, M_PI / 2).angle;
  REQUIRE(theta == Catch::Approx(M_PI / 2));

  KnrParams p;
  const FockSpace one{20, 1};
  PulseSchedule sched =
      rx_schedule(shared_table().delta0_for(theta), p, one);
  add_photon_loss(sched, 1.0 / 1500.0);
  const PauliChannel direct =
      subspace_channel_jump(sched, logical_frame(cat_basis(one, p.alpha())));

  CHECK(ptm_distance(replay_channel(lib, GateKind::RX, theta), direct) < 1e-6);
}

TEST_CASE("standard library matches the requested fidelity to first order") {
  StandardLibraryConfig cfg;
  cfg.fbar_rx = 0.9859;
  cfg.fbar_rzz = 0.9915;
  cfg.n_bins = 5;
  const NoiseLibrary lib = build_standard_library(cfg);
  CHECK(lib.count(GateKind::RX) == 5);
  CHECK(lib.count(GateKind::RZZ) == 5);
  for (const NoiseLibraryEntry &e : lib.entries) {
    INFO(gate_name(e.kind) << " angle " << e.angle);
    const Eigen::Index d = e.noise.operators.at(0).rows();
    CHECK(completeness_excess(e.noise, d) < 1e-6);
    CHECK(e.source == "standard");
    CHECK(e.meta.dim == 2);
    CHECK(std::abs(e.leakage) < 1e-8);
  }
  CHECK(lib.nearest(GateKind::RX, 0.0).meta.gamma1 ==
        Catch::Approx(4.23e-3).epsilon(1e-6));
  CHECK(lib.nearest(GateKind::RZZ, 0.0).meta.gamma1 ==
        Catch::Approx(5.3125e-3).epsilon(1e-6));

  CHECK(std::abs(library_average_fidelity(lib, GateKind::RX) - cfg.fbar_rx) <
        1e-3);
  CHECK(std::abs(library_average_fidelity(lib, GateKind::RZZ) - cfg.fbar_rzz) <
        1e-3);

  const double theta = M_PI / 4.0;
  const PauliChannel direct = standard_qubit_gate_channel(
      GateKind::RX, theta, lib.nearest(GateKind::RX, theta).meta.gamma1, 10.0);
  CHECK(ptm_distance(replay_channel(lib, GateKind::RX, theta), direct) < 1e-6);

  StandardLibraryConfig bad = cfg;
  bad.fbar_rx = 0.0;
  CHECK_THROWS_AS(build_standard_library(bad), std::invalid_argument);
}

TEST_CASE("library serialization round-trips") {
  NoiseLibrary lib = shared_cat_library();
  lib.config_hash = "deadbeef01234567";
  const std::string path = "test_noise_library_roundtrip.json";
  save_noise_library(lib, path);
  const NoiseLibrary back = load_noise_library(path);
  std::remove(path.c_str());

  CHECK(back.config_hash == lib.config_hash);
  REQUIRE(back.entries.size() == lib.entries.size());
  for (size_t i = 0; i < lib.entries.size(); ++i) {
    const NoiseLibraryEntry &a = lib.entries[i];
    const NoiseLibraryEntry &b = back.entries[i];
    INFO(gate_name(a.kind) << " angle " << a.angle);
    CHECK(b.kind == a.kind);
    CHECK(b.angle == a.angle);
    CHECK(b.source == a.source);
    CHECK(b.leakage == a.leakage);
    CHECK(b.meta.alpha == a.meta.alpha);
    CHECK(b.meta.kappa == a.meta.kappa);
    CHECK(b.meta.t_gate == a.meta.t_gate);
    CHECK(b.meta.dim == a.meta.dim);
    CHECK(b.meta.gamma1 == a.meta.gamma1);
    REQUIRE(b.noise.operators.size() == a.noise.operators.size());
    for (size_t k = 0; k < a.noise.operators.size(); ++k)
      CHECK((b.noise.operators[k] - a.noise.operators[k]).cwiseAbs()
                .maxCoeff() == 0.0);
    const Eigen::Index d = b.noise.operators.at(0).rows();
    CHECK(completeness_excess(b.noise, d) < 1e-6);
  }

  std::ofstream bogus(path);
  bogus << "{\"format\": \"something-else\", \"entries\": []}\n";
  bogus.close();
  CHECK_THROWS_AS(load_noise_library(path), std::runtime_error);
  std::remove(path.c_str());
}
