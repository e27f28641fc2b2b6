#include <doctest.h>

#include <sstream>

#include "wframes/model.hpp"

using namespace wframes;

namespace {

RVec kvec(std::initializer_list<double> v) {
  RVec k(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) k(i++) = x;
  return k;
}

}  // namespace

TEST_CASE("atomic model is a constant diagonal family") {
  const BlochModel m = builtin("atomic", {{"d", 2}, {"dim", 2}});
  RandomStream rng(3);
  for (int t = 0; t < 5; ++t) {
    const Mat h = m.bloch_hamiltonian(kvec({rng.normal(), rng.normal()}));
    CHECK(std::abs(h(0, 0)) < 1e-14);
    CHECK(std::abs(h(1, 1) - 1.0) < 1e-14);
    CHECK(std::abs(h(0, 1)) < 1e-14);
  }
}

TEST_CASE("qwz evaluations at high-symmetry points") {
  const BlochModel m = builtin("qwz", {{"u", 1.0}});
  Mat h = m.bloch_hamiltonian(kvec({0.0, 0.0}));
  CHECK(std::abs(h(0, 0) - 3.0) < 1e-12);  // 3 sigma_3
  CHECK(std::abs(h(1, 1) + 3.0) < 1e-12);
  CHECK(h.cwiseAbs().sum() == doctest::Approx(6.0).epsilon(1e-12));

  h = m.bloch_hamiltonian(kvec({pi, pi}));
  CHECK(std::abs(h(0, 0) + 1.0) < 1e-12);  // -sigma_3
  CHECK(std::abs(h(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(h(0, 1)) < 1e-12);
}

TEST_CASE("qwz gap closes at u = 0") {
  const BlochModel m = builtin("qwz", {{"u", 0.0}});
  CHECK(m.bloch_hamiltonian(kvec({0.0, pi})).norm() < 1e-12);
  CHECK(m.bloch_hamiltonian(kvec({pi, 0.0})).norm() < 1e-12);
}

TEST_CASE("ssh bands against the closed form") {
  SUBCASE("flat at t2 = 0") {
    const BlochModel m = builtin("ssh", {{"t1", 1.0}, {"t2", 0.0}});
    RandomStream rng(5);
    for (int t = 0; t < 10; ++t) {
      Eigen::SelfAdjointEigenSolver<Mat> es(m.bloch_hamiltonian(kvec({rng.normal()})));
      CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(es.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("dispersion |t1 + t2 e^{ik}|") {
    const BlochModel m = builtin("ssh", {{"t1", 1.0}, {"t2", 0.5}});
    RandomStream rng(6);
    for (int t = 0; t < 10; ++t) {
      const double k = rng.normal();
      Eigen::SelfAdjointEigenSolver<Mat> es(m.bloch_hamiltonian(kvec({k})));
      const double expect = std::abs(cxd(1.0, 0.0) + 0.5 * std::polar(1.0, k));
      CHECK(es.eigenvalues()(1) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("every gallery model is Hermitian and reciprocal-periodic at random k") {
  RandomStream rng(7);
  for (const auto& name : builtin_names()) {
    const BlochModel m = builtin(name);
    const RMat recip = m.lattice().reciprocal();
    for (int t = 0; t < 100; ++t) {
      RVec k(m.dim());
      for (int j = 0; j < m.dim(); ++j) k(j) = 4.0 * rng.normal();
      const Mat h = m.bloch_hamiltonian(k);
      CHECK(hermitian_deviation(h) <= 1e-13);
      for (int j = 0; j < m.dim(); ++j) {
        const Mat hp = m.bloch_hamiltonian(k + recip.col(j));
        CHECK((hp - h).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("hermitian closure is completed from a one-sided list") {
  Mat h1(1, 1);
  h1 << cxd(0.25, -0.5);
  const BlochModel m = BlochModel::from_hoppings(Lattice::cubic(1), 1, "toy", {},
                                                 {{{1, 0, 0}, h1}});
  const auto& hops = m.hoppings();
  REQUIRE(hops.count({-1, 0, 0}) == 1);
  CHECK(hops.at({-1, 0, 0})(0, 0) == std::conj(h1(0, 0)));
  REQUIRE(hops.count({0, 0, 0}) == 1);  // zero on-site block inserted
}

TEST_CASE("inconsistent two-sided hoppings are rejected") {
  Mat h1(1, 1), bad(1, 1);
  h1 << cxd(0.25, -0.5);
  bad << cxd(0.25, -0.5);  // should be the adjoint, i.e. conjugate
  CHECK_THROWS_WITH_AS(BlochModel::from_hoppings(Lattice::cubic(1), 1, "toy", {},
                                                 {{{1, 0, 0}, h1}, {{-1, 0, 0}, bad}}),
                       doctest::Contains("dagger"), Error);
}

TEST_CASE("non-Hermitian on-site block is rejected") {
  Mat h0(2, 2);
  h0 << 0, 1, 0, 0;
  CHECK_THROWS_AS(BlochModel::from_hoppings(Lattice::cubic(1), 2, "toy", {}, {{{0, 0, 0}, h0}}),
                  Error);
}

TEST_CASE("finite hopping range: Fourier coefficients vanish beyond the support") {
  // Discrete inverse transform of H(k) on an 8x8 grid; qwz has range 1, so
  // every coefficient at torus distance >= 2 must vanish to roundoff.
  const BlochModel m = builtin("qwz", {{"u", 1.0}});
  const KGrid g = KGrid::make(m.lattice(), {8, 8});
  for (int g1 = 0; g1 < 8; ++g1)
    for (int g2 = 0; g2 < 8; ++g2) {
      Mat coeff = Mat::Zero(2, 2);
      for (long idx = 0; idx < g.size(); ++idx) {
        const auto mk = g.multi(idx);
        const double phase = 2.0 * pi * (double(mk[0]) * g1 / 8.0 + double(mk[1]) * g2 / 8.0);
        coeff += m.bloch_hamiltonian(g.kpoint(idx)) * std::polar(1.0, -phase);
      }
      coeff /= double(g.size());
      const int dist = std::max(std::min(g1, 8 - g1), std::min(g2, 8 - g2));
      if (dist >= 2) CHECK(coeff.norm() <= 1e-13);
    }
}

TEST_CASE("model files round-trip bit-identically") {
  for (const auto& name : builtin_names()) {
    const BlochModel m = builtin(name);
    std::stringstream buf;
    write_model(m, buf);
    const BlochModel back = read_model(buf);

    CHECK(back.name() == m.name());
    CHECK(back.fiber_dim() == m.fiber_dim());
    CHECK(back.dim() == m.dim());
    CHECK((back.lattice().basis.array() == m.lattice().basis.array()).all());
    REQUIRE(back.hoppings().size() == m.hoppings().size());
    for (const auto& [g, h] : m.hoppings()) {
      REQUIRE(back.hoppings().count(g) == 1);
      CHECK((back.hoppings().at(g).array() == h.array()).all());
    }
    REQUIRE(back.params().size() == m.params().size());
    for (const auto& [k, v] : m.params()) {
      REQUIRE(back.params().count(k) == 1);
      CHECK(back.params().at(k) == v);
    }

    // a second write must produce the same bytes
    std::stringstream buf2;
    write_model(back, buf2);
    std::stringstream buf3;
    write_model(m, buf3);
    CHECK(buf2.str() == buf3.str());
  }
}

TEST_CASE("unknown models and parameters are rejected") {
  CHECK_THROWS_WITH_AS(builtin("kagome"), doctest::Contains("no built-in model"), Error);
  CHECK_THROWS_WITH_AS(builtin("qwz", {{"mass", 1.0}}), doctest::Contains("no parameter"), Error);
}
