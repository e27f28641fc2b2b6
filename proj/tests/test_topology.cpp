#include <doctest.h>

#include "oracles.hpp"
#include "wframes/reference.hpp"
#include "wframes/topology.hpp"

using namespace wframes;

namespace {

ProjectorField qwz_lower(double u, int n) {
  const BlochModel m = builtin("qwz", {{"u", u}});
  const KGrid g = KGrid::make(m.lattice(), {n, n});
  return projector_field(m, g, SpectralWindow::bands(1, 1));
}

}  // namespace

TEST_CASE("constant projectors have zero Chern number") {
  const BlochModel m = builtin("atomic", {{"d", 2}, {"dim", 2}});
  const KGrid g = KGrid::make(m.lattice(), {8, 8});
  const ProjectorField p = projector_field(m, g, SpectralWindow::bands(1, 1));
  const ChernResult r = chern_number_detailed(p, 0, 1);
  CHECK(r.c == 0);
  CHECK(r.residual < 1e-12);
}

TEST_CASE("qwz Chern numbers match the curvature-degree oracle") {
  // the 256^2 oracle with exact h-field derivatives pins the sign convention
  for (const double u : {-3.0, -1.0, 1.0, 3.0}) {
    const int oracle = static_cast<int>(std::lround(oracles::qwz_degree(u, 256)));
    CHECK(chern_number(qwz_lower(u, 24), 0, 1) == oracle);
  }
  CHECK(chern_number(qwz_lower(1.0, 24), 0, 1) == -1);
  CHECK(chern_number(qwz_lower(3.0, 24), 0, 1) == 0);
}

TEST_CASE("integer quantization holds to 1e-9 on modest grids") {
  for (const double u : {-1.0, 1.0}) {
    const ChernResult r = chern_number_detailed(qwz_lower(u, 16), 0, 1);
    CHECK(r.residual <= 1e-9);
  }
  const BlochModel m = builtin("haldane");
  const KGrid g = KGrid::make(m.lattice(), {16, 16});
  const ProjectorField p = projector_field(m, g, SpectralWindow::bands(1, 1));
  CHECK(chern_number_detailed(p, 0, 1).residual <= 1e-9);
}

TEST_CASE("haldane at the documented point carries |c| = 1") {
  const BlochModel m = builtin("haldane");
  const KGrid g = KGrid::make(m.lattice(), {24, 24});
  const ProjectorField p = projector_field(m, g, SpectralWindow::bands(1, 1));
  CHECK(std::abs(chern_number(p, 0, 1)) == 1);
}

TEST_CASE("parallel plaquette sum matches the serial reference") {
  const ProjectorField p = qwz_lower(1.0, 12);
  const ChernResult r = chern_number_detailed(p, 0, 1);
  const double serial = ref::chern_sum(p, 0, 1);
  CHECK(std::abs(serial - double(r.c)) < 1e-12);
}

TEST_CASE("chern_number is gauge invariant under frame remixing") {
  // the field is assembled from phase-randomized eigenvectors; the rounded
  // integer and the field itself must not notice
  const BlochModel m = builtin("qwz", {{"u", 1.0}});
  const KGrid g = KGrid::make(m.lattice(), {12, 12});
  const BandStructure b = band_structure(m, g, true);
  RandomStream rng(4);
  ProjectorField p;
  p.grid = g;
  p.fiber = 2;
  p.rank = 1;
  p.p.resize(g.size());
  for (long idx = 0; idx < g.size(); ++idx) {
    const Vec v = b.eigenvectors[idx].col(0) * std::polar(1.0, 2 * pi * rng.uniform());
    p.p[idx] = v * v.adjoint();
  }
  CHECK(chern_number(p, 0, 1) == chern_number(qwz_lower(1.0, 12), 0, 1));
}

TEST_CASE("Whitney additivity and conjugation") {
  const ProjectorField p = qwz_lower(1.0, 16);
  const ProjectorField pc = conjugate_field(p);
  CHECK(chern_number(pc, 0, 1) == 1);
  CHECK(chern_number(direct_sum(p, pc), 0, 1) == 0);
  CHECK(chern_number(direct_sum(p, p), 0, 1) == -2);
}

TEST_CASE("Chern number is stable across the gapped phase") {
  for (const double u : {0.5, 1.0, 1.5}) CHECK(chern_number(qwz_lower(u, 20), 0, 1) == -1);
}

TEST_CASE("chern_report covers all planes and sets the trivial flag") {
  SUBCASE("constant 3D field") {
    const BlochModel m = builtin("atomic", {{"d", 2}, {"dim", 3}});
    const KGrid g = KGrid::make(m.lattice(), {8, 8, 8});
    const ChernReport rep = chern_report(projector_field(m, g, SpectralWindow::bands(1, 1)));
    REQUIRE(rep.entries.size() == 3);
    for (const auto& e : rep.entries) CHECK(e.c == 0);
    CHECK(rep.trivial);
  }
  SUBCASE("stacked planar model") {
    const BlochModel m = builtin("qwz_stack_3d", {{"u", 1.0}, {"tz", 0.1}});
    const KGrid g = KGrid::make(m.lattice(), {12, 12, 12});
    const ChernReport rep = chern_report(projector_field(m, g, SpectralWindow::bands(1, 1)));
    CHECK(rep.chern(0, 1) == -1);
    CHECK(rep.chern(0, 2) == 0);
    CHECK(rep.chern(1, 2) == 0);
    CHECK_FALSE(rep.trivial);
  }
  SUBCASE("planar model") {
    const ChernReport rep = chern_report(qwz_lower(1.0, 16));
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.chern(0, 1) == -1);
    CHECK_FALSE(rep.trivial);
    CHECK(rep.negated().at({0, 1}) == 1);
  }
}

TEST_CASE("abrupt fields are reported as degenerate overlaps") {
  const KGrid g = KGrid::make(Lattice::cubic(2), {8, 8});
  const ProjectorField p = projector_from_function(g, 2, [&](const RVec&, long idx) {
    Mat m = Mat::Zero(2, 2);
    m(g.multi(idx)[0] < 4 ? 0 : 1, g.multi(idx)[0] < 4 ? 0 : 1) = 1.0;
    return m;
  });
  CHECK_THROWS_AS(chern_number(p, 0, 1), Error);
}

TEST_CASE("coarse plane grids are rejected") {
  CHECK_THROWS_WITH_AS(chern_number(qwz_lower(1.0, 5), 0, 1), doctest::Contains("at least 6"),
                       Error);
}

TEST_CASE("nonvanishing sections of rank >= 2 bundles") {
  SUBCASE("flat two-band window accepts immediately") {
    const BlochModel m = builtin("atomic", {{"d", 3}, {"dim", 2}});
    const KGrid g = KGrid::make(m.lattice(), {8, 8});
    const ProjectorField p = projector_field(m, g, SpectralWindow::bands(1, 2));
    const NonvanishingSection s = nonvanishing_section(p, 5);
    CHECK(s.retries_used == 1);
    CHECK(s.min_norm == doctest::Approx(s.mean_norm).epsilon(1e-10));
  }
  SUBCASE("total-Chern-zero rank-2 field succeeds within 5 retries") {
    const ProjectorField p = qwz_lower(1.0, 32);
    const NonvanishingSection s = nonvanishing_section(direct_sum(p, conjugate_field(p)), 11, 5);
    CHECK(s.accepted);
    CHECK(s.retries_used <= 5);
  }
  SUBCASE("obstructed rank-1 field: sampled minimum shrinks under refinement") {
    // The continuum section of a Chern -1 line bundle must vanish somewhere;
    // on a finite grid the sampled minimum is positive and only decays like
    // the grid spacing, so the acceptance threshold of 1e-3 * mean is still
    // met at desk scale. The refinement trend is the observable statement.
    const NonvanishingSection s32 = nonvanishing_probe(qwz_lower(1.0, 32), 3, 1);
    const NonvanishingSection s64 = nonvanishing_probe(qwz_lower(1.0, 64), 3, 1);
    const NonvanishingSection s128 = nonvanishing_probe(qwz_lower(1.0, 128), 3, 1);
    CHECK(s64.min_norm <= s32.min_norm);
    CHECK(s128.min_norm <= s64.min_norm);
    CHECK(s128.min_norm < 0.5 * s32.min_norm);
  }
}

TEST_CASE("complementary line bundles realize their Chern targets") {
  const KGrid g = KGrid::make(Lattice::cubic(2), {24, 24});
  SUBCASE("all-zero target is the constant bundle") {
    const LineBundleField lb = complementary_line_bundle(g, {{{0, 1}, 0}});
    CHECK(lb.field.fiber == 1);
    for (long idx = 0; idx < g.size(); ++idx)
      CHECK(std::abs(lb.field.p[idx](0, 0) - 1.0) < 1e-14);
  }
  SUBCASE("target +1 is the conjugated planar bundle") {
    const LineBundleField lb = complementary_line_bundle(g, {{{0, 1}, 1}});
    CHECK(lb.field.fiber == 2);
    CHECK(chern_number(lb.field, 0, 1) == 1);
  }
  SUBCASE("target +2 is a Kronecker square of fiber dimension 4") {
    const LineBundleField lb = complementary_line_bundle(g, {{{0, 1}, 2}});
    CHECK(lb.field.fiber == 4);
    CHECK(lb.field.rank == 1);
    CHECK(chern_number(lb.field, 0, 1) == 2);
  }
  SUBCASE("targets beyond the cap are rejected") {
    CHECK_THROWS_WITH_AS(complementary_line_bundle(g, {{{0, 1}, 5}}), doctest::Contains("cap"),
                         Error);
  }
}

TEST_CASE("3D reports reject fields whose slices disagree") {
  // two planar phases glued along k3: slice 0 carries c = -1, slice N/2
  // carries c = 0, so the bundle is not resolved by any slice convention
  const KGrid g = KGrid::make(Lattice::cubic(3), {8, 8, 8});
  const ProjectorField p = projector_from_function(g, 2, [&](const RVec&, long idx) {
    const auto m = g.multi(idx);
    const double u = m[2] < 4 ? 1.0 : 3.0;
    const double t1 = 2 * pi * m[0] / 8.0, t2 = 2 * pi * m[1] / 8.0;
    const double hx = std::sin(t1), hy = std::sin(t2), hz = u + std::cos(t1) + std::cos(t2);
    const double nrm = std::sqrt(hx * hx + hy * hy + hz * hz);
    Mat proj(2, 2);
    proj(0, 0) = 0.5 * (1.0 - hz / nrm);
    proj(1, 1) = 0.5 * (1.0 + hz / nrm);
    proj(0, 1) = -0.5 * cxd(hx, -hy) / nrm;
    proj(1, 0) = -0.5 * cxd(hx, hy) / nrm;
    return proj;
  });
  CHECK_THROWS_WITH_AS(chern_report(p), doctest::Contains("differs between slices"), Error);
}

TEST_CASE("3D complementary bundle pulls the planar target back") {
  const KGrid g = KGrid::make(Lattice::cubic(3), {10, 10, 10});
  const LineBundleField lb = complementary_line_bundle(g, {{{0, 1}, 1}, {{0, 2}, 0}, {{1, 2}, 0}});
  CHECK(lb.field.fiber == 2);
  const ChernReport rep = chern_report(lb.field);
  CHECK(rep.chern(0, 1) == 1);
  CHECK(rep.chern(0, 2) == 0);
  CHECK(rep.chern(1, 2) == 0);
}
