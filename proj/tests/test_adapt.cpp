#include <doctest.h>

#include <cmath>
#include <map>

#include "test_support.hpp"
#include "wavescat/adapt.hpp"

using namespace wavescat;

namespace {
ProblemSpec bump_1d(double omega) {
  ProblemSpec s;
  s.dim = 1;
  s.omega = omega;
  s.materials = MaterialCase::bump_1d;
  s.direction = {1, 0};
  s.half_width = {1, 1};
  return s;
}
}  // namespace

TEST_CASE("maximum wave speed is sampled from the material") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
  CHECK(max_wave_speed(s, hier) == doctest::Approx(2.0).epsilon(1e-12));
  ProblemSpec hom = s;
  hom.materials = MaterialCase::homogeneous;
  CHECK(max_wave_speed(hom, hier) == doctest::Approx(1.0));
}

TEST_CASE("refinement criteria") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptedMesh fine = uniform_mesh(hier, 2);
  FemSpace space(fine, 2);
  NodalField zero(size_t(space.num_nodes()), 0.0);
  // element around x = 0.5: interior cell index: pml=5, interior cells start
  // at 5; x in (0.4,0.6) -> cell 5 + 7 = 12
  ElementId near_half{1, {12, 0}};
  SUBCASE("zero field before the wavelet arrives") {
    CHECK_FALSE(needs_refinement(space, zero, near_half, s.t0(), s, s.omega / 100));
  }
  SUBCASE("the wavelet slab forces refinement regardless of the field") {
    // slab centre r.x = c0 t: put it over the element
    CHECK(needs_refinement(space, zero, near_half, 0.5, s, s.omega / 100));
  }
  SUBCASE("smooth fields do not trigger refinement away from the slab") {
    NodalField quad(size_t(space.num_nodes()));
    for (int64_t n = 0; n < space.num_nodes(); ++n) {
      double x = space.node_pos(n)[0];
      quad[size_t(n)] = 1.0 + x - 0.3 * x * x;
    }
    CHECK_FALSE(needs_refinement(space, quad, near_half, s.t0(), s, s.omega / 100));
    NodalField kink(size_t(space.num_nodes()));
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      kink[size_t(n)] = std::abs(space.node_pos(n)[0] - 0.51);
    CHECK(needs_refinement(space, kink, near_half, s.t0(), s, 1e-4));
  }
}

TEST_CASE("marking keeps ancestor chains") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.1, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptedMesh fine = uniform_mesh(hier, 3);
  FemSpace space(fine, 2);
  NodalField zero(size_t(space.num_nodes()), 0.0);
  auto parents = get_parent_elements(fine);
  SUBCASE("empty parents stay empty") {
    auto marked = mark_elements(space, zero, {}, s.t0(), s, s.omega / 100);
    CHECK(marked.empty());
  }
  SUBCASE("slab at t0 marks its column in all parent levels") {
    auto marked = mark_elements(space, zero, parents, s.t0(), s, s.omega / 100);
    CHECK(!marked.empty());
    // every level-2 marked element lies on the slab; every level-1 parent of
    // a marked level-2 element is marked too
    std::map<int, int> per_level;
    for (const ElementId& e : marked) ++per_level[e.level];
    CHECK(per_level[1] > 0);
    CHECK(per_level[2] > 0);
  }
  SUBCASE("zero field after the forcing window unmarks leaf-parents") {
    // chain rule still keeps level-1 elements that have sub-parents; with a
    // two-level hierarchy nothing survives
    NestedHierarchy two(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
    AdaptedMesh fine2 = uniform_mesh(two, 2);
    FemSpace space2(fine2, 2);
    NodalField zero2(size_t(space2.num_nodes()), 0.0);
    auto marked = mark_elements(space2, zero2, get_parent_elements(fine2),
                                s.tf() + 10.0, s, s.omega / 100);
    CHECK(marked.empty());
  }
}

TEST_CASE("mesh update reaches a fixed point and coarsens fully") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.1, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptParams ap;
  ap.eta0 = s.omega / 100;
  ap.eps0 = s.omega / 100;
  ap.t_up = M_PI / s.omega;
  ap.c_max = max_wave_speed(s, hier);
  SUBCASE("with the slab inside the domain") {
    AdaptedMesh mesh = uniform_mesh(hier, 3);
    const double t = 0.2;  // slab around x = 0.2
    for (int it = 0; it < 4; ++it) {
      FemSpace space(mesh, 2);
      NodalField zero(size_t(space.num_nodes()), 0.0);
      AdaptedMesh next = update_mesh(space, zero, t, s, ap);
      if (it >= 2) CHECK(next.leaves == mesh.leaves);
      mesh = std::move(next);
    }
    // the slab column is at the finest level
    FemSpace space(mesh, 2);
    int64_t cellx = hier.axis_cell_at(hier.levels(), 0,
                                      int64_t((0.2 + 1.0 + hier.pml_width()) /
                                              hier.h_fine()));
    int32_t li = mesh.leaf_at(cellx, 0);
    CHECK(mesh.leaves[size_t(li)].level == hier.levels());
  }
  SUBCASE("zero field and no forcing coarsen to the first level in K-1 updates") {
    AdaptedMesh mesh = uniform_mesh(hier, 3);
    const double t = s.tf() + 5.0;
    for (int it = 0; it < 2; ++it) {
      FemSpace space(mesh, 2);
      NodalField zero(size_t(space.num_nodes()), 0.0);
      mesh = update_mesh(space, zero, t, s, ap);
    }
    for (const ElementId& e : mesh.leaves) CHECK(e.level == 1);
  }
}

TEST_CASE("stop rule") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptedMesh mesh = uniform_mesh(hier, 1);
  FemSpace space(mesh, 2);
  NodalField zero(size_t(space.num_nodes()), 0.0);
  const double eps0 = s.omega / 100;
  CHECK(should_stop(space, zero, s.tf() + 0.1, s, eps0));
  CHECK_FALSE(should_stop(space, zero, s.tf() - 0.1, s, eps0));
  NodalField loud = zero;
  loud[size_t(space.num_nodes() / 2)] = 2.0 * eps0;
  CHECK_FALSE(should_stop(space, loud, s.tf() + 0.1, s, eps0));
  loud[size_t(space.num_nodes() / 2)] = 0.5 * eps0;
  CHECK(should_stop(space, loud, s.tf() + 0.1, s, eps0));
}
