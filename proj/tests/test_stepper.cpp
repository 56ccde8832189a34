#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "wavescat/stepper.hpp"

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

TEST_CASE("damping profile") {
  const double L = 1.0, W = 0.1, R = 1e-10;
  CHECK(zeta(0.3, L, W, R) == 0.0);
  CHECK(zeta(-1.0, L, W, R) == 0.0);
  const double top = std::abs(std::log(R)) * 1.5 / W;
  CHECK(zeta(1.0 + W, L, W, R) == doctest::Approx(top).epsilon(1e-13));
  CHECK(zeta(-(1.0 + W), L, W, R) == doctest::Approx(top).epsilon(1e-13));
  CHECK(zeta(1.0 + 0.5 * W, L, W, R) == doctest::Approx(0.25 * top).epsilon(1e-13));
}

TEST_CASE("reference element eigenvalue bound") {
  CHECK(reference_operator_eigenvalue(2, 1) == doctest::Approx(24.0).epsilon(1e-11));
  CHECK(reference_operator_eigenvalue(2, 2) == doctest::Approx(48.0).epsilon(1e-11));
}

TEST_CASE("cfl step counts match the reference configurations") {
  SUBCASE("1d bump at omega = 10pi") {
    ProblemSpec s = bump_1d(10 * M_PI);
    NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
    CflChoice c = cfl_timestep(0.1, s, hier, 0.9, 2);
    CHECK(c.m == 28);
    CHECK(c.lambda == doctest::Approx(240000.0).epsilon(1e-10));
  }
  SUBCASE("2d bump at omega = 10pi") {
    ProblemSpec s = bump_1d(10 * M_PI);
    s.dim = 2;
    s.materials = MaterialCase::bump_2d;
    NestedHierarchy hier(2, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
    CflChoice c = cfl_timestep(0.1, s, hier, 0.9, 2);
    CHECK(c.m == 39);
  }
  SUBCASE("homogeneous trap grid") {
    ProblemSpec s = bump_1d(10 * M_PI);
    s.dim = 2;
    s.materials = MaterialCase::homogeneous;
    NestedHierarchy hier(2, {0.1, 0.02}, {1, 1}, s.resolved_pml_width());
    CflChoice c = cfl_timestep(0.1, s, hier, 0.9, 2);
    CHECK(c.m == 20);
  }
  SUBCASE("quadrupling alpha doubles the step count") {
    ProblemSpec hom = bump_1d(10 * M_PI);
    hom.materials = MaterialCase::homogeneous;  // alpha_max 1 instead of 4
    NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, hom.resolved_pml_width());
    CflChoice c = cfl_timestep(0.1, hom, hier, 0.9, 2);
    CHECK(c.m == 14);  // bump case gives 28
  }
}

TEST_CASE("zero state stays zero") {
  ProblemSpec s = bump_1d(10 * M_PI);
  s.materials = MaterialCase::homogeneous;
  NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptedMesh mesh = uniform_mesh(hier, 2);
  FemSpace space(mesh, 2);
  StepContext ctx(space, s, 1e-3);
  WaveState st = ctx.make_state();
  ctx.do_time_step(st, 5.0);  // outside the forcing window
  for (double v : st.u) CHECK(v == 0.0);
  for (const auto& sv : st.s)
    for (double v : sv) CHECK(v == 0.0);
}

TEST_CASE("without damping the update reduces to plain leapfrog") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptedMesh mesh = uniform_mesh(hier, 2);
  FemSpace space(mesh, 2);
  const double dt = 1.2e-3;
  StepOptions plain;
  plain.enable_pml = false;
  StepContext ctx(space, s, dt, plain);
  std::mt19937_64 rng(3);
  WaveState st = ctx.make_state();
  st.u = testing::random_field(space, rng);
  st.u_old = testing::random_field(space, rng);
  for (int64_t n = 0; n < space.num_nodes(); ++n)
    if (space.on_domain_boundary(n)) st.u[size_t(n)] = st.u_old[size_t(n)] = 0;
  const double t = 0.0;
  NodalField Lu = ctx.apply_operator(st.u, st.s);
  NodalField f = discrete_source(space, t, dt, s);
  NodalField expect(size_t(space.num_nodes()));
  for (int64_t n = 0; n < space.num_nodes(); ++n)
    expect[size_t(n)] = space.on_domain_boundary(n)
                            ? 0.0
                            : -st.u_old[size_t(n)] + 2.0 * st.u[size_t(n)] +
                                  dt * dt * (-Lu[size_t(n)] + f[size_t(n)]);
  ctx.do_time_step(st, t);
  for (int64_t n = 0; n < space.num_nodes(); ++n)
    CHECK(st.u[size_t(n)] == doctest::Approx(expect[size_t(n)]).epsilon(1e-12));
}

TEST_CASE("operator is exact on quadratics away from the boundary") {
  ProblemSpec s = bump_1d(10 * M_PI);
  s.materials = MaterialCase::homogeneous;
  NestedHierarchy hier(1, {0.1}, {1, 1}, 0.0);
  AdaptedMesh mesh = uniform_mesh(hier, 1);
  FemSpace space(mesh, 2);
  StepContext ctx(space, s, 1e-3);
  NodalField u(size_t(space.num_nodes()));
  for (int64_t n = 0; n < space.num_nodes(); ++n) {
    double x = space.node_pos(n)[0];
    u[size_t(n)] = x * x;
  }
  ElemField none(size_t(space.num_leaves()));
  NodalField Lu = ctx.apply_operator(u, none);
  for (int64_t n = 0; n < space.num_nodes(); ++n) {
    if (space.on_domain_boundary(n)) {
      CHECK(Lu[size_t(n)] == 0.0);
    } else {
      CHECK(Lu[size_t(n)] == doctest::Approx(-2.0).epsilon(1e-10));
    }
  }
  // constants map to zero
  NodalField ones(size_t(space.num_nodes()), 1.0);
  NodalField Lc = ctx.apply_operator(ones, none);
  for (double v : Lc) CHECK(std::abs(v) < 1e-11);
}

TEST_CASE("discrete causality: support spreads by one element per step") {
  ProblemSpec s = bump_1d(10 * M_PI);
  s.materials = MaterialCase::homogeneous;
  NestedHierarchy hier(1, {0.02}, {1, 1}, 0.0);
  AdaptedMesh mesh = uniform_mesh(hier, 1);
  FemSpace space(mesh, 2);
  StepContext ctx(space, s, 1e-3);
  WaveState st = ctx.make_state();
  // one nodal impulse at the centre element
  int64_t centre = -1;
  for (int64_t n = 0; n < space.num_nodes(); ++n)
    if (std::abs(space.node_pos(n)[0]) < 1e-12) centre = n;
  REQUIRE(centre >= 0);
  st.u[size_t(centre)] = st.u_old[size_t(centre)] = 1.0;
  const double h = 0.02;
  for (int step = 1; step <= 20; ++step) {
    ctx.do_time_step(st, 10.0 + step * 1e-3);  // forcing long gone
    for (int64_t n = 0; n < space.num_nodes(); ++n) {
      double x = space.node_pos(n)[0];
      if (std::abs(x) > (step + 1) * h + 1e-12) CHECK(st.u[size_t(n)] == 0.0);
    }
  }
}

TEST_CASE("second order in time by Richardson differences") {
  ProblemSpec s = bump_1d(10 * M_PI);
  s.materials = MaterialCase::homogeneous;
  NestedHierarchy hier(1, {0.05}, {1, 1}, 0.0);
  AdaptedMesh mesh = uniform_mesh(hier, 1);
  FemSpace space(mesh, 2);
  // smooth zero-trace initial state, zero initial velocity
  NodalField u0(size_t(space.num_nodes()));
  for (int64_t n = 0; n < space.num_nodes(); ++n)
    u0[size_t(n)] = std::sin(M_PI * space.node_pos(n)[0]);
  ElemField none(size_t(space.num_leaves()));
  auto run = [&](double dt, double T) {
    StepContext ctx(space, s, dt);
    WaveState st = ctx.make_state();
    st.u = u0;
    NodalField Lu0 = ctx.apply_operator(u0, none);
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      st.u_old[size_t(n)] = u0[size_t(n)] - 0.5 * dt * dt * Lu0[size_t(n)];
    int steps = int(std::round(T / dt));
    for (int k = 0; k < steps; ++k) ctx.do_time_step(st, 20.0 + k * dt);
    return st.u;
  };
  const double dt0 = 2e-3, T = 0.8;
  NodalField ua = run(dt0, T), ub = run(dt0 / 2, T), uc = run(dt0 / 4, T);
  double d1 = 0, d2 = 0;
  for (int64_t n = 0; n < space.num_nodes(); ++n) {
    d1 = std::max(d1, std::abs(ua[size_t(n)] - ub[size_t(n)]));
    d2 = std::max(d2, std::abs(ub[size_t(n)] - uc[size_t(n)]));
  }
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("sound-soft mask is empty without a scatterer") {
  ProblemSpec s = bump_1d(10 * M_PI);
  NestedHierarchy hier(1, {0.2, 0.02}, {1, 1}, s.resolved_pml_width());
  AdaptedMesh mesh = uniform_mesh(hier, 2);
  FemSpace space(mesh, 2);
  CHECK(sound_soft_mask(space).empty());
}

TEST_CASE("scatterer boundary carries the incident trace") {
  ProblemSpec s;
  s.dim = 2;
  s.omega = 10 * M_PI;
  s.materials = MaterialCase::homogeneous;
  s.direction = {1, 0};
  s.scatterer = {Box{{0.4, -0.2}, {0.8, 0.2}}};
  NestedHierarchy hier(2, {0.2, 0.1}, {1, 1}, s.resolved_pml_width());
  // lattice-aligned block: 0.4 -> (0.4+1.1)/0.1 = 15 ... checked below
  hier.set_scatterer({LatticeBox{{15, 9}, {19, 13}}});
  AdaptedMesh mesh = uniform_mesh(hier, 2);
  FemSpace space(mesh, 2);
  auto masked = sound_soft_mask(space);
  CHECK(!masked.empty());
  StepContext ctx(space, s, 1e-3);
  WaveState st = ctx.make_state();
  const double t = 0.55;  // wavelet slab over the leading face
  ctx.do_time_step(st, t - 1e-3);
  for (int64_t n : masked) {
    auto x = space.node_pos(n);
    CHECK(st.u[size_t(n)] ==
          doctest::Approx(-incoming_wavelet(x, t, s)).epsilon(1e-12));
  }
}
