// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances follow the benchmark targets; reference values come
// from uniform half-width solves computed on the fly.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "wavescat/config.hpp"
#include "wavescat/field_io.hpp"

using namespace wavescat;

namespace {

int failures = 0;

void line(int crit, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", crit,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

bool within(double value, double target, double rel) {
  return value >= target * (1.0 - rel) && value <= target * (1.0 + rel);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

CaseSetup make(const char* name, double omega) {
  RunConfig cfg;
  cfg.case_name = name;
  cfg.omega = omega;
  return build_setup(cfg);
}

AdaptedMesh random_mesh(const NestedHierarchy& hier, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<ElementId> parents, frontier;
  for (int64_t ix = 0; ix < hier.axis_cells(1, 0); ++ix)
    for (int64_t iy = 0; iy < hier.axis_cells(1, 1); ++iy) {
      ElementId e{1, {int32_t(ix), int32_t(iy)}};
      if (hier.levels() > 1 && coin(rng)) {
        parents.push_back(e);
        frontier.push_back(e);
      }
    }
  for (int level = 2; level < hier.levels(); ++level) {
    std::vector<ElementId> next;
    for (const ElementId& e : frontier)
      for (const ElementId& c : hier.subelements(e))
        if (coin(rng)) {
          parents.push_back(c);
          next.push_back(c);
        }
    frontier = std::move(next);
  }
  return get_child_elements(hier, parents);
}

// ---- criteria 1, 2, 5, 6: the 1D campaign -------------------------------

void criteria_1d(uint64_t seed) {
  (void)seed;
  // naive transform recomputed alongside the adaptive run
  struct Naive : StepObserver {
    UniformField sum;
    double omega = 0, dt = 0;
    void on_step(int64_t, const FemSpace& space, const NodalField& u,
                 double t) override {
      auto fine = interpolate_to_fine(space, u);
      Complex ph = dt * std::exp(Complex(0, omega * t));
      for (size_t i = 0; i < fine.size(); ++i) sum.values[i] += ph * fine[i];
    }
  };

  CaseSetup s10 = make("1d_bump", 10 * M_PI);
  NestedHierarchy h10 = s10.make_hierarchy();
  Naive naive;
  naive.sum = make_fine_field(h10, 2);
  naive.omega = s10.spec.omega;
  {
    CflChoice c = cfl_timestep(s10.t_up(), s10.spec, h10, 0.9, 2);
    naive.dt = c.dt;
  }
  SolveResult r10 = solve_helmholtz(s10, &naive);
  SolveResult ref10 =
      solve_uniform_reference(s10, s10.h_list.back() / 2, r10.report.t_stop);
  double err10 = error_l2(r10.U, ref10.U, s10.spec.half_width, 1);

  bool ok1 = r10.report.m == 28 && std::abs(r10.report.j_stop - 20) <= 2 &&
             within(err10, 1.40e-2, 0.5) && within(r10.report.avg_dof, 114, 0.25) &&
             r10.report.wall_seconds < 60.0;
  line(1, ok1,
       fmt("1D plane 10pi: m=%d (28), j_stop=%d (20+-2), err2=%.3e "
           "(1.40e-2 +-50%%), avg_dof=%.1f (114 +-25%%), %.2fs",
           r10.report.m, r10.report.j_stop, err10, r10.report.avg_dof,
           r10.report.wall_seconds));

  SolveResult r20 = solve_helmholtz(make("1d_bump", 20 * M_PI));
  SolveResult r40 = solve_helmholtz(make("1d_bump", 40 * M_PI));
  double ratio1 = r20.report.avg_dof / r10.report.avg_dof;
  double ratio2 = r40.report.avg_dof / r20.report.avg_dof;
  bool ok2 = ratio1 <= 1.35 && ratio2 <= 1.35;
  line(2, ok2,
       fmt("1D dof growth: %.1f -> %.1f -> %.1f, ratios %.3f, %.3f (<= 1.35)",
           r10.report.avg_dof, r20.report.avg_dof, r40.report.avg_dof, ratio1,
           ratio2));

  // error decomposition at 10pi: U1 = layered reference, U2 = transparent
  // boundary, U3 = long horizon
  double h2 = s10.h_list.back() / 2;
  SolveResult u2 =
      solve_1d_abc_reference(s10, h2, r10.report.t_stop, ref10.report.m);
  SolveResult u3 = solve_1d_abc_reference(s10, h2, s10.spec.t0() + 100.0,
                                          ref10.report.m);
  double e12 = error_l2(ref10.U, u2.U, s10.spec.half_width, 1);
  double e23 = error_l2(u2.U, u3.U, s10.spec.half_width, 1);
  bool ok5 = e12 <= 1e-3 && e23 <= 1e-2;
  line(5, ok5,
       fmt("1D decomposition: |U1-U2|=%.3e (<=1e-3, paper 2.42e-4), "
           "|U2-U3|=%.3e (<=1e-2, paper 4.50e-3)",
           e12, e23));

  double scale = 0, diff = 0;
  for (size_t i = 0; i < naive.sum.values.size(); ++i) {
    scale = std::max(scale, std::abs(naive.sum.values[i]));
    diff = std::max(diff, std::abs(naive.sum.values[i] - r10.U.values[i]));
  }
  bool ok6 = diff <= 1e-12 * std::max(1.0, scale);
  line(6, ok6,
       fmt("incremental transform vs naive sum: rel diff %.2e (<= 1e-12)",
           scale > 0 ? diff / scale : diff));
}

// ---- criterion 3: 2D plane wave ------------------------------------------

void criterion_2d_plane() {
  CaseSetup s = make("2d_bump", 10 * M_PI);
  SolveResult r = solve_helmholtz(s);
  SolveResult ref =
      solve_uniform_reference(s, s.h_list.back() / 2, r.report.t_stop);
  double err = error_l2(r.U, ref.U, s.spec.half_width, 2);
  bool ok = r.report.m == 39 && within(err, 7.47e-3, 0.5) &&
            within(r.report.avg_dof, 1.93e4, 0.25) &&
            r.report.wall_seconds + ref.report.wall_seconds < 1800.0;
  line(3, ok,
       fmt("2D plane 10pi: m=%d (39), err2=%.3e (7.47e-3 +-50%%), "
           "avg_dof=%.4g (1.93e4 +-25%%), %.0fs+%.0fs",
           r.report.m, err, r.report.avg_dof, r.report.wall_seconds,
           ref.report.wall_seconds));
}

// ---- criterion 4: 2D point source ----------------------------------------

void criterion_2d_point() {
  CaseSetup s = make("2d_point", 10 * M_PI);
  SolveResult r = solve_helmholtz(s);
  SolveResult ref =
      solve_uniform_reference(s, s.h_list.back() / 2, r.report.t_stop);
  double err = error_l2(r.U, ref.U, s.spec.half_width, 2);
  bool ok = std::abs(r.report.j_stop - 55) <= 5 && within(err, 1.26e-2, 0.5) &&
            within(r.report.avg_dof, 9.79e3, 0.30);
  line(4, ok,
       fmt("2D point 10pi: j_stop=%d (55+-5), err2=%.3e (1.26e-2 +-50%%), "
           "avg_dof=%.4g (9.79e3 +-30%%)",
           r.report.j_stop, err, r.report.avg_dof));
}

// ---- criterion 7: wavelet normalisation -----------------------------------

void criterion_wavelet() {
  double norm_err = std::abs(psi_fourier(1.0) - 1.0);
  ProblemSpec spec = make("1d_bump", 10 * M_PI).spec;
  double tr_err = 0;
  for (double x = -1.05; x <= 1.05; x += 0.15) {
    Complex expect = std::exp(Complex(0, spec.omega * x / spec.c0));
    tr_err = std::max(tr_err,
                      std::abs(wavelet_time_transform({x, 0}, spec) - expect));
  }
  ProblemSpec spec2 = make("2d_bump", 20 * M_PI).spec;
  spec2.direction = {std::sqrt(0.5), std::sqrt(0.5)};
  for (double x = -0.9; x <= 0.9; x += 0.3)
    for (double y = -0.9; y <= 0.9; y += 0.3) {
      double rx = spec2.direction[0] * x + spec2.direction[1] * y;
      Complex expect = std::exp(Complex(0, spec2.omega * rx / spec2.c0));
      tr_err = std::max(
          tr_err, std::abs(wavelet_time_transform({x, y}, spec2) - expect));
    }
  bool ok = norm_err <= 1e-10 && tr_err <= 1e-8;
  line(7, ok,
       fmt("wavelet: |F[psi](-1)-1|=%.2e (<=1e-10), plane transform err=%.2e "
           "(<=1e-8)",
           norm_err, tr_err));
}

// ---- criterion 8: partition of unity, projection identity, lattice ---------

void criterion_partition(uint64_t seed) {
  NestedHierarchy hier(2, {0.4, 0.2, 0.1}, {1, 1}, 0.2);
  std::mt19937_64 rng(seed ? seed : 2026);
  UniformField layout = make_fine_field(hier, 2);
  bool pu_ok = true, proj_ok = true, tile_ok = true;
  const int64_t total = hier.fine_cells()[0] * hier.fine_cells()[1];
  for (int it = 0; it < 100 && pu_ok && tile_ok; ++it) {
    AdaptedMesh mesh = random_mesh(hier, rng);
    std::vector<uint8_t> claims(size_t(layout.num_nodes()), 0);
    int64_t area = 0;
    for (const ElementId& e : mesh.leaves) {
      LatticeBox b = hier.box(e);
      area += b.extent(0) * b.extent(1);
      ElementId a = e;
      while (a.level > 1) {
        a = hier.parent(a);
        if (!hier.box(a).contains(b)) tile_ok = false;
      }
      for (int64_t gx = b.lo[0] * 2; gx <= b.hi[0] * 2; ++gx)
        for (int64_t gy = b.lo[1] * 2; gy <= b.hi[1] * 2; ++gy) {
          std::array<double, 2> x{layout.node_coord(0, gx),
                                  layout.node_coord(1, gy)};
          if (chi_element(hier, e, x)) ++claims[size_t(layout.index(gx, gy))];
        }
    }
    if (area != total) tile_ok = false;
    for (uint8_t c : claims)
      if (c != 1) pu_ok = false;
  }
  double proj_err = 0;
  for (int it = 0; it < 10; ++it) {
    AdaptedMesh mesh = random_mesh(hier, rng);
    FemSpace space(mesh, 2);
    std::uniform_real_distribution<double> d(-1, 1);
    NodalField u(size_t(space.num_nodes()));
    for (double& v : u) v = d(rng);
    NodalField v = project_field(space, u, space);
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      proj_err = std::max(proj_err, std::abs(u[size_t(n)] - v[size_t(n)]));
  }
  proj_ok = proj_err <= 1e-14;
  bool ok = pu_ok && proj_ok && tile_ok;
  line(8, ok,
       fmt("partition of unity over 100 meshes: %s; projection identity "
           "err=%.1e (<=1e-14); exact tiling/nesting: %s",
           pu_ok ? "exact" : "VIOLATED", proj_err, tile_ok ? "ok" : "VIOLATED"));
}

// ---- criterion 9: stepper properties ---------------------------------------

void criterion_stepper() {
  // temporal order by Richardson differences on a fixed mesh
  ProblemSpec hom;
  hom.dim = 1;
  hom.omega = 10 * M_PI;
  hom.materials = MaterialCase::homogeneous;
  hom.direction = {1, 0};
  hom.half_width = {1, 1};
  double order_ratio = 0;
  {
    NestedHierarchy hier(1, {0.05}, {1, 1}, 0.0);
    AdaptedMesh mesh = uniform_mesh(hier, 1);
    FemSpace space(mesh, 2);
    NodalField u0(size_t(space.num_nodes()));
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      u0[size_t(n)] = std::sin(M_PI * space.node_pos(n)[0]);
    ElemField none(size_t(space.num_leaves()));
    auto run = [&](double dt) {
      StepContext ctx(space, hom, dt);
      WaveState st = ctx.make_state();
      st.u = u0;
      NodalField Lu0 = ctx.apply_operator(u0, none);
      for (int64_t n = 0; n < space.num_nodes(); ++n)
        st.u_old[size_t(n)] = u0[size_t(n)] - 0.5 * dt * dt * Lu0[size_t(n)];
      int steps = int(std::round(0.8 / dt));
      for (int k = 0; k < steps; ++k) ctx.do_time_step(st, 20.0 + k * dt);
      return st.u;
    };
    NodalField a = run(2e-3), b = run(1e-3), c = run(5e-4);
    double d1 = 0, d2 = 0;
    for (int64_t n = 0; n < space.num_nodes(); ++n) {
      d1 = std::max(d1, std::abs(a[size_t(n)] - b[size_t(n)]));
      d2 = std::max(d2, std::abs(b[size_t(n)] - c[size_t(n)]));
    }
    order_ratio = d1 / d2;
  }
  bool order_ok = order_ratio >= 3.2 && order_ratio <= 4.8;

  // no growth over 2000 source-free steps at the CFL limit on the largest
  // test mesh (2D 10pi, finest level)
  double growth = 0;
  {
    ProblemSpec s2 = make("2d_bump", 10 * M_PI).spec;
    NestedHierarchy hier(2, {0.02}, {1, 1}, s2.resolved_pml_width());
    AdaptedMesh mesh = uniform_mesh(hier, 1);
    FemSpace space(mesh, 2);
    CflChoice c = cfl_timestep(0.1, s2, hier, 0.9, 2);
    StepContext ctx(space, s2, c.dt);
    WaveState st = ctx.make_state();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      if (!space.on_domain_boundary(n)) {
        st.u[size_t(n)] = d(rng);
        st.u_old[size_t(n)] = st.u[size_t(n)];
      }
    double early = 0, late = 0;
    for (int k = 0; k < 2000; ++k) {
      ctx.do_time_step(st, 50.0 + k * c.dt);
      double m = 0;
      for (double v : st.u) m = std::max(m, std::abs(v));
      if (k >= 200 && k < 300) early = std::max(early, m);
      if (k >= 1900) late = std::max(late, m);
    }
    growth = late / early;
  }
  bool stable_ok = growth <= 1.01;

  // absorbing layer quality at the reference resolution
  double residual = 0;
  {
    NestedHierarchy hier(1, {0.01}, {1, 1}, hom.resolved_pml_width());
    AdaptedMesh mesh = uniform_mesh(hier, 1);
    FemSpace space(mesh, 2);
    CflChoice c = cfl_timestep(0.1, hom, hier, 0.9, 2);
    StepContext ctx(space, hom, c.dt);
    WaveState st = ctx.make_state();
    double peak = 0;
    for (int64_t n = 0; n < space.num_nodes(); ++n) {
      double x = space.node_pos(n)[0];
      st.u[size_t(n)] = hom.omega * psi(hom.omega * x);
      st.u_old[size_t(n)] = hom.omega * psi(hom.omega * (x + c.dt));
      peak = std::max(peak, std::abs(st.u[size_t(n)]));
    }
    int steps = int(std::round(3.0 / c.dt));
    for (int k = 0; k < steps; ++k) ctx.do_time_step(st, 30.0 + k * c.dt);
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      if (std::abs(space.node_pos(n)[0]) < 1.0)
        residual = std::max(residual, std::abs(st.u[size_t(n)]));
    residual /= peak;
  }
  bool pml_ok = residual <= 1e-3;
  bool ok = order_ok && stable_ok && pml_ok;
  line(9, ok,
       fmt("stepper: dt-order ratio %.2f (4 +-20%%); 2000-step growth %.4f "
           "(<=1.01); layer residual %.2e (<=1e-3)",
           order_ratio, growth, residual));
}

// ---- criterion 10: trapping cavity -----------------------------------------

void criterion_trap() {
  RunConfig cfg;
  cfg.case_name = "2d_trap";
  cfg.omega = 10 * M_PI;  // scaled down from the 30pi table for desk runtimes
  cfg.params.eta0 = cfg.omega / 400.0;  // resolve the weak leaked radiation
  CaseSetup s = build_setup(cfg);
  SolveResult r = solve_helmholtz(s);
  SolveResult ref =
      solve_uniform_reference(s, s.h_list.back() / 2, r.report.t_stop);
  SolveResult fem = solve_uniform_reference(s, s.h_list.back(),
                                            r.report.t_stop, r.report.m);
  double err = error_l2(r.U, ref.U, s.spec.half_width, 2, &s.spec.scatterer);
  double errf = error_l2(fem.U, ref.U, s.spec.half_width, 2, &s.spec.scatterer);
  double ratio = err / errf;
  bool ok = r.report.avg_dof < fem.report.avg_dof && ratio <= 2.0 &&
            ratio >= 0.5;
  line(10, ok,
       fmt("open cavity 10pi: avg_dof %.4g < fem %.4g; err %.3e vs fem %.3e "
           "(ratio %.2f within 2x)",
           r.report.avg_dof, fem.report.avg_dof, err, errf, ratio));
}

}  // namespace

int main(int argc, char** argv) {
  uint64_t seed = 0;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--seed") && i + 1 < argc)
      seed = std::strtoull(argv[++i], nullptr, 10);
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
      only = std::atoi(argv[++i]);
  }
  auto want = [&](int c) {
    if (only == 0) return true;
    if (only <= 2 || only == 5 || only == 6) return c <= 2 || c == 5 || c == 6;
    return c == only;
  };
  if (want(1)) criteria_1d(seed);
  if (want(3)) criterion_2d_plane();
  if (want(4)) criterion_2d_point();
  if (want(7)) criterion_wavelet();
  if (want(8)) criterion_partition(seed);
  if (want(9)) criterion_stepper();
  if (want(10)) criterion_trap();
  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
