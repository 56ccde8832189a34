#include "wavescat/driver.hpp"

#include <chrono>
#include <cmath>

namespace wavescat {

double CaseSetup::t_up() const {
  return params.t_up > 0 ? params.t_up : M_PI / spec.omega;
}
double CaseSetup::eta0() const {
  return params.eta0 > 0 ? params.eta0 : spec.omega / 100.0;
}
double CaseSetup::eps0() const {
  return params.eps0 > 0 ? params.eps0 : spec.omega / 100.0;
}

namespace {

void apply_scatterer(const ProblemSpec& spec, NestedHierarchy& hier) {
  if (spec.scatterer.empty()) return;
  std::vector<LatticeBox> boxes;
  for (const Box& b : spec.scatterer) {
    LatticeBox lb;
    for (int a = 0; a < spec.dim; ++a) {
      double lo = hier.to_lattice(a, b.lo[size_t(a)]);
      double hi = hier.to_lattice(a, b.hi[size_t(a)]);
      lb.lo[size_t(a)] = int64_t(std::llround(lo));
      lb.hi[size_t(a)] = int64_t(std::llround(hi));
      if (std::abs(lo - double(lb.lo[size_t(a)])) > 1e-9 ||
          std::abs(hi - double(lb.hi[size_t(a)])) > 1e-9)
        throw std::invalid_argument("scatterer box not lattice aligned");
    }
    boxes.push_back(lb);
  }
  hier.set_scatterer(boxes);
}

}  // namespace

NestedHierarchy CaseSetup::make_hierarchy() const {
  NestedHierarchy hier(spec.dim, h_list,
                       {spec.half_width[0], spec.half_width[1]},
                       spec.resolved_pml_width());
  apply_scatterer(spec, hier);
  return hier;
}

NestedHierarchy CaseSetup::make_uniform_hierarchy(double h) const {
  NestedHierarchy hier(spec.dim, {h}, {spec.half_width[0], spec.half_width[1]},
                       spec.resolved_pml_width());
  apply_scatterer(spec, hier);
  return hier;
}

SolveResult solve_helmholtz(const CaseSetup& setup, StepObserver* obs) {
  const auto wall_start = std::chrono::steady_clock::now();
  const ProblemSpec& spec = setup.spec;
  spec.validate();
  NestedHierarchy hier = setup.make_hierarchy();
  const int p = setup.params.degree;
  const double T_up = setup.t_up();
  const CflChoice cfl =
      cfl_timestep(T_up, spec, hier, setup.params.c_cfl, p);
  const double dt = cfl.dt;
  const int m = cfl.m;
  const double t0 = spec.t0();

  AdaptParams ap;
  ap.eta0 = setup.eta0();
  ap.eps0 = setup.eps0();
  ap.t_up = T_up;
  ap.c_max = max_wave_speed(spec, hier);

  StepOptions sopts;
  sopts.reflection = setup.params.reflection;

  auto mesh = std::make_unique<AdaptedMesh>(uniform_mesh(hier, hier.levels()));
  auto space = std::make_unique<FemSpace>(*mesh, p);
  FourierAccumulator acc(hier, p, *mesh);
  auto ctx = std::make_unique<StepContext>(*space, spec, dt, sopts);
  WaveState state = ctx->make_state();
  ctx->apply_scatterer_values(state.u, t0);
  ctx->apply_scatterer_values(state.u_old, t0 - dt);

  RunReport rep;
  rep.case_name = setup.name;
  rep.dim = spec.dim;
  rep.omega = spec.omega;
  rep.degree = p;
  rep.m = m;
  rep.dt = dt;
  rep.t_up = T_up;
  rep.t0 = t0;
  rep.t_f = spec.tf();

  for (int j = 1;; ++j) {
    const int64_t n = int64_t(j - 1) * m;
    const double t_n = t0 + double(n) * dt;
    if (t_n - t0 > setup.params.t_max)
      throw SolveAbort("solve_helmholtz: t_max exceeded without stopping");
    if (should_stop(*space, state.u, t_n, spec, ap.eps0)) {
      acc.update_ft(*space, nullptr);
      rep.j_stop = j - 1;
      rep.t_stop = t_n;
      break;
    }
    auto mesh_new =
        std::make_unique<AdaptedMesh>(update_mesh(*space, state.u, t_n, spec, ap));
    auto space_new = std::make_unique<FemSpace>(*mesh_new, p);
    acc.update_ft(*space, mesh_new.get());
    acc.initialise_new_increments(*mesh, *mesh_new);
    state.u = project_field(*space, state.u, *space_new);
    state.u_old = project_field(*space, state.u_old, *space_new);
    state.s = project_element_field(*space, state.s, *space_new);
    mesh = std::move(mesh_new);
    space = std::move(space_new);
    ctx = std::make_unique<StepContext>(*space, spec, dt, sopts);
    for (int64_t nd = 0; nd < space->num_nodes(); ++nd)
      if (space->on_domain_boundary(nd))
        state.u[size_t(nd)] = state.u_old[size_t(nd)] = 0.0;
    ctx->apply_scatterer_values(state.u, t_n);
    ctx->apply_scatterer_values(state.u_old, t_n - dt);
    rep.node_counts.push_back(space->num_nodes());
    if (obs) obs->on_mesh_update(j, *space, t_n);
    for (int l = 0; l < m; ++l) {
      const double t = t0 + double(n + l) * dt;
      ctx->do_time_step(state, t);
      ++rep.steps;
      acc.update_increments(*space, state.u, t0 + double(n + l + 1) * dt,
                            spec.omega, dt);
      if (obs) obs->on_step(n + l + 1, *space, state.u, t + dt);
    }
  }
  rep.avg_dof = 0;
  for (int64_t c : rep.node_counts) rep.avg_dof += double(c);
  if (!rep.node_counts.empty()) rep.avg_dof /= double(rep.node_counts.size());
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - wall_start)
                         .count();
  return SolveResult{acc.take_field(), std::move(rep)};
}

namespace {

SolveResult solve_fixed_mesh(const CaseSetup& setup, double h, double t_stop,
                             int m_override, BoundaryMode bmode,
                             bool enable_pml, bool omega0_only) {
  const auto wall_start = std::chrono::steady_clock::now();
  const ProblemSpec& spec = setup.spec;
  spec.validate();
  // omega0_only drops the absorbing layer so the domain is the region of
  // interest itself (the 1D transparent-boundary references)
  NestedHierarchy hier =
      omega0_only ? NestedHierarchy(spec.dim, {h},
                                    {spec.half_width[0], spec.half_width[1]}, 0.0)
                  : setup.make_uniform_hierarchy(h);
  const int p = setup.params.degree;
  const double T_up = setup.t_up();
  CflChoice cfl = cfl_timestep(T_up, spec, hier, setup.params.c_cfl, p);
  if (m_override > 0) {
    cfl.m = m_override;
    cfl.dt = T_up / m_override;
  }
  const double dt = cfl.dt;
  const double t0 = spec.t0();

  AdaptedMesh mesh = uniform_mesh(hier, 1);
  FemSpace space(mesh, p);
  StepOptions sopts;
  sopts.boundary = bmode;
  sopts.enable_pml = enable_pml;
  sopts.reflection = setup.params.reflection;
  StepContext ctx(space, spec, dt, sopts);
  WaveState state = ctx.make_state();
  ctx.apply_scatterer_values(state.u, t0);
  ctx.apply_scatterer_values(state.u_old, t0 - dt);

  UniformField U = make_fine_field(hier, p);
  std::vector<int32_t> map = grid_node_map(space);

  const int64_t n_total = std::llround((t_stop - t0) / dt);
  for (int64_t n = 0; n < n_total; ++n) {
    const double t = t0 + double(n) * dt;
    ctx.do_time_step(state, t);
    const Complex phase =
        dt * std::exp(Complex(0.0, spec.omega * (t + dt)));
    for (int64_t g = 0; g < U.num_nodes(); ++g) {
      int32_t nd = map[size_t(g)];
      if (nd >= 0) U.values[size_t(g)] += phase * state.u[size_t(nd)];
    }
  }

  RunReport rep;
  rep.case_name = setup.name;
  rep.dim = spec.dim;
  rep.omega = spec.omega;
  rep.degree = p;
  rep.m = cfl.m;
  rep.dt = dt;
  rep.t_up = T_up;
  rep.t0 = t0;
  rep.t_f = spec.tf();
  rep.t_stop = t_stop;
  rep.j_stop = int(std::llround((t_stop - t0) / T_up));
  rep.steps = n_total;
  rep.node_counts.assign(1, space.num_nodes());
  rep.avg_dof = double(space.num_nodes());
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - wall_start)
                         .count();
  return SolveResult{std::move(U), std::move(rep)};
}

}  // namespace

SolveResult solve_uniform_reference(const CaseSetup& setup, double h,
                                    double t_stop, int m_override) {
  return solve_fixed_mesh(setup, h, t_stop, m_override,
                          BoundaryMode::dirichlet, true, false);
}

SolveResult solve_1d_abc_reference(const CaseSetup& setup, double h,
                                   double t_stop, int m_override) {
  if (setup.spec.dim != 1)
    throw std::invalid_argument("abc reference requested in 2D");
  return solve_fixed_mesh(setup, h, t_stop, m_override,
                          BoundaryMode::characteristic, false, true);
}

double error_l2(const UniformField& a, const UniformField& b,
                std::array<double, 2> half_width, int dim,
                const std::vector<Box>* exclude) {
  const double h = std::min(a.h, b.h);
  LegendreRule rule = legendre_rule(std::max(a.degree, b.degree) + 2);
  const int nq = int(rule.node.size());
  std::array<int64_t, 2> n{1, 1};
  for (int ax = 0; ax < dim; ++ax)
    n[size_t(ax)] = std::llround(2.0 * half_width[size_t(ax)] / h);
  double acc = 0;
  for (int64_t ix = 0; ix < n[0]; ++ix) {
    for (int64_t iy = 0; iy < n[1]; ++iy) {
      std::array<double, 2> lo{-half_width[0] + double(ix) * h,
                               dim == 2 ? -half_width[1] + double(iy) * h : 0.0};
      if (exclude) {
        std::array<double, 2> c{lo[0] + 0.5 * h, dim == 2 ? lo[1] + 0.5 * h : 0.0};
        bool inside = false;
        for (const Box& e : *exclude) {
          bool in = c[0] > e.lo[0] && c[0] < e.hi[0];
          if (dim == 2) in = in && c[1] > e.lo[1] && c[1] < e.hi[1];
          if (in) {
            inside = true;
            break;
          }
        }
        if (inside) continue;
      }
      double cellw = dim == 2 ? h * h : h;
      for (int qx = 0; qx < nq; ++qx) {
        for (int qy = 0; qy < (dim == 2 ? nq : 1); ++qy) {
          std::array<double, 2> x{lo[0] + h * rule.node[size_t(qx)],
                                  dim == 2 ? lo[1] + h * rule.node[size_t(qy)]
                                           : 0.0};
          double w = rule.weight[size_t(qx)] * cellw;
          if (dim == 2) w *= rule.weight[size_t(qy)];
          acc += w * std::norm(a.eval(x) - b.eval(x));
        }
      }
    }
  }
  return std::sqrt(acc);
}

std::vector<GrowthRow> dof_growth_rates(const std::vector<RunReport>& reports) {
  std::vector<GrowthRow> rows;
  for (size_t i = 0; i < reports.size(); ++i) {
    GrowthRow r;
    r.omega = reports[i].omega;
    r.avg_dof = reports[i].avg_dof;
    if (i > 0) {
      r.ratio = r.avg_dof / rows[i - 1].avg_dof;
      r.rate = std::log2(r.ratio);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace wavescat
