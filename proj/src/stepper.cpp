#include "wavescat/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavescat {

double zeta(double x, double L, double W, double R) {
  double a = std::abs(x);
  if (a <= L) return 0.0;
  double ramp = (a - L) / W;
  return std::abs(std::log(R)) * 1.5 / W * ramp * ramp;
}

namespace {

// cyclic Jacobi on a small symmetric matrix; returns the largest eigenvalue
double jacobi_max_eigenvalue(double a[5][5], int n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-28) break;
    for (int pq = 0; pq < n; ++pq)
      for (int q = pq + 1; q < n; ++q) {
        int p = pq;
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  double lmax = a[0][0];
  for (int i = 1; i < n; ++i) lmax = std::max(lmax, a[i][i]);
  return lmax;
}

}  // namespace

double reference_operator_eigenvalue(int degree, int dim) {
  const LobattoRule& rule = lobatto_rule(degree);
  const int n = degree + 1;
  double K[5][5] = {};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (int q = 0; q < n; ++q)
        acc += rule.weight[size_t(q)] * rule.diff[q][i] * rule.diff[q][j];
      K[i][j] = acc;
    }
  double B[5][5] = {};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      B[i][j] = K[i][j] / std::sqrt(rule.weight[size_t(i)] *
                                    rule.weight[size_t(j)]);
  double lmax = jacobi_max_eigenvalue(B, n);
  // the tensor-product operator with lumped mass has eigenvalues
  // lambda_i + lambda_j
  return dim == 2 ? 2.0 * lmax : lmax;
}

CflChoice cfl_timestep(double T_up, const ProblemSpec& spec,
                       const NestedHierarchy& hier, double c_cfl, int degree) {
  if (!(T_up > 0)) throw std::invalid_argument("cfl: T_up must be positive");
  double alpha_max = 0, beta_min = 1e300;
  const auto cells = hier.fine_cells();
  const int64_t ny = spec.dim == 2 ? cells[1] : 0;
  for (int64_t ix = 0; ix <= cells[0]; ++ix)
    for (int64_t iy = 0; iy <= ny; ++iy) {
      std::array<double, 2> x{hier.to_physical(0, double(ix)),
                              spec.dim == 2 ? hier.to_physical(1, double(iy))
                                            : 0.0};
      alpha_max = std::max(alpha_max, spec.alpha(x));
      beta_min = std::min(beta_min, spec.beta(x));
    }
  CflChoice c;
  double lhat = reference_operator_eigenvalue(degree, spec.dim);
  c.lambda = lhat * alpha_max / beta_min / (hier.h_fine() * hier.h_fine());
  double bound = c_cfl * 2.0 / std::sqrt(c.lambda);
  c.m = std::max(1, int(std::ceil(T_up / bound - 1e-12)));
  c.dt = T_up / c.m;
  return c;
}

StepContext::StepContext(const FemSpace& space, const ProblemSpec& spec,
                         double dt, StepOptions opts)
    : space_(&space), spec_(&spec), dt_(dt), opts_(opts) {
  const int64_t nn = space.num_nodes();
  const NestedHierarchy& hier = space.hier();
  const double W = hier.pml_width();
  const double R = opts.reflection;
  const bool enable_pml = opts.enable_pml;
  zt1_.resize(size_t(nn));
  zt2_.resize(size_t(nn));
  zt3_.resize(size_t(nn));
  inv_beta_sigma_.resize(size_t(nn));
  pinned_.assign(size_t(nn), 0);
  for (int64_t n = 0; n < nn; ++n) {
    auto x = space.node_pos(n);
    double z1 = 0, z2 = 0;
    if (enable_pml) {
      z1 = zeta(x[0], hier.half_width(0), W, R);
      if (spec.dim == 2) z2 = zeta(x[1], hier.half_width(1), W, R);
    }
    zt1_[size_t(n)] = -1.0 + 0.5 * dt * (z1 + z2);
    zt2_[size_t(n)] = 2.0 - dt * dt * z1 * z2;
    zt3_[size_t(n)] = 1.0 + 0.5 * dt * (z1 + z2);
    inv_beta_sigma_[size_t(n)] =
        1.0 / (spec.beta(x) * space.sigma()[size_t(n)]);
    if (opts.boundary == BoundaryMode::dirichlet && space.on_domain_boundary(n))
      pinned_[size_t(n)] = 1;
    if (space.on_scatterer_boundary(n)) pinned_[size_t(n)] = 1;
    if (opts.boundary == BoundaryMode::characteristic &&
        space.on_domain_boundary(n)) {
      // transparent condition imposed weakly: the boundary flux
      // alpha dn u = -(alpha/c0) dt u adds first-order damping to the row
      double g = spec.alpha(x) /
                 (spec.c0 * spec.beta(x) * space.sigma()[size_t(n)]);
      zt1_[size_t(n)] += 0.5 * dt * g;
      zt3_[size_t(n)] += 0.5 * dt * g;
    }
  }
  const int npts = space.npts();
  alpha_w_.resize(size_t(space.num_leaves()));
  pml_elem_.resize(size_t(space.num_leaves()));
  for (int64_t li = 0; li < space.num_leaves(); ++li) {
    auto& aw = alpha_w_[size_t(li)];
    aw.resize(size_t(npts));
    for (int q = 0; q < npts; ++q) aw[size_t(q)] = spec.alpha(space.local_point(li, q));
    if (enable_pml && hier.in_pml_box(space.leaf_box(li))) {
      auto& pe = pml_elem_[size_t(li)];
      pe.zeta1.resize(size_t(npts));
      pe.zeta2.resize(size_t(npts));
      for (int q = 0; q < npts; ++q) {
        auto x = space.local_point(li, q);
        pe.zeta1[size_t(q)] = zeta(x[0], hier.half_width(0), W, R);
        pe.zeta2[size_t(q)] =
            spec.dim == 2 ? zeta(x[1], hier.half_width(1), W, R) : 0.0;
      }
    }
  }
}

NodalField StepContext::apply_operator(const NodalField& u,
                                       const ElemField& s) const {
  const FemSpace& sp = *space_;
  const int npts = sp.npts();
  const int dim = sp.dim();
  NodalField out(static_cast<size_t>(sp.num_nodes()), 0.0);
  double loc[25], gx[25], gy[25], Fx[25], Fy[25], r[25];
  for (int64_t li = 0; li < sp.num_leaves(); ++li) {
    sp.gather(u, li, loc);
    auto sz = sp.leaf_size(li);
    element_gradient(dim, sp.degree(), sz[0], sz[1], loc, gx, gy);
    const double* aw = alpha_w_[size_t(li)].data();
    const bool has_s = li < int64_t(s.size()) && !s[size_t(li)].empty();
    const double* sv = has_s ? s[size_t(li)].data() : nullptr;
    for (int q = 0; q < npts; ++q) {
      double s1 = has_s ? sv[q] : 0.0;
      Fx[q] = aw[q] * (gx[q] + s1);
      if (dim == 2) {
        double s2 = has_s ? sv[npts + q] : 0.0;
        Fy[q] = aw[q] * (gy[q] + s2);
      }
    }
    std::fill(r, r + npts, 0.0);
    add_element_flux(dim, sp.degree(), sz[0], sz[1], Fx, Fy, r);
    sp.scatter_add(li, r, out);
  }
  for (int64_t n = 0; n < sp.num_nodes(); ++n)
    out[size_t(n)] = pinned_[size_t(n)] ? 0.0
                                        : out[size_t(n)] * inv_beta_sigma_[size_t(n)];
  return out;
}

WaveState StepContext::make_state() const {
  WaveState st;
  st.u.assign(size_t(space_->num_nodes()), 0.0);
  st.u_old = st.u;
  st.s.resize(size_t(space_->num_leaves()));
  for (int64_t li = 0; li < space_->num_leaves(); ++li)
    if (!pml_elem_[size_t(li)].zeta1.empty())
      st.s[size_t(li)].assign(size_t(space_->dim() * space_->npts()), 0.0);
  return st;
}

void StepContext::apply_scatterer_values(NodalField& u, double t) const {
  for (int64_t n : space_->scatterer_boundary_nodes())
    u[size_t(n)] = -incoming_wavelet(space_->node_pos(n), t, *spec_);
}

void StepContext::do_time_step(WaveState& state, double t_n) const {
  const FemSpace& sp = *space_;
  const int64_t nn = sp.num_nodes();
  const double dt = dt_;
  NodalField f = discrete_source(sp, t_n, dt, *spec_);
  NodalField Lu = apply_operator(state.u, state.s);
  NodalField u_new(static_cast<size_t>(nn));
  for (int64_t n = 0; n < nn; ++n) {
    if (pinned_[size_t(n)]) {
      u_new[size_t(n)] = 0.0;
      continue;
    }
    u_new[size_t(n)] =
        (zt1_[size_t(n)] * state.u_old[size_t(n)] +
         zt2_[size_t(n)] * state.u[size_t(n)] +
         dt * dt * (-Lu[size_t(n)] + f[size_t(n)])) /
        zt3_[size_t(n)];
  }
  for (int64_t n : sp.scatterer_boundary_nodes())
    u_new[size_t(n)] = -incoming_wavelet(sp.node_pos(n), t_n + dt, *spec_);

  // auxiliary field update from the midpoint gradient
  const int npts = sp.npts();
  const int dim = sp.dim();
  double half[25], gx[25], gy[25], loc_a[25], loc_b[25];
  for (int64_t li = 0; li < sp.num_leaves(); ++li) {
    auto& sv = state.s[size_t(li)];
    if (sv.empty()) continue;
    const PmlElem& pe = pml_elem_[size_t(li)];
    sp.gather(state.u, li, loc_a);
    sp.gather(u_new, li, loc_b);
    for (int q = 0; q < npts; ++q) half[q] = 0.5 * (loc_a[q] + loc_b[q]);
    auto sz = sp.leaf_size(li);
    element_gradient(dim, sp.degree(), sz[0], sz[1], half, gx, gy);
    for (int q = 0; q < npts; ++q) {
      double z1 = pe.zeta1[size_t(q)], z2 = pe.zeta2[size_t(q)];
      sv[size_t(q)] = ((1.0 - 0.5 * dt * z1) * sv[size_t(q)] -
                       dt * (z1 - z2) * gx[q]) /
                      (1.0 + 0.5 * dt * z1);
      if (dim == 2)
        sv[size_t(npts + q)] = ((1.0 - 0.5 * dt * z2) * sv[size_t(npts + q)] -
                                dt * (z2 - z1) * gy[q]) /
                               (1.0 + 0.5 * dt * z2);
    }
  }
  state.u_old.swap(state.u);
  state.u.swap(u_new);
}

std::vector<int64_t> sound_soft_mask(const FemSpace& space) {
  return space.scatterer_boundary_nodes();
}

}  // namespace wavescat
