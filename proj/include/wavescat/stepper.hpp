#pragma once

#include <vector>

#include "wavescat/femspace.hpp"

namespace wavescat {

// quadratic damping ramp: 0 for |x| <= L, rising to |log R| * 3/(2W) at
// |x| = L + W
double zeta(double x, double L, double W, double R);

// largest Rayleigh quotient (grad u, grad u) / (u, u) of the reference
// element with GL quadrature norms; 24 for p=2 in 1D, 48 in 2D
double reference_operator_eigenvalue(int degree, int dim);

struct CflChoice {
  int m = 0;          // steps per mesh-update interval
  double dt = 0;      // T_up / m
  double lambda = 0;  // the eigenvalue bound used
};
// smallest m with T_up/m <= c_cfl * 2 / sqrt(lambda_max)
CflChoice cfl_timestep(double T_up, const ProblemSpec& spec,
                       const NestedHierarchy& hier, double c_cfl, int degree);

// per-element auxiliary field values; empty entries outside the layer,
// otherwise dim*npts values, component-major
using ElemField = std::vector<std::vector<double>>;

struct WaveState {
  NodalField u, u_old;
  ElemField s;
};

enum class BoundaryMode {
  dirichlet,        // u = 0 on the outer boundary
  characteristic,   // 1D transparent boundary dt u +- c0 dx u = 0
};

struct StepOptions {
  BoundaryMode boundary = BoundaryMode::dirichlet;
  bool enable_pml = true;
  double reflection = 1e-10;  // expected artificial reflection R
};

// Everything the explicit update needs for one mesh epoch: damping
// coefficients per node, material values per quadrature point, and the
// Dirichlet/scatterer bookkeeping.
class StepContext {
 public:
  StepContext(const FemSpace& space, const ProblemSpec& spec, double dt,
              StepOptions opts = {});

  const FemSpace& space() const { return *space_; }
  double dt() const { return dt_; }

  // L_T(u, s) at every node; Dirichlet rows forced to zero
  NodalField apply_operator(const NodalField& u, const ElemField& s) const;

  // advances (u^{n-1}, u^n, s^n) -> (u^n, u^{n+1}, s^{n+1}); t_n is the
  // current time (the source is evaluated at t_n)
  void do_time_step(WaveState& state, double t_n) const;

  WaveState make_state() const;
  // pins scatterer boundary values to -u_I(x, t)
  void apply_scatterer_values(NodalField& u, double t) const;
  bool elem_in_pml(int64_t leaf) const { return !pml_elem_[size_t(leaf)].zeta1.empty(); }

 private:
  struct PmlElem {
    std::vector<double> zeta1, zeta2;  // at the element's GL points
  };
  const FemSpace* space_;
  const ProblemSpec* spec_;
  double dt_;
  StepOptions opts_;
  std::vector<double> zt1_, zt2_, zt3_;      // per node
  std::vector<double> inv_beta_sigma_;       // 1/(beta(x) sigma_x)
  std::vector<uint8_t> pinned_;              // Dirichlet rows
  std::vector<std::vector<double>> alpha_w_; // alpha * tensor weight per quad pt
  std::vector<PmlElem> pml_elem_;            // empty outside the layer
};

// the sound-soft constraint set: nodes on the scatterer boundary, whose
// Dirichlet data is -u_I(x, t)
std::vector<int64_t> sound_soft_mask(const FemSpace& space);

}  // namespace wavescat
