#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "wavescat/adapt.hpp"
#include "wavescat/fourier.hpp"
#include "wavescat/stepper.hpp"

namespace wavescat {

struct SolverParams {
  int degree = 2;
  double c_cfl = 0.9;
  double reflection = 1e-10;
  double t_up = 0;     // 0 means pi/omega
  double eta0 = 0;     // 0 means omega/100
  double eps0 = 0;     // 0 means omega/100
  double t_max = 100;  // abort when t - t0 exceeds this without stopping
};

struct CaseSetup {
  std::string name;
  ProblemSpec spec;
  std::vector<double> h_list;
  SolverParams params;

  double t_up() const;
  double eta0() const;
  double eps0() const;
  NestedHierarchy make_hierarchy() const;           // scatterer applied
  NestedHierarchy make_uniform_hierarchy(double h) const;
};

struct RunReport {
  std::string case_name;
  int dim = 1;
  double omega = 0;
  int degree = 2;
  int m = 0;
  double dt = 0, t_up = 0, t0 = 0, t_f = 0, t_stop = 0;
  int j_stop = 0;
  int64_t steps = 0;
  std::vector<int64_t> node_counts;  // |X(T_j)| for j = 1..j_stop
  double avg_dof = 0;
  double err2 = -1;                  // filled when a reference is available
  double wall_seconds = 0;
};

// thrown when t exceeds t0 + t_max without triggering the stop rule
struct SolveAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepObserver {
  virtual ~StepObserver() = default;
  // after the mesh update at t = T_{j-1}, before the inner steps of interval j
  virtual void on_mesh_update(int /*j*/, const FemSpace& /*space*/,
                              double /*t*/) {}
  // after each completed step; u = u^n at time t^n
  virtual void on_step(int64_t /*n*/, const FemSpace& /*space*/,
                       const NodalField& /*u*/, double /*t*/) {}
};

struct SolveResult {
  UniformField U;
  RunReport report;
};

// the front-tracking solve with on-the-fly Fourier reconstruction
SolveResult solve_helmholtz(const CaseSetup& setup, StepObserver* obs = nullptr);

// classical fixed-mesh solve on a uniform mesh of width h, run to the given
// stopping time with naive per-step accumulation; m_override forces the
// number of steps per T_up (0 selects by the CFL rule for this h)
SolveResult solve_uniform_reference(const CaseSetup& setup, double h,
                                    double t_stop, int m_override = 0);

// 1D reference on the region of interest only, with the transparent
// characteristic boundary instead of the absorbing layer
SolveResult solve_1d_abc_reference(const CaseSetup& setup, double h,
                                   double t_stop, int m_override = 0);

// L2 norm of a-b over the region of interest (-L,L)^dim, excluding any
// boxes in `exclude`; fields may live on different commensurate grids
double error_l2(const UniformField& a, const UniformField& b,
                std::array<double, 2> half_width, int dim,
                const std::vector<Box>* exclude = nullptr);

struct GrowthRow {
  double omega = 0;
  double avg_dof = 0;
  double ratio = 0;  // vs the previous row
  double rate = 0;   // log2(ratio)
};
std::vector<GrowthRow> dof_growth_rates(const std::vector<RunReport>& reports);

}  // namespace wavescat
