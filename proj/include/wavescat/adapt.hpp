#pragma once

#include "wavescat/femspace.hpp"

namespace wavescat {

struct AdaptParams {
  double eta0 = 0;    // projection-error threshold
  double eps0 = 0;    // stopping threshold
  double t_up = 0;    // mesh update interval
  double c_max = 0;   // maximum wave speed, for the marking dilation
};

// sup of sqrt(alpha/beta) sampled on the finest lattice nodes
double max_wave_speed(const ProblemSpec& spec, const NestedHierarchy& hier);

// true when E overlaps the forcing support at time t, or the projection
// error of u onto E exceeds eta0. E's children must be current leaves.
bool needs_refinement(const FemSpace& space, const NodalField& u,
                      const ElementId& e, double t, const ProblemSpec& spec,
                      double eta0);

// keeps every parent that still has sub-parents in the set; leaf-parents
// stay only when needs_refinement says so
std::vector<ElementId> mark_elements(const FemSpace& space, const NodalField& u,
                                     const std::vector<ElementId>& parents,
                                     double t, const ProblemSpec& spec,
                                     double eta0);

AdaptedMesh update_mesh(const FemSpace& space, const NodalField& u, double t,
                        const ProblemSpec& spec, const AdaptParams& params);

// true when t > t_f and the nodal sup of |u| is at most eps0
bool should_stop(const FemSpace& space, const NodalField& u, double t,
                 const ProblemSpec& spec, double eps0);

}  // namespace wavescat
