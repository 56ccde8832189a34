#include "wavescat/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace wavescat {

double max_wave_speed(const ProblemSpec& spec, const NestedHierarchy& hier) {
  double c = 0;
  const auto cells = hier.fine_cells();
  const int64_t ny = spec.dim == 2 ? cells[1] : 0;
  for (int64_t ix = 0; ix <= cells[0]; ++ix)
    for (int64_t iy = 0; iy <= ny; ++iy) {
      std::array<double, 2> x{hier.to_physical(0, double(ix)),
                              spec.dim == 2 ? hier.to_physical(1, double(iy))
                                            : 0.0};
      c = std::max(c, std::sqrt(spec.alpha(x) / spec.beta(x)));
    }
  return c;
}

namespace {

// closed-support overlap of the forcing with the element box at time t
bool forcing_overlaps(const NestedHierarchy& hier, const LatticeBox& b,
                      double t, const ProblemSpec& spec) {
  if (spec.source == SourceKind::external_point) {
    if (std::abs(t) > spec.xi0() / spec.omega) return false;
    double r = M_PI * spec.c0 / spec.omega;  // support radius of F
    for (int a = 0; a < spec.dim; ++a) {
      double lo = hier.to_physical(a, double(b.lo[size_t(a)]));
      double hi = hier.to_physical(a, double(b.hi[size_t(a)]));
      double c = spec.source_center[size_t(a)];
      if (c + r < lo || c - r > hi) return false;
    }
    return true;
  }
  double rx_min = 0, rx_max = 0;
  for (int a = 0; a < spec.dim; ++a) {
    double lo = hier.to_physical(a, double(b.lo[size_t(a)]));
    double hi = hier.to_physical(a, double(b.hi[size_t(a)]));
    double d = spec.direction[size_t(a)];
    rx_min += std::min(d * lo, d * hi);
    rx_max += std::max(d * lo, d * hi);
  }
  double slab_lo = spec.c0 * (t - spec.xi0() / spec.omega);
  double slab_hi = spec.c0 * (t + spec.xi0() / spec.omega);
  return rx_max >= slab_lo && rx_min <= slab_hi;
}

}  // namespace

bool needs_refinement(const FemSpace& space, const NodalField& u,
                      const ElementId& e, double t, const ProblemSpec& spec,
                      double eta0) {
  if (forcing_overlaps(space.hier(), space.hier().box(e), t, spec)) return true;
  return project_element(space, u, e).eta > eta0;
}

std::vector<ElementId> mark_elements(const FemSpace& space, const NodalField& u,
                                     const std::vector<ElementId>& parents,
                                     double t, const ProblemSpec& spec,
                                     double eta0) {
  std::unordered_set<ElementId, ElementIdHash> pset(parents.begin(),
                                                    parents.end());
  std::vector<ElementId> marked;
  for (const ElementId& e : parents) {
    bool has_sub_parent = false;
    for (const ElementId& c : space.hier().subelements(e))
      if (pset.count(c)) {
        has_sub_parent = true;
        break;
      }
    if (has_sub_parent || needs_refinement(space, u, e, t, spec, eta0))
      marked.push_back(e);
  }
  return marked;
}

AdaptedMesh update_mesh(const FemSpace& space, const NodalField& u, double t,
                        const ProblemSpec& spec, const AdaptParams& params) {
  const NestedHierarchy& hier = space.hier();
  std::vector<ElementId> parents = get_parent_elements(space.mesh());
  std::vector<ElementId> marked =
      mark_elements(space, u, parents, t, spec, params.eta0);
  // The forcing support is marked at every level, whether or not the region
  // is currently refined. Where the wave zone propagates freely this adds
  // nothing beyond the dilation; it matters behind sound-soft walls, whose
  // boundary data excites the shadow region without a travelling precursor.
  {
    std::unordered_set<ElementId, ElementIdHash> mset(marked.begin(),
                                                      marked.end());
    for (int level = 1; level < hier.levels(); ++level)
      for (int64_t ix = 0; ix < hier.axis_cells(level, 0); ++ix)
        for (int64_t iy = 0; iy < hier.axis_cells(level, 1); ++iy) {
          ElementId e{int32_t(level), {int32_t(ix), int32_t(iy)}};
          if (hier.element_in_scatterer(e)) continue;
          if (forcing_overlaps(hier, hier.box(e), t, spec)) mset.insert(e);
        }
    marked.assign(mset.begin(), mset.end());
    std::sort(marked.begin(), marked.end());
  }
  std::vector<ElementId> dilated =
      mark_nearby_elements(hier, marked, params.c_max * params.t_up);
  return get_child_elements(hier, dilated);
}

bool should_stop(const FemSpace& space, const NodalField& u, double t,
                 const ProblemSpec& spec, double eps0) {
  if (!(t > spec.tf())) return false;
  double m = 0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m <= eps0;
}

}  // namespace wavescat
