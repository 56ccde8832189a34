#pragma once

#include <complex>
#include <vector>

#include "wavescat/femspace.hpp"

namespace wavescat {

// A field on the tensor Gauss-Lobatto node grid of a uniform lattice:
// cells[i] cells of width h per axis, degree-p nodes, so cells[i]*p + 1
// node coordinates per axis, x-major storage.
struct UniformField {
  int dim = 1;
  int degree = 2;
  double h = 1;
  std::array<double, 2> origin{0, 0};
  std::array<int64_t, 2> cells{1, 1};
  std::vector<Complex> values;

  int64_t nodes_along(int axis) const {
    return axis < dim ? cells[size_t(axis)] * degree + 1 : 1;
  }
  int64_t num_nodes() const { return nodes_along(0) * nodes_along(1); }
  int64_t index(int64_t ix, int64_t iy) const { return ix * nodes_along(1) + iy; }
  double node_coord(int axis, int64_t i) const;
  Complex eval(std::array<double, 2> x) const;
  void allocate() { values.assign(size_t(num_nodes()), Complex{}); }
};

// node layout of the hierarchy's finest mesh
UniformField make_fine_field(const NestedHierarchy& hier, int degree);

// Literal discrete characteristic function of an element: half-open per
// axis, except that the upper domain boundary is included.
bool chi_element(const NestedHierarchy& hier, const ElementId& e,
                 std::array<double, 2> x);

// interpolation of a nodal field onto the fine node grid, each fine node
// evaluated on its owning element
template <class T>
std::vector<T> interpolate_to_fine(const FemSpace& space,
                                   const std::vector<T>& u);

// fine-grid node index -> space node id, or -1 where the grid point is not
// a node of the space (hanging locations); mainly useful on uniform meshes
std::vector<int32_t> grid_node_map(const FemSpace& space);

// Incremental Fourier transform in time: per-element increments
// dU_E += dt e^{i omega t} u|_E accumulated while an element is live, and
// deposited onto the fine grid (chi-weighted, so each fine node is written
// exactly once) when the element retires.
class FourierAccumulator {
 public:
  FourierAccumulator(const NestedHierarchy& hier, int degree,
                     const AdaptedMesh& initial_mesh);

  void update_increments(const FemSpace& space, const NodalField& u, double t,
                         double omega, double dt);
  // deposits for elements of old_space's mesh that are absent from new_mesh;
  // pass nullptr to flush everything
  void update_ft(const FemSpace& old_space, const AdaptedMesh* new_mesh);
  void initialise_new_increments(const AdaptedMesh& old_mesh,
                                 const AdaptedMesh& new_mesh);

  const UniformField& field() const { return U_; }
  UniformField take_field() { return std::move(U_); }

 private:
  void deposit(const FemSpace& old_space, int64_t leaf);

  int degree_;
  UniformField U_;
  std::vector<std::vector<Complex>> dU_;  // aligned with the current mesh
};

}  // namespace wavescat
