#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace wavescat {

// Axis-aligned box in fine-lattice units, half-open [lo, hi) per axis.
struct LatticeBox {
  std::array<int64_t, 2> lo{0, 0};
  std::array<int64_t, 2> hi{1, 1};

  int64_t extent(int axis) const { return hi[axis] - lo[axis]; }
  bool contains(const LatticeBox& other) const {
    return lo[0] <= other.lo[0] && hi[0] >= other.hi[0] &&
           lo[1] <= other.lo[1] && hi[1] >= other.hi[1];
  }
  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;
};

// One element of a level mesh: the level index plus per-axis cell indices
// into that level's axis partitions.
struct ElementId {
  int32_t level = 1;  // 1..K
  std::array<int32_t, 2> cell{0, 0};

  friend bool operator==(const ElementId&, const ElementId&) = default;
  friend auto operator<=>(const ElementId&, const ElementId&) = default;
};

struct ElementIdHash {
  size_t operator()(const ElementId& e) const {
    uint64_t k = (uint64_t(uint32_t(e.level)) << 48) ^
                 (uint64_t(uint32_t(e.cell[0])) << 24) ^
                 uint64_t(uint32_t(e.cell[1]));
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return size_t(k);
  }
};

// The a-priori nested Cartesian levels T^1..T^K over the computational box
// Omega = prod_i (-L_i - W, L_i + W). Level k uses spacing h_k inside
// |x_i| < L_i and the finest spacing h_K in the absorbing strips beyond.
// All geometry is kept in integer units of h_K so tiling and nesting
// checks are exact.
class NestedHierarchy {
 public:
  NestedHierarchy(int dim, std::vector<double> h_list,
                  std::array<double, 2> half_width, double pml_width);

  int dim() const { return dim_; }
  int levels() const { return int(h_.size()); }
  double h(int level) const { return h_[level - 1]; }
  double h_fine() const { return h_.back(); }
  double half_width(int axis) const { return half_width_[axis]; }
  // the lattice-aligned layer width actually used (requested width rounded
  // up to a multiple of h_K)
  double pml_width() const { return double(pml_cells_) * h_fine(); }
  int64_t pml_cells() const { return pml_cells_; }
  std::array<int64_t, 2> fine_cells() const { return cells_; }
  double origin(int axis) const { return -half_width_[axis] - pml_width(); }
  double to_physical(int axis, double lattice) const {
    return origin(axis) + lattice * h_fine();
  }
  double to_lattice(int axis, double x) const {
    return (x - origin(axis)) / h_fine();
  }
  double domain_measure() const;  // |Omega| minus any scatterer

  int64_t axis_cells(int level, int axis) const;
  // lattice interval [lo,hi) of axis cell idx at the given level
  std::pair<int64_t, int64_t> axis_interval(int level, int axis,
                                            int64_t idx) const;
  // index of the level's axis cell containing fine coordinate in [0,N)
  int64_t axis_cell_at(int level, int axis, int64_t fine) const;

  LatticeBox box(const ElementId& e) const;
  ElementId parent(const ElementId& e) const;
  std::vector<ElementId> subelements(const ElementId& e) const;
  ElementId element_at(int level, std::array<int64_t, 2> fine_cell) const;
  int64_t level_elem_count(int level) const;
  // true when the element has any extent outside the region of interest
  bool in_pml(const ElementId& e) const;
  bool in_pml_box(const LatticeBox& b) const;

  // Sound-soft scatterer support: a union of level-1 cells strictly inside
  // the region of interest. Covered elements are excluded from all meshes.
  void set_scatterer(const std::vector<LatticeBox>& boxes);
  bool has_scatterer() const { return !scatterer_.empty(); }
  const std::vector<LatticeBox>& scatterer() const { return scatterer_; }
  bool cell_in_scatterer(int64_t cx, int64_t cy) const;
  bool element_in_scatterer(const ElementId& e) const;

 private:
  struct Axis {
    int64_t pml = 0;  // strip cells (width 1) on each side
    int64_t m = 0;    // interior cell count
    int64_t w = 1;    // interior cell width in fine units
    int64_t count() const { return 2 * pml + m; }
  };
  const Axis& axis(int level, int ax) const {
    return axes_[size_t(level - 1)][size_t(ax)];
  }

  int dim_;
  std::vector<double> h_;
  std::array<double, 2> half_width_;
  int64_t pml_cells_ = 0;
  std::array<int64_t, 2> cells_{1, 1};
  std::vector<std::array<Axis, 2>> axes_;
  std::vector<LatticeBox> scatterer_;
};

// A mesh of leaves drawn from the hierarchy, tiling Omega (minus the
// scatterer) exactly once.
struct AdaptedMesh {
  const NestedHierarchy* hier = nullptr;
  std::vector<ElementId> leaves;     // sorted by (level, cell)
  std::vector<int32_t> cell_leaf;    // fine cell -> leaf index, -1 in scatterer

  int64_t num_leaves() const { return int64_t(leaves.size()); }
  int32_t leaf_at(int64_t cx, int64_t cy) const;
  bool contains(const ElementId& e) const;
};

// Builds a mesh from an arbitrary leaf set; validates the exact tiling.
AdaptedMesh make_mesh(const NestedHierarchy& hier, std::vector<ElementId> leaves);
AdaptedMesh uniform_mesh(const NestedHierarchy& hier, int level);

std::vector<ElementId> get_parent_elements(const AdaptedMesh& mesh);
AdaptedMesh get_child_elements(const NestedHierarchy& hier,
                               const std::vector<ElementId>& parents);
double element_distance(const NestedHierarchy& hier, const ElementId& a,
                        const ElementId& b);
std::vector<ElementId> mark_nearby_elements(const NestedHierarchy& hier,
                                            const std::vector<ElementId>& marked,
                                            double radius);

}  // namespace wavescat
