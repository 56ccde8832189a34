#include "wavescat/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace wavescat {

namespace {

int64_t snap_to_integer(double r, const char* what) {
  double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, std::abs(r)) || n < 1)
    throw std::invalid_argument(std::string("hierarchy: ") + what +
                                " is not a positive integer multiple");
  return int64_t(n);
}

}  // namespace

NestedHierarchy::NestedHierarchy(int dim, std::vector<double> h_list,
                                 std::array<double, 2> half_width,
                                 double pml_width)
    : dim_(dim), h_(std::move(h_list)), half_width_(half_width) {
  if (dim_ != 1 && dim_ != 2)
    throw std::invalid_argument("hierarchy: dim must be 1 or 2");
  if (h_.empty()) throw std::invalid_argument("hierarchy: empty h list");
  for (size_t k = 0; k + 1 < h_.size(); ++k) {
    if (!(h_[k] > h_[k + 1]))
      throw std::invalid_argument("hierarchy: h list must be strictly decreasing");
    snap_to_integer(h_[k] / h_[k + 1], "nesting ratio");
  }
  const double hk = h_.back();
  if (pml_width < 0) throw std::invalid_argument("hierarchy: negative PML width");
  pml_cells_ = pml_width == 0 ? 0 : int64_t(std::ceil(pml_width / hk - 1e-9));

  axes_.resize(h_.size());
  for (int level = 1; level <= levels(); ++level) {
    for (int ax = 0; ax < 2; ++ax) {
      Axis a;
      if (ax < dim_) {
        a.pml = pml_cells_;
        a.w = snap_to_integer(h_[size_t(level - 1)] / hk, "level width ratio");
        a.m = snap_to_integer(2.0 * half_width_[size_t(ax)] /
                                  h_[size_t(level - 1)],
                              "domain width / h_k");
      } else {
        a.pml = 0;
        a.w = 1;
        a.m = 1;
      }
      axes_[size_t(level - 1)][size_t(ax)] = a;
    }
  }
  for (int ax = 0; ax < 2; ++ax) {
    const Axis& a = axes_.back()[size_t(ax)];
    cells_[size_t(ax)] = 2 * a.pml + a.m * a.w;
  }
}

double NestedHierarchy::domain_measure() const {
  double m = 1.0;
  for (int ax = 0; ax < dim_; ++ax)
    m *= double(cells_[size_t(ax)]) * h_fine();
  if (!scatterer_.empty()) {
    for (const auto& b : scatterer_) {
      double s = 1.0;
      for (int ax = 0; ax < dim_; ++ax)
        s *= double(b.extent(ax)) * h_fine();
      m -= s;
    }
  }
  return m;
}

int64_t NestedHierarchy::axis_cells(int level, int ax) const {
  return axis(level, ax).count();
}

std::pair<int64_t, int64_t> NestedHierarchy::axis_interval(int level, int ax,
                                                           int64_t idx) const {
  const Axis& a = axis(level, ax);
  if (idx < a.pml) return {idx, idx + 1};
  if (idx < a.pml + a.m) {
    int64_t lo = a.pml + (idx - a.pml) * a.w;
    return {lo, lo + a.w};
  }
  int64_t lo = a.pml + a.m * a.w + (idx - a.pml - a.m);
  return {lo, lo + 1};
}

int64_t NestedHierarchy::axis_cell_at(int level, int ax, int64_t fine) const {
  const Axis& a = axis(level, ax);
  if (fine < a.pml) return fine;
  if (fine < a.pml + a.m * a.w) return a.pml + (fine - a.pml) / a.w;
  return a.pml + a.m + (fine - a.pml - a.m * a.w);
}

LatticeBox NestedHierarchy::box(const ElementId& e) const {
  LatticeBox b;
  for (int ax = 0; ax < 2; ++ax) {
    auto [lo, hi] = axis_interval(e.level, ax, e.cell[size_t(ax)]);
    b.lo[size_t(ax)] = lo;
    b.hi[size_t(ax)] = hi;
  }
  return b;
}

ElementId NestedHierarchy::parent(const ElementId& e) const {
  if (e.level <= 1) throw std::invalid_argument("parent: level-1 element");
  ElementId p;
  p.level = e.level - 1;
  LatticeBox b = box(e);
  for (int ax = 0; ax < 2; ++ax)
    p.cell[size_t(ax)] = int32_t(axis_cell_at(p.level, ax, b.lo[size_t(ax)]));
  return p;
}

std::vector<ElementId> NestedHierarchy::subelements(const ElementId& e) const {
  if (e.level >= levels())
    throw std::invalid_argument("subelements: element at finest level");
  LatticeBox b = box(e);
  const int child_level = e.level + 1;
  std::array<int64_t, 2> c0, c1;
  for (int ax = 0; ax < 2; ++ax) {
    c0[size_t(ax)] = axis_cell_at(child_level, ax, b.lo[size_t(ax)]);
    c1[size_t(ax)] = axis_cell_at(child_level, ax, b.hi[size_t(ax)] - 1);
  }
  std::vector<ElementId> out;
  out.reserve(size_t((c1[0] - c0[0] + 1) * (c1[1] - c0[1] + 1)));
  for (int64_t ix = c0[0]; ix <= c1[0]; ++ix)
    for (int64_t iy = c0[1]; iy <= c1[1]; ++iy)
      out.push_back(ElementId{int32_t(child_level),
                              {int32_t(ix), int32_t(iy)}});
  return out;
}

ElementId NestedHierarchy::element_at(int level,
                                      std::array<int64_t, 2> fine_cell) const {
  ElementId e;
  e.level = int32_t(level);
  for (int ax = 0; ax < 2; ++ax)
    e.cell[size_t(ax)] = int32_t(axis_cell_at(level, ax, fine_cell[size_t(ax)]));
  return e;
}

int64_t NestedHierarchy::level_elem_count(int level) const {
  int64_t n = 1;
  for (int ax = 0; ax < dim_; ++ax) n *= axis_cells(level, ax);
  return n;
}

bool NestedHierarchy::in_pml_box(const LatticeBox& b) const {
  for (int ax = 0; ax < dim_; ++ax) {
    int64_t lo = pml_cells_;
    int64_t hi = cells_[size_t(ax)] - pml_cells_;
    if (b.lo[size_t(ax)] < lo || b.hi[size_t(ax)] > hi) return true;
  }
  return false;
}

bool NestedHierarchy::in_pml(const ElementId& e) const {
  return in_pml_box(box(e));
}

void NestedHierarchy::set_scatterer(const std::vector<LatticeBox>& boxes) {
  // must be a union of level-1 interior cells, so that every element at any
  // level is wholly inside or outside
  for (const auto& b : boxes) {
    for (int ax = 0; ax < dim_; ++ax) {
      const Axis& a1 = axes_.front()[size_t(ax)];
      int64_t lo = b.lo[size_t(ax)], hi = b.hi[size_t(ax)];
      if (lo < pml_cells_ || hi > cells_[size_t(ax)] - pml_cells_)
        throw std::invalid_argument("scatterer: box reaches into the PML");
      if ((lo - a1.pml) % a1.w != 0 || (hi - a1.pml) % a1.w != 0)
        throw std::invalid_argument("scatterer: box not aligned to the coarse lattice");
    }
  }
  scatterer_ = boxes;
}

bool NestedHierarchy::cell_in_scatterer(int64_t cx, int64_t cy) const {
  for (const auto& b : scatterer_) {
    if (cx >= b.lo[0] && cx < b.hi[0] &&
        (dim_ == 1 || (cy >= b.lo[1] && cy < b.hi[1])))
      return true;
  }
  return false;
}

bool NestedHierarchy::element_in_scatterer(const ElementId& e) const {
  if (scatterer_.empty()) return false;
  LatticeBox b = box(e);
  return cell_in_scatterer(b.lo[0], b.lo[1]);
}

int32_t AdaptedMesh::leaf_at(int64_t cx, int64_t cy) const {
  const auto cells = hier->fine_cells();
  return cell_leaf[size_t(cx * cells[1] + cy)];
}

bool AdaptedMesh::contains(const ElementId& e) const {
  return std::binary_search(leaves.begin(), leaves.end(), e);
}

AdaptedMesh make_mesh(const NestedHierarchy& hier,
                      std::vector<ElementId> leaves) {
  std::sort(leaves.begin(), leaves.end());
  AdaptedMesh mesh;
  mesh.hier = &hier;
  mesh.leaves = std::move(leaves);
  const auto cells = hier.fine_cells();
  mesh.cell_leaf.assign(size_t(cells[0] * cells[1]), -1);
  for (size_t li = 0; li < mesh.leaves.size(); ++li) {
    LatticeBox b = hier.box(mesh.leaves[li]);
    for (int64_t cx = b.lo[0]; cx < b.hi[0]; ++cx)
      for (int64_t cy = b.lo[1]; cy < b.hi[1]; ++cy) {
        int32_t& slot = mesh.cell_leaf[size_t(cx * cells[1] + cy)];
        if (slot != -1)
          throw std::invalid_argument("make_mesh: overlapping leaves");
        slot = int32_t(li);
      }
  }
  for (int64_t cx = 0; cx < cells[0]; ++cx)
    for (int64_t cy = 0; cy < cells[1]; ++cy) {
      bool in_sc = hier.cell_in_scatterer(cx, cy);
      bool covered = mesh.cell_leaf[size_t(cx * cells[1] + cy)] != -1;
      if (covered == in_sc)
        throw std::invalid_argument(in_sc ? "make_mesh: leaf inside scatterer"
                                          : "make_mesh: gap in tiling");
    }
  return mesh;
}

AdaptedMesh uniform_mesh(const NestedHierarchy& hier, int level) {
  std::vector<ElementId> leaves;
  for (int64_t ix = 0; ix < hier.axis_cells(level, 0); ++ix)
    for (int64_t iy = 0; iy < hier.axis_cells(level, 1); ++iy) {
      ElementId e{int32_t(level), {int32_t(ix), int32_t(iy)}};
      if (!hier.element_in_scatterer(e)) leaves.push_back(e);
    }
  return make_mesh(hier, std::move(leaves));
}

std::vector<ElementId> get_parent_elements(const AdaptedMesh& mesh) {
  std::unordered_set<ElementId, ElementIdHash> set;
  for (const ElementId& leaf : mesh.leaves) {
    ElementId e = leaf;
    while (e.level > 1) {
      e = mesh.hier->parent(e);
      if (!set.insert(e).second) break;  // ancestors above are already present
    }
  }
  std::vector<ElementId> out(set.begin(), set.end());
  std::sort(out.begin(), out.end());
  return out;
}

AdaptedMesh get_child_elements(const NestedHierarchy& hier,
                               const std::vector<ElementId>& parents) {
  std::unordered_set<ElementId, ElementIdHash> pset(parents.begin(),
                                                    parents.end());
  for (const ElementId& e : parents) {
    if (e.level >= hier.levels())
      throw std::invalid_argument("get_child_elements: parent at finest level");
    if (e.level > 1 && !pset.count(hier.parent(e)))
      throw std::invalid_argument("get_child_elements: set not ancestor-closed");
  }
  std::vector<ElementId> leaves;
  for (int64_t ix = 0; ix < hier.axis_cells(1, 0); ++ix)
    for (int64_t iy = 0; iy < hier.axis_cells(1, 1); ++iy) {
      ElementId e{1, {int32_t(ix), int32_t(iy)}};
      if (!pset.count(e) && !hier.element_in_scatterer(e)) leaves.push_back(e);
    }
  for (const ElementId& e : parents)
    for (const ElementId& c : hier.subelements(e))
      if (!pset.count(c) && !hier.element_in_scatterer(c)) leaves.push_back(c);
  return make_mesh(hier, std::move(leaves));
}

double element_distance(const NestedHierarchy& hier, const ElementId& a,
                        const ElementId& b) {
  LatticeBox ba = hier.box(a), bb = hier.box(b);
  double d2 = 0.0;
  for (int ax = 0; ax < hier.dim(); ++ax) {
    int64_t gap = std::max<int64_t>(
        0, std::max(bb.lo[size_t(ax)] - ba.hi[size_t(ax)],
                    ba.lo[size_t(ax)] - bb.hi[size_t(ax)]));
    double g = double(gap) * hier.h_fine();
    d2 += g * g;
  }
  return std::sqrt(d2);
}

std::vector<ElementId> mark_nearby_elements(const NestedHierarchy& hier,
                                            const std::vector<ElementId>& marked,
                                            double radius) {
  // gaps are integers in fine-lattice units; include strictly-closer
  // elements and the zero-distance closure, exclude exact ties at the
  // radius (which are float-ambiguous)
  const double r_lat = radius / hier.h_fine();
  const double r2 = r_lat * r_lat * (1.0 - 1e-9);
  std::unordered_set<ElementId, ElementIdHash> out;
  const int64_t reach = int64_t(std::ceil(r_lat)) + 1;
  for (const ElementId& e : marked) {
    LatticeBox b = hier.box(e);
    std::array<int64_t, 2> c0{0, 0}, c1{0, 0};
    for (int ax = 0; ax < 2; ++ax) {
      if (ax >= hier.dim()) continue;
      int64_t lo = std::max<int64_t>(0, b.lo[size_t(ax)] - reach);
      int64_t hi = std::min(hier.fine_cells()[size_t(ax)] - 1,
                            b.hi[size_t(ax)] - 1 + reach);
      c0[size_t(ax)] = hier.axis_cell_at(e.level, ax, lo);
      c1[size_t(ax)] = hier.axis_cell_at(e.level, ax, hi);
    }
    for (int64_t ix = c0[0]; ix <= c1[0]; ++ix)
      for (int64_t iy = c0[1]; iy <= c1[1]; ++iy) {
        ElementId cand{e.level, {int32_t(ix), int32_t(iy)}};
        if (hier.element_in_scatterer(cand)) continue;
        LatticeBox cb = hier.box(cand);
        double d2 = 0.0;
        for (int ax = 0; ax < hier.dim(); ++ax) {
          int64_t gap = std::max<int64_t>(
              0, std::max(cb.lo[size_t(ax)] - b.hi[size_t(ax)],
                          b.lo[size_t(ax)] - cb.hi[size_t(ax)]));
          d2 += double(gap * gap);
        }
        if (d2 <= r2) out.insert(cand);
      }
  }
  std::vector<ElementId> v(out.begin(), out.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace wavescat
