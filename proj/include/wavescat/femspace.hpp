#pragma once

#include <complex>
#include <vector>

#include "wavescat/gl.hpp"
#include "wavescat/hierarchy.hpp"
#include "wavescat/problem.hpp"

namespace wavescat {

using Complex = std::complex<double>;
using NodalField = std::vector<double>;

// Conforming Gauss-Lobatto tensor-product space on an adapted mesh. Global
// unknowns are the distinct GL points after the hanging-node rule: on a
// hanging face only the coarse side's points are nodes, and fine-side points
// are interpolated from the coarse face polynomial. Constraints are
// flattened at build time, so every element slot resolves to either a single
// node or a short weighted node list.
class FemSpace {
 public:
  FemSpace(const AdaptedMesh& mesh, int degree);

  const AdaptedMesh& mesh() const { return *mesh_; }
  const NestedHierarchy& hier() const { return *hier_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int npts() const { return npts_; }  // (p+1)^dim slots per element
  int64_t num_nodes() const { return nnodes_; }
  int64_t num_leaves() const { return int64_t(leaf_box_.size()); }

  std::array<double, 2> node_pos(int64_t n) const {
    return {node_x_[size_t(n)], node_y_[size_t(n)]};
  }
  const std::vector<double>& sigma() const { return sigma_; }
  bool on_domain_boundary(int64_t n) const { return flags_[size_t(n)] & 1; }
  bool on_scatterer_boundary(int64_t n) const { return flags_[size_t(n)] & 2; }
  const std::vector<int64_t>& scatterer_boundary_nodes() const {
    return scat_nodes_;
  }

  const LatticeBox& leaf_box(int64_t leaf) const {
    return leaf_box_[size_t(leaf)];
  }
  // physical element extents (hx, hy); hy = 1 in 1D
  std::array<double, 2> leaf_size(int64_t leaf) const {
    const LatticeBox& b = leaf_box_[size_t(leaf)];
    double h = hier_->h_fine();
    return {double(b.extent(0)) * h, dim_ == 2 ? double(b.extent(1)) * h : 1.0};
  }
  double leaf_measure(int64_t leaf) const {
    auto s = leaf_size(leaf);
    return dim_ == 2 ? s[0] * s[1] : s[0];
  }
  // physical coordinates of a local GL point
  std::array<double, 2> local_point(int64_t leaf, int q) const;
  // tensor reference weight of a local GL point
  double ref_weight(int q) const;

  bool slot_direct(int64_t leaf, int q) const {
    return slot_[size_t(leaf) * size_t(npts_) + size_t(q)] >= 0;
  }
  int32_t slot_node(int64_t leaf, int q) const {
    return slot_[size_t(leaf) * size_t(npts_) + size_t(q)];
  }

  template <class T>
  void gather(const std::vector<T>& u, int64_t leaf, T* out) const {
    const int32_t* s = &slot_[size_t(leaf) * size_t(npts_)];
    for (int q = 0; q < npts_; ++q) {
      int32_t v = s[q];
      if (v >= 0) {
        out[q] = u[size_t(v)];
      } else {
        int32_t r = -v - 1;
        T acc{};
        for (int32_t k = row_ptr_[size_t(r)]; k < row_ptr_[size_t(r) + 1]; ++k)
          acc += row_w_[size_t(k)] * u[size_t(row_node_[size_t(k)])];
        out[q] = acc;
      }
    }
  }

  void scatter_add(int64_t leaf, const double* local,
                   std::vector<double>& out) const {
    const int32_t* s = &slot_[size_t(leaf) * size_t(npts_)];
    for (int q = 0; q < npts_; ++q) {
      int32_t v = s[q];
      if (v >= 0) {
        out[size_t(v)] += local[q];
      } else {
        int32_t r = -v - 1;
        for (int32_t k = row_ptr_[size_t(r)]; k < row_ptr_[size_t(r) + 1]; ++k)
          out[size_t(row_node_[size_t(k)])] += row_w_[size_t(k)] * local[q];
      }
    }
  }

  // value of the piecewise polynomial at a physical point in closure(Omega);
  // returns zero inside the scatterer
  template <class T>
  T eval(const std::vector<T>& u, std::array<double, 2> x) const {
    int64_t leaf = owner_leaf(x);
    if (leaf < 0) return T{};
    std::vector<T> loc(static_cast<size_t>(npts_));
    gather(u, leaf, loc.data());
    return eval_local(leaf, loc.data(), x);
  }

  // leaf whose closure contains x, honouring the half-open ownership rule;
  // -1 inside the scatterer; throws outside the domain
  int64_t owner_leaf(std::array<double, 2> x) const;
  template <class T>
  T eval_local(int64_t leaf, const T* loc, std::array<double, 2> x) const {
    const LobattoRule& rule = lobatto_rule(degree_);
    const LatticeBox& b = leaf_box_[size_t(leaf)];
    double lx[5], ly[5];
    double tx = (hier_->to_lattice(0, x[0]) - double(b.lo[0])) / double(b.extent(0));
    for (int k = 0; k <= degree_; ++k) lx[k] = rule.lagrange(k, tx);
    int ny = dim_ == 2 ? degree_ + 1 : 1;
    if (dim_ == 2) {
      double ty =
          (hier_->to_lattice(1, x[1]) - double(b.lo[1])) / double(b.extent(1));
      for (int k = 0; k <= degree_; ++k) ly[k] = rule.lagrange(k, ty);
    } else {
      ly[0] = 1.0;
    }
    T acc{};
    for (int qx = 0; qx <= degree_; ++qx)
      for (int qy = 0; qy < ny; ++qy)
        acc += lx[qx] * ly[qy] * loc[qx * ny + qy];
    return acc;
  }

 private:
  void classify_faces();
  void register_nodes();
  void resolve_constraints();
  void compute_sigma();

  const AdaptedMesh* mesh_;
  const NestedHierarchy* hier_;
  int degree_, dim_, npts_;
  int64_t nnodes_ = 0;
  std::vector<double> node_x_, node_y_;
  std::vector<double> sigma_;
  std::vector<uint8_t> flags_;
  std::vector<int64_t> scat_nodes_;
  std::vector<int32_t> slot_;
  std::vector<int32_t> row_ptr_{0};
  std::vector<int32_t> row_node_;
  std::vector<double> row_w_;
  std::vector<int32_t> face_;  // per leaf, 4 entries; see femspace.cpp
  std::vector<LatticeBox> leaf_box_;
};

// gx[(qx,qy)] = d/dx of the element polynomial at its GL points, from local
// values v; gy likewise (2D only)
void element_gradient(int dim, int degree, double hx, double hy,
                      const double* v, double* gx, double* gy);

// r[q'] += (G, grad l_q')_E with tensor GL quadrature, G given at the
// element's GL points
void add_element_flux(int dim, int degree, double hx, double hy,
                      const double* Gx, const double* Gy, double* r);

// Lumped-mass projection between two spaces over the same hierarchy,
// evaluated on the union-mesh overlay with elementwise GL quadrature. The
// target basis is taken element-locally, which makes the projection the
// exact identity for identical meshes and exact interpolation under pure
// refinement.
template <class T>
std::vector<T> project_field(const FemSpace& from, const std::vector<T>& u,
                             const FemSpace& to);

// Projection of a per-element (discontinuous) field between meshes. Entries
// follow the absorbing-layer membership of the target mesh: empty vectors
// outside the layer, dim*npts values inside.
std::vector<std::vector<double>> project_element_field(
    const FemSpace& from, const std::vector<std::vector<double>>& s,
    const FemSpace& to);

// Local projection of the values on E's children onto E's own polynomial
// space, plus the nodal projection error max over the child GL points.
struct ElementProjection {
  std::vector<double> coarse;  // values at E's local GL points
  double eta = 0;
};
ElementProjection project_element(const FemSpace& space, const NodalField& u,
                                  const ElementId& parent);

// Discrete source f_T(., t) for the current space. Plane-wavelet sources
// combine the nodal D_t^2 u_I term with a stiffness-type term from the
// material contrast; external point sources are interpolated nodally.
NodalField discrete_source(const FemSpace& space, double t, double dt,
                           const ProblemSpec& spec);

}  // namespace wavescat
