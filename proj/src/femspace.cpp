#include "wavescat/femspace.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace wavescat {

namespace {

constexpr int32_t kFaceNone = -1;
constexpr int32_t kFaceBoundary = -2;
constexpr int32_t kFaceScatterer = -3;
constexpr int32_t kUnset = INT32_MIN;

struct NodeKey {
  int64_t kx = 0, ky = 0;
  friend bool operator==(const NodeKey&, const NodeKey&) = default;
};
struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    uint64_t h = uint64_t(k.kx) * 0x9e3779b97f4a7c15ULL ^ uint64_t(k.ky);
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 29;
    return size_t(h);
  }
};

int64_t axis_key(int64_t lo, int64_t hi, int r, int degree) {
  if (r == 0) return lo << 1;
  if (r == degree) return hi << 1;
  return ((((hi - lo) << 24 | lo) << 3 | int64_t(r)) << 1) | 1;
}

double axis_key_coord(int64_t lo, int64_t hi, int r, int degree,
                      const LobattoRule& rule) {
  if (r == 0) return double(lo);
  if (r == degree) return double(hi);
  return double(lo) + double(hi - lo) * rule.node[size_t(r)];
}

}  // namespace

FemSpace::FemSpace(const AdaptedMesh& mesh, int degree)
    : mesh_(&mesh),
      hier_(mesh.hier),
      degree_(degree),
      dim_(mesh.hier->dim()),
      npts_(dim_ == 2 ? (degree + 1) * (degree + 1) : degree + 1) {
  if (degree_ < 1) throw std::invalid_argument("femspace: degree must be >= 1");
  leaf_box_.reserve(mesh.leaves.size());
  for (const ElementId& e : mesh.leaves) leaf_box_.push_back(hier_->box(e));
  classify_faces();
  register_nodes();
  resolve_constraints();
  compute_sigma();
}

void FemSpace::classify_faces() {
  const int64_t nleaf = num_leaves();
  face_.assign(size_t(nleaf) * 4, kFaceNone);
  const auto cells = hier_->fine_cells();
  for (int64_t li = 0; li < nleaf; ++li) {
    const LatticeBox& b = leaf_box_[size_t(li)];
    for (int a = 0; a < dim_; ++a) {
      for (int s = 0; s < 2; ++s) {
        int32_t& f = face_[size_t(li * 4 + a * 2 + s)];
        int64_t across = s == 0 ? b.lo[size_t(a)] - 1 : b.hi[size_t(a)];
        if (across < 0 || across >= cells[size_t(a)]) {
          f = kFaceBoundary;
          continue;
        }
        std::array<int64_t, 2> probe{b.lo[0], b.lo[1]};
        probe[size_t(a)] = across;
        int32_t nb = mesh_->leaf_at(probe[0], probe[1]);
        if (nb < 0) {
          f = kFaceScatterer;
          continue;
        }
        if (dim_ == 2) {
          int ta = 1 - a;
          const LatticeBox& nbb = leaf_box_[size_t(nb)];
          if (nbb.lo[size_t(ta)] <= b.lo[size_t(ta)] &&
              nbb.hi[size_t(ta)] >= b.hi[size_t(ta)] &&
              nbb.extent(ta) > b.extent(ta))
            f = nb;  // coarser neighbour owns the face
        }
      }
    }
  }
}

void FemSpace::register_nodes() {
  const LobattoRule& rule = lobatto_rule(degree_);
  const int64_t nleaf = num_leaves();
  const int ny = dim_ == 2 ? degree_ + 1 : 1;
  const auto cells = hier_->fine_cells();
  slot_.assign(size_t(nleaf) * size_t(npts_), kUnset);
  std::unordered_map<NodeKey, int32_t, NodeKeyHash> ids;
  ids.reserve(size_t(nleaf) * size_t(npts_));
  for (int64_t li = 0; li < nleaf; ++li) {
    const LatticeBox& b = leaf_box_[size_t(li)];
    const int32_t* faces = &face_[size_t(li * 4)];
    for (int qx = 0; qx <= degree_; ++qx) {
      for (int qy = 0; qy < ny; ++qy) {
        int q = qx * ny + qy;
        bool slave = false, scat = false;
        auto check_face = [&](int f) {
          if (faces[f] >= 0) slave = true;
          if (faces[f] == kFaceScatterer) scat = true;
        };
        if (qx == 0) check_face(0);
        if (qx == degree_) check_face(1);
        if (dim_ == 2 && qy == 0) check_face(2);
        if (dim_ == 2 && qy == degree_) check_face(3);
        if (slave) continue;  // constrained; resolved later
        NodeKey key;
        key.kx = axis_key(b.lo[0], b.hi[0], qx, degree_);
        key.ky = dim_ == 2 ? axis_key(b.lo[1], b.hi[1], qy, degree_) : 0;
        auto [it, fresh] = ids.try_emplace(key, int32_t(nnodes_));
        if (fresh) {
          ++nnodes_;
          node_x_.push_back(hier_->to_physical(
              0, axis_key_coord(b.lo[0], b.hi[0], qx, degree_, rule)));
          node_y_.push_back(
              dim_ == 2 ? hier_->to_physical(1, axis_key_coord(b.lo[1], b.hi[1],
                                                               qy, degree_, rule))
                        : 0.0);
          uint8_t fl = 0;
          bool on_bnd = (qx == 0 && b.lo[0] == 0) ||
                        (qx == degree_ && b.hi[0] == cells[0]);
          if (dim_ == 2)
            on_bnd = on_bnd || (qy == 0 && b.lo[1] == 0) ||
                     (qy == degree_ && b.hi[1] == cells[1]);
          if (on_bnd) fl |= 1;
          flags_.push_back(fl);
        }
        if (scat) flags_[size_t(it->second)] |= 2;
        slot_[size_t(li) * size_t(npts_) + size_t(q)] = it->second;
      }
    }
  }
  for (int64_t n = 0; n < nnodes_; ++n)
    if (flags_[size_t(n)] & 2) scat_nodes_.push_back(n);
}

void FemSpace::resolve_constraints() {
  if (dim_ == 1) {
    for (int32_t v : slot_)
      if (v == kUnset)
        throw std::logic_error("femspace: unresolved slot in 1D");
    return;
  }
  const LobattoRule& rule = lobatto_rule(degree_);
  const int ny = degree_ + 1;
  using Row = std::vector<std::pair<int32_t, double>>;
  std::unordered_map<int64_t, Row> memo;
  std::vector<Row> rows;

  std::function<const Row&(int64_t, int)> resolve = [&](int64_t li,
                                                        int q) -> const Row& {
    int64_t key = li * npts_ + q;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int32_t v = slot_[size_t(key)];
    Row row;
    if (v >= 0) {
      row.push_back({v, 1.0});
      return memo.emplace(key, std::move(row)).first->second;
    }
    const int qx = q / ny, qy = q % ny;
    const int32_t* faces = &face_[size_t(li * 4)];
    int f = -1;
    if (qx == 0 && faces[0] >= 0) f = 0;
    else if (qx == degree_ && faces[1] >= 0) f = 1;
    else if (qy == 0 && faces[2] >= 0) f = 2;
    else if (qy == degree_ && faces[3] >= 0) f = 3;
    if (f < 0) throw std::logic_error("femspace: constrained slot without slave face");
    const int a = f / 2, s = f % 2, ta = 1 - a;
    const int64_t master = faces[f];
    const LatticeBox& b = leaf_box_[size_t(li)];
    const LatticeBox& mb = leaf_box_[size_t(master)];
    const int rt = a == 0 ? qy : qx;
    const double tc = double(b.lo[size_t(ta)]) +
                      double(b.extent(ta)) * rule.node[size_t(rt)];
    const double t = (tc - double(mb.lo[size_t(ta)])) / double(mb.extent(ta));
    const int fixed = s == 0 ? degree_ : 0;
    std::map<int32_t, double> acc;
    for (int k = 0; k <= degree_; ++k) {
      double lag = rule.lagrange(k, t);
      if (lag == 0.0) continue;
      int qm = a == 0 ? fixed * ny + k : k * ny + fixed;
      for (const auto& [n, w] : resolve(master, qm)) acc[n] += lag * w;
    }
    row.assign(acc.begin(), acc.end());
    return memo.emplace(key, std::move(row)).first->second;
  };

  for (int64_t li = 0; li < num_leaves(); ++li) {
    for (int q = 0; q < npts_; ++q) {
      int64_t key = li * npts_ + q;
      if (slot_[size_t(key)] != kUnset) continue;
      const Row& row = resolve(li, q);
      slot_[size_t(key)] = -int32_t(rows.size()) - 1;
      rows.push_back(row);
    }
  }
  row_ptr_.assign(1, 0);
  for (const Row& r : rows) {
    for (const auto& [n, w] : r) {
      row_node_.push_back(n);
      row_w_.push_back(w);
    }
    row_ptr_.push_back(int32_t(row_node_.size()));
  }
}

void FemSpace::compute_sigma() {
  sigma_.assign(size_t(nnodes_), 0.0);
  std::vector<double> wloc(static_cast<size_t>(npts_));
  for (int64_t li = 0; li < num_leaves(); ++li) {
    double meas = leaf_measure(li);
    for (int q = 0; q < npts_; ++q) wloc[size_t(q)] = ref_weight(q) * meas;
    scatter_add(li, wloc.data(), sigma_);
  }
}

std::array<double, 2> FemSpace::local_point(int64_t leaf, int q) const {
  const LobattoRule& rule = lobatto_rule(degree_);
  const LatticeBox& b = leaf_box_[size_t(leaf)];
  const int ny = dim_ == 2 ? degree_ + 1 : 1;
  const int qx = q / ny, qy = q % ny;
  std::array<double, 2> x;
  x[0] = hier_->to_physical(
      0, double(b.lo[0]) + double(b.extent(0)) * rule.node[size_t(qx)]);
  x[1] = dim_ == 2
             ? hier_->to_physical(1, double(b.lo[1]) +
                                         double(b.extent(1)) *
                                             rule.node[size_t(qy)])
             : 0.0;
  return x;
}

double FemSpace::ref_weight(int q) const {
  const LobattoRule& rule = lobatto_rule(degree_);
  if (dim_ == 1) return rule.weight[size_t(q)];
  const int ny = degree_ + 1;
  return rule.weight[size_t(q / ny)] * rule.weight[size_t(q % ny)];
}

int64_t FemSpace::owner_leaf(std::array<double, 2> x) const {
  const auto cells = hier_->fine_cells();
  std::array<int64_t, 2> c{0, 0};
  std::array<bool, 2> on_lattice{false, false};
  for (int a = 0; a < dim_; ++a) {
    double xi = hier_->to_lattice(a, x[size_t(a)]);
    double n = double(cells[size_t(a)]);
    if (xi < -1e-9 * n - 1e-12 || xi > n * (1.0 + 1e-9) + 1e-12)
      throw std::domain_error("eval: point outside the computational domain");
    xi = std::clamp(xi, 0.0, n);
    c[size_t(a)] = std::min(int64_t(std::floor(xi)), cells[size_t(a)] - 1);
    on_lattice[size_t(a)] = std::abs(xi - std::round(xi)) < 1e-9;
  }
  int32_t li = mesh_->leaf_at(c[0], c[1]);
  if (li >= 0) return li;
  // point on a scatterer face: fall back to an adjacent owner
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < (dim_ == 2 ? 2 : 1); ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (dx && (!on_lattice[0] || c[0] == 0)) continue;
      if (dy && (!on_lattice[1] || c[1] == 0)) continue;
      li = mesh_->leaf_at(c[0] - dx, c[1] - dy);
      if (li >= 0) return li;
    }
  return -1;
}

void element_gradient(int dim, int degree, double hx, double hy,
                      const double* v, double* gx, double* gy) {
  const LobattoRule& rule = lobatto_rule(degree);
  const int n = degree + 1;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int k = 0; k < n; ++k) acc += rule.diff[i][k] * v[k];
      gx[i] = acc / hx;
    }
    return;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ax = 0, ay = 0;
      for (int k = 0; k < n; ++k) {
        ax += rule.diff[i][k] * v[k * n + j];
        ay += rule.diff[j][k] * v[i * n + k];
      }
      gx[i * n + j] = ax / hx;
      gy[i * n + j] = ay / hy;
    }
}

void add_element_flux(int dim, int degree, double hx, double hy,
                      const double* Gx, const double* Gy, double* r) {
  const LobattoRule& rule = lobatto_rule(degree);
  const int n = degree + 1;
  if (dim == 1) {
    for (int q = 0; q < n; ++q) {
      double wg = rule.weight[size_t(q)] * Gx[q];
      for (int qp = 0; qp < n; ++qp) r[qp] += wg * rule.diff[q][qp];
    }
    return;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double wx = rule.weight[size_t(i)] * rule.weight[size_t(j)] * hy * Gx[i * n + j];
      double wy = rule.weight[size_t(i)] * rule.weight[size_t(j)] * hx * Gy[i * n + j];
      for (int k = 0; k < n; ++k) {
        r[k * n + j] += wx * rule.diff[i][k];
        r[i * n + k] += wy * rule.diff[j][k];
      }
    }
}

template <class T>
std::vector<T> project_field(const FemSpace& from, const std::vector<T>& u,
                             const FemSpace& to) {
  if (&from.hier() != &to.hier())
    throw std::invalid_argument("project_field: different hierarchies");
  const int p = to.degree(), dim = to.dim();
  const int ny = dim == 2 ? p + 1 : 1;
  const int npts = to.npts();
  const LobattoRule& rule = lobatto_rule(p);
  const NestedHierarchy& hier = to.hier();
  std::vector<T> num(static_cast<size_t>(to.num_nodes()), T{});
  std::vector<double> den(static_cast<size_t>(to.num_nodes()), 0.0);
  std::vector<T> loc_from(static_cast<size_t>(npts));
  std::vector<T> out(static_cast<size_t>(to.num_nodes()));
  std::vector<std::pair<LatticeBox, int32_t>> pieces;

  for (int64_t li = 0; li < to.num_leaves(); ++li) {
    const LatticeBox& B = to.leaf_box(li);
    pieces.clear();
    int32_t l0 = from.mesh().leaf_at(B.lo[0], B.lo[1]);
    if (from.leaf_box(l0).contains(B)) {
      pieces.push_back({B, l0});
    } else {
      for (int64_t cx = B.lo[0]; cx < B.hi[0]; ++cx)
        for (int64_t cy = B.lo[1]; cy < B.hi[1]; ++cy) {
          int32_t lf = from.mesh().leaf_at(cx, cy);
          const LatticeBox& fb = from.leaf_box(lf);
          if (fb.lo[0] == cx && fb.lo[1] == cy) pieces.push_back({fb, lf});
        }
    }
    for (const auto& [P, lf] : pieces) {
      from.gather(u, lf, loc_from.data());
      const bool from_identity = from.leaf_box(lf) == P;
      const bool to_identity = B == P;
      double meas = double(P.extent(0)) * hier.h_fine();
      if (dim == 2) meas *= double(P.extent(1)) * hier.h_fine();
      // basis values of the target element at the piece's GL points
      double bx[5][5], by[5][5];
      for (int q = 0; q <= p; ++q) {
        double px = double(P.lo[0]) + double(P.extent(0)) * rule.node[size_t(q)];
        double tx = (px - double(B.lo[0])) / double(B.extent(0));
        for (int k = 0; k <= p; ++k)
          bx[k][q] = to_identity ? (k == q ? 1.0 : 0.0) : rule.lagrange(k, tx);
        if (dim == 2) {
          double py =
              double(P.lo[1]) + double(P.extent(1)) * rule.node[size_t(q)];
          double ty = (py - double(B.lo[1])) / double(B.extent(1));
          for (int k = 0; k <= p; ++k)
            by[k][q] = to_identity ? (k == q ? 1.0 : 0.0) : rule.lagrange(k, ty);
        }
      }
      for (int qx = 0; qx <= p; ++qx) {
        for (int qy = 0; qy < ny; ++qy) {
          int q = qx * ny + qy;
          double w = rule.weight[size_t(qx)] * meas;
          if (dim == 2) w *= rule.weight[size_t(qy)];
          T uval;
          if (from_identity) {
            uval = loc_from[size_t(q)];
          } else {
            std::array<double, 2> x;
            x[0] = hier.to_physical(0, double(P.lo[0]) +
                                           double(P.extent(0)) *
                                               rule.node[size_t(qx)]);
            x[1] = dim == 2 ? hier.to_physical(1, double(P.lo[1]) +
                                                      double(P.extent(1)) *
                                                          rule.node[size_t(qy)])
                            : 0.0;
            uval = from.eval_local(lf, loc_from.data(), x);
          }
          for (int kx = 0; kx <= p; ++kx) {
            double lx = bx[kx][qx];
            if (lx == 0.0) continue;
            for (int ky = 0; ky < ny; ++ky) {
              double l = dim == 2 ? lx * by[ky][qy] : lx;
              if (l == 0.0) continue;
              int slot = kx * ny + ky;
              if (!to.slot_direct(li, slot)) continue;
              int32_t n = to.slot_node(li, slot);
              num[size_t(n)] += (w * l) * uval;
              den[size_t(n)] += w * l;
            }
          }
        }
      }
    }
  }
  for (int64_t n = 0; n < to.num_nodes(); ++n)
    out[size_t(n)] = num[size_t(n)] / den[size_t(n)];
  return out;
}

template std::vector<double> project_field<double>(const FemSpace&,
                                                   const std::vector<double>&,
                                                   const FemSpace&);
template std::vector<Complex> project_field<Complex>(const FemSpace&,
                                                     const std::vector<Complex>&,
                                                     const FemSpace&);

std::vector<std::vector<double>> project_element_field(
    const FemSpace& from, const std::vector<std::vector<double>>& s,
    const FemSpace& to) {
  if (&from.hier() != &to.hier())
    throw std::invalid_argument("project_element_field: different hierarchies");
  const int p = to.degree(), dim = to.dim();
  const int ny = dim == 2 ? p + 1 : 1;
  const int npts = to.npts();
  const LobattoRule& rule = lobatto_rule(p);
  const NestedHierarchy& hier = to.hier();
  std::vector<std::vector<double>> out(static_cast<size_t>(to.num_leaves()));
  std::vector<std::pair<LatticeBox, int32_t>> pieces;

  for (int64_t li = 0; li < to.num_leaves(); ++li) {
    const LatticeBox& B = to.leaf_box(li);
    if (!hier.in_pml_box(B)) continue;
    auto& sv = out[size_t(li)];
    sv.assign(size_t(dim * npts), 0.0);
    pieces.clear();
    int32_t l0 = from.mesh().leaf_at(B.lo[0], B.lo[1]);
    if (from.leaf_box(l0).contains(B)) {
      pieces.push_back({B, l0});
    } else {
      for (int64_t cx = B.lo[0]; cx < B.hi[0]; ++cx)
        for (int64_t cy = B.lo[1]; cy < B.hi[1]; ++cy) {
          int32_t lf = from.mesh().leaf_at(cx, cy);
          const LatticeBox& fb = from.leaf_box(lf);
          if (fb.lo[0] == cx && fb.lo[1] == cy) pieces.push_back({fb, lf});
        }
    }
    for (const auto& [P, lf] : pieces) {
      const std::vector<double>& sfrom = s[size_t(lf)];
      if (sfrom.empty()) continue;  // source element outside the layer
      const bool from_identity = from.leaf_box(lf) == P;
      const bool to_identity = B == P;
      double meas = double(P.extent(0)) * hier.h_fine();
      if (dim == 2) meas *= double(P.extent(1)) * hier.h_fine();
      double bx[5][5], by[5][5];
      for (int q = 0; q <= p; ++q) {
        double px = double(P.lo[0]) + double(P.extent(0)) * rule.node[size_t(q)];
        double tx = (px - double(B.lo[0])) / double(B.extent(0));
        for (int k = 0; k <= p; ++k)
          bx[k][q] = to_identity ? (k == q ? 1.0 : 0.0) : rule.lagrange(k, tx);
        if (dim == 2) {
          double py =
              double(P.lo[1]) + double(P.extent(1)) * rule.node[size_t(q)];
          double ty = (py - double(B.lo[1])) / double(B.extent(1));
          for (int k = 0; k <= p; ++k)
            by[k][q] = to_identity ? (k == q ? 1.0 : 0.0) : rule.lagrange(k, ty);
        }
      }
      for (int c = 0; c < dim; ++c) {
        const double* sc = sfrom.data() + c * npts;
        for (int qx = 0; qx <= p; ++qx)
          for (int qy = 0; qy < ny; ++qy) {
            double w = rule.weight[size_t(qx)] * meas;
            if (dim == 2) w *= rule.weight[size_t(qy)];
            double uval;
            if (from_identity) {
              uval = sc[qx * ny + qy];
            } else {
              std::array<double, 2> x;
              x[0] = hier.to_physical(0, double(P.lo[0]) +
                                             double(P.extent(0)) *
                                                 rule.node[size_t(qx)]);
              x[1] = dim == 2
                         ? hier.to_physical(1, double(P.lo[1]) +
                                                   double(P.extent(1)) *
                                                       rule.node[size_t(qy)])
                         : 0.0;
              uval = from.eval_local(lf, sc, x);
            }
            for (int kx = 0; kx <= p; ++kx)
              for (int ky = 0; ky < ny; ++ky) {
                double l = dim == 2 ? bx[kx][qx] * by[ky][qy] : bx[kx][qx];
                if (l != 0.0) sv[size_t(c * npts + kx * ny + ky)] += w * l * uval;
              }
          }
      }
    }
    for (int c = 0; c < dim; ++c)
      for (int kx = 0; kx <= p; ++kx)
        for (int ky = 0; ky < ny; ++ky) {
          double sig = rule.weight[size_t(kx)];
          if (dim == 2) sig *= rule.weight[size_t(ky)];
          sig *= to.leaf_measure(li);
          sv[size_t(c * npts + kx * ny + ky)] /= sig;
        }
  }
  return out;
}

ElementProjection project_element(const FemSpace& space, const NodalField& u,
                                  const ElementId& parent) {
  const NestedHierarchy& hier = space.hier();
  const int p = space.degree(), dim = space.dim();
  const int ny = dim == 2 ? p + 1 : 1;
  const int npts = space.npts();
  const LobattoRule& rule = lobatto_rule(p);
  // The coarse values are the interpolation of the child polynomials at
  // E's own GL points, so fields already representable on E come back
  // unchanged and eta vanishes for them identically.
  const LatticeBox pb = hier.box(parent);

  ElementProjection res;
  res.coarse.assign(size_t(npts), 0.0);
  std::vector<double> loc(static_cast<size_t>(npts));

  auto children = hier.subelements(parent);
  for (int kx = 0; kx <= p; ++kx) {
    for (int ky = 0; ky < ny; ++ky) {
      double lx = double(pb.lo[0]) + double(pb.extent(0)) * rule.node[size_t(kx)];
      double ly = dim == 2 ? double(pb.lo[1]) +
                                 double(pb.extent(1)) * rule.node[size_t(ky)]
                           : 0.0;
      // child containing the coarse point (clamped half-open lookup)
      std::array<int64_t, 2> cell{
          std::min(int64_t(lx), pb.hi[0] - 1),
          dim == 2 ? std::min(int64_t(ly), pb.hi[1] - 1) : pb.lo[1]};
      int32_t li = space.mesh().leaf_at(cell[0], cell[1]);
      if (li < 0)
        throw std::invalid_argument("project_element: children are not current leaves");
      const LatticeBox& cb = space.leaf_box(li);
      if (!pb.contains(cb))
        throw std::invalid_argument("project_element: children are not current leaves");
      space.gather(u, li, loc.data());
      std::array<double, 2> x{hier.to_physical(0, lx),
                              dim == 2 ? hier.to_physical(1, ly) : 0.0};
      res.coarse[size_t(kx * ny + ky)] = space.eval_local(li, loc.data(), x);
    }
  }
  // nodal projection error over the children's GL points
  for (const ElementId& c : children) {
    if (hier.element_in_scatterer(c)) continue;
    LatticeBox cb = hier.box(c);
    int32_t li = space.mesh().leaf_at(cb.lo[0], cb.lo[1]);
    space.gather(u, li, loc.data());
    double bx[5][5], by[5][5];
    for (int q = 0; q <= p; ++q) {
      double px = double(cb.lo[0]) + double(cb.extent(0)) * rule.node[size_t(q)];
      double tx = (px - double(pb.lo[0])) / double(pb.extent(0));
      for (int k = 0; k <= p; ++k) bx[k][q] = rule.lagrange(k, tx);
      if (dim == 2) {
        double py = double(cb.lo[1]) + double(cb.extent(1)) * rule.node[size_t(q)];
        double ty = (py - double(pb.lo[1])) / double(pb.extent(1));
        for (int k = 0; k <= p; ++k) by[k][q] = rule.lagrange(k, ty);
      }
    }
    for (int qx = 0; qx <= p; ++qx)
      for (int qy = 0; qy < ny; ++qy) {
        double v = 0;
        for (int kx = 0; kx <= p; ++kx)
          for (int ky = 0; ky < ny; ++ky) {
            double l = dim == 2 ? bx[kx][qx] * by[ky][qy] : bx[kx][qx];
            v += l * res.coarse[size_t(kx * ny + ky)];
          }
        res.eta = std::max(res.eta, std::abs(loc[size_t(qx * ny + qy)] - v));
      }
  }
  return res;
}

NodalField discrete_source(const FemSpace& space, double t, double dt,
                           const ProblemSpec& spec) {
  NodalField f(static_cast<size_t>(space.num_nodes()), 0.0);
  if (spec.source == SourceKind::external_point) {
    double amp = spec.omega * psi(spec.omega * t);
    if (amp == 0.0) return f;
    for (int64_t n = 0; n < space.num_nodes(); ++n)
      f[size_t(n)] = amp * point_source_F(space.node_pos(n), spec);
    return f;
  }
  const bool has_contrast = spec.materials != MaterialCase::homogeneous;
  NodalField b(static_cast<size_t>(space.num_nodes()), 0.0);
  if (has_contrast) {
    const int npts = space.npts();
    std::vector<double> Gx(static_cast<size_t>(npts)), Gy(static_cast<size_t>(npts)), r(static_cast<size_t>(npts));
    const double slab_lo = spec.c0 * (t - spec.xi0() / spec.omega);
    const double slab_hi = spec.c0 * (t + spec.xi0() / spec.omega);
    for (int64_t li = 0; li < space.num_leaves(); ++li) {
      const LatticeBox& bx = space.leaf_box(li);
      // skip elements fully outside the inhomogeneity box
      bool outside = false;
      double rx_min = 0, rx_max = 0;
      for (int a = 0; a < space.dim(); ++a) {
        double lo = space.hier().to_physical(a, double(bx.lo[size_t(a)]));
        double hi = space.hier().to_physical(a, double(bx.hi[size_t(a)]));
        if (lo >= 0.5 || hi <= -0.5) outside = true;
        double d = spec.direction[size_t(a)];
        rx_min += std::min(d * lo, d * hi);
        rx_max += std::max(d * lo, d * hi);
      }
      if (outside || rx_max < slab_lo || rx_min > slab_hi) continue;
      bool any = false;
      for (int q = 0; q < npts; ++q) {
        auto x = space.local_point(li, q);
        double da = spec.alpha(x) - spec.alpha0;
        if (da != 0.0) any = true;
        auto g = incoming_wavelet_gradient(x, t, spec);
        Gx[size_t(q)] = da * g[0];
        Gy[size_t(q)] = da * g[1];
      }
      if (!any) continue;
      std::fill(r.begin(), r.end(), 0.0);
      auto sz = space.leaf_size(li);
      add_element_flux(space.dim(), space.degree(), sz[0], sz[1], Gx.data(),
                       Gy.data(), r.data());
      space.scatter_add(li, r.data(), b);
    }
  }
  const double inv_dt2 = 1.0 / (dt * dt);
  for (int64_t n = 0; n < space.num_nodes(); ++n) {
    auto x = space.node_pos(n);
    double beta = spec.beta(x);
    double term1 = 0.0;
    if (beta != spec.beta0) {
      double d2 = (incoming_wavelet(x, t + dt, spec) -
                   2.0 * incoming_wavelet(x, t, spec) +
                   incoming_wavelet(x, t - dt, spec)) *
                  inv_dt2;
      term1 = (beta - spec.beta0) / beta * d2;
    }
    f[size_t(n)] = -term1 - b[size_t(n)] / (beta * space.sigma()[size_t(n)]);
  }
  return f;
}

}  // namespace wavescat
