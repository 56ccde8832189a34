#include "wavescat/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace wavescat {

namespace {
constexpr double kLatticeEps = 1e-9;
}

double UniformField::node_coord(int axis, int64_t i) const {
  const LobattoRule& rule = lobatto_rule(degree);
  int64_t c = i / degree;
  int r = int(i % degree);
  if (i == cells[size_t(axis)] * degree) {
    c = cells[size_t(axis)];
    r = 0;
  }
  return origin[size_t(axis)] + (double(c) + rule.node[size_t(r)]) * h;
}

Complex UniformField::eval(std::array<double, 2> x) const {
  const LobattoRule& rule = lobatto_rule(degree);
  const int p = degree;
  double lx[5], ly[5];
  int64_t cx = 0, cy = 0;
  for (int a = 0; a < dim; ++a) {
    double xi = (x[size_t(a)] - origin[size_t(a)]) / h;
    int64_t c = std::clamp<int64_t>(int64_t(std::floor(xi)), 0,
                                    cells[size_t(a)] - 1);
    double t = xi - double(c);
    for (int k = 0; k <= p; ++k)
      (a == 0 ? lx : ly)[k] = rule.lagrange(k, t);
    (a == 0 ? cx : cy) = c;
  }
  Complex acc{};
  const int ny = dim == 2 ? p + 1 : 1;
  for (int qx = 0; qx <= p; ++qx)
    for (int qy = 0; qy < ny; ++qy) {
      double l = dim == 2 ? lx[qx] * ly[qy] : lx[qx];
      acc += l * values[size_t(index(cx * p + qx, dim == 2 ? cy * p + qy : 0))];
    }
  return acc;
}

UniformField make_fine_field(const NestedHierarchy& hier, int degree) {
  UniformField f;
  f.dim = hier.dim();
  f.degree = degree;
  f.h = hier.h_fine();
  f.origin = {hier.origin(0), hier.dim() == 2 ? hier.origin(1) : 0.0};
  f.cells = {hier.fine_cells()[0], hier.dim() == 2 ? hier.fine_cells()[1] : 1};
  f.allocate();
  return f;
}

bool chi_element(const NestedHierarchy& hier, const ElementId& e,
                 std::array<double, 2> x) {
  LatticeBox b = hier.box(e);
  for (int a = 0; a < hier.dim(); ++a) {
    double xi = hier.to_lattice(a, x[size_t(a)]);
    double lo = double(b.lo[size_t(a)]), hi = double(b.hi[size_t(a)]);
    bool in = xi >= lo - kLatticeEps && xi < hi - kLatticeEps;
    bool at_top = b.hi[size_t(a)] == hier.fine_cells()[size_t(a)] &&
                  std::abs(xi - hi) <= kLatticeEps;
    if (!(in || at_top)) return false;
  }
  return true;
}

namespace {

// chi-style owner cell of a fine grid node; falls back across scatterer
// faces so boundary nodes of the fluid region stay claimed
bool owner_cell(const NestedHierarchy& hier, int degree, int64_t ix, int64_t iy,
                int64_t& cx, int64_t& cy) {
  const auto cells = hier.fine_cells();
  cx = std::min(ix / degree, cells[0] - 1);
  cy = hier.dim() == 2 ? std::min(iy / degree, cells[1] - 1) : 0;
  if (!hier.has_scatterer() || !hier.cell_in_scatterer(cx, cy)) return true;
  bool on_x = ix % degree == 0, on_y = hier.dim() == 2 && iy % degree == 0;
  if (on_x && cx > 0 && !hier.cell_in_scatterer(cx - 1, cy)) {
    --cx;
    return true;
  }
  if (on_y && cy > 0 && !hier.cell_in_scatterer(cx, cy - 1)) {
    --cy;
    return true;
  }
  if (on_x && on_y && cx > 0 && cy > 0 &&
      !hier.cell_in_scatterer(cx - 1, cy - 1)) {
    --cx;
    --cy;
    return true;
  }
  return false;
}

}  // namespace

template <class T>
std::vector<T> interpolate_to_fine(const FemSpace& space,
                                   const std::vector<T>& u) {
  const NestedHierarchy& hier = space.hier();
  const int p = space.degree();
  UniformField layout = make_fine_field(hier, p);
  std::vector<T> out(static_cast<size_t>(layout.num_nodes()), T{});
  const LobattoRule& rule = lobatto_rule(p);
  std::vector<T> loc(static_cast<size_t>(space.npts()));
  const int ny = space.dim() == 2 ? p + 1 : 1;
  for (int64_t li = 0; li < space.num_leaves(); ++li) {
    const LatticeBox& b = space.leaf_box(li);
    space.gather(u, li, loc.data());
    // per-axis evaluation tables over the covered grid nodes
    std::array<std::vector<double>, 2> tab;
    for (int a = 0; a < space.dim(); ++a) {
      int64_t n = b.extent(a) * p + 1;
      tab[size_t(a)].resize(size_t(n) * size_t(p + 1));
      for (int64_t f = 0; f < n; ++f) {
        int64_t gi = b.lo[size_t(a)] * p + f;
        int64_t c = gi / p;
        int r = int(gi % p);
        if (f == n - 1) {
          c = b.hi[size_t(a)];
          r = 0;
        }
        double t = (double(c - b.lo[size_t(a)]) + rule.node[size_t(r)]) /
                   double(b.extent(a));
        for (int k = 0; k <= p; ++k)
          tab[size_t(a)][size_t(f) * size_t(p + 1) + size_t(k)] =
              rule.lagrange(k, t);
      }
    }
    int64_t nx = b.extent(0) * p + 1;
    int64_t nyg = space.dim() == 2 ? b.extent(1) * p + 1 : 1;
    for (int64_t fx = 0; fx < nx; ++fx) {
      int64_t gx = b.lo[0] * p + fx;
      for (int64_t fy = 0; fy < nyg; ++fy) {
        int64_t gy = space.dim() == 2 ? b.lo[1] * p + fy : 0;
        int64_t cx, cy;
        if (!owner_cell(hier, p, gx, gy, cx, cy)) continue;
        if (cx < b.lo[0] || cx >= b.hi[0]) continue;
        if (space.dim() == 2 && (cy < b.lo[1] || cy >= b.hi[1])) continue;
        T acc{};
        for (int kx = 0; kx <= p; ++kx) {
          double wx = tab[0][size_t(fx) * size_t(p + 1) + size_t(kx)];
          if (space.dim() == 2) {
            for (int ky = 0; ky <= p; ++ky)
              acc += wx * tab[1][size_t(fy) * size_t(p + 1) + size_t(ky)] *
                     loc[size_t(kx * ny + ky)];
          } else {
            acc += wx * loc[size_t(kx)];
          }
        }
        out[size_t(layout.index(gx, gy))] = acc;
      }
    }
  }
  return out;
}

template std::vector<double> interpolate_to_fine<double>(
    const FemSpace&, const std::vector<double>&);
template std::vector<Complex> interpolate_to_fine<Complex>(
    const FemSpace&, const std::vector<Complex>&);

std::vector<int32_t> grid_node_map(const FemSpace& space) {
  const int p = space.degree();
  UniformField layout = make_fine_field(space.hier(), p);
  const LobattoRule& rule = lobatto_rule(p);
  std::vector<int32_t> map(static_cast<size_t>(layout.num_nodes()), -1);
  const int ny = space.dim() == 2 ? p + 1 : 1;
  for (int64_t li = 0; li < space.num_leaves(); ++li) {
    const LatticeBox& b = space.leaf_box(li);
    for (int qx = 0; qx <= p; ++qx)
      for (int qy = 0; qy < ny; ++qy) {
        if (!space.slot_direct(li, qx * ny + qy)) continue;
        int64_t gi[2] = {0, 0};
        bool ok = true;
        for (int a = 0; a < space.dim(); ++a) {
          int q = a == 0 ? qx : qy;
          double v = double(b.lo[size_t(a)]) +
                     double(b.extent(a)) * rule.node[size_t(q)];
          int64_t c = int64_t(std::floor(v + kLatticeEps));
          double frac = v - double(c);
          int r = -1;
          for (int k = 0; k < p; ++k)
            if (std::abs(frac - rule.node[size_t(k)]) < kLatticeEps) r = k;
          if (std::abs(frac - 1.0) < kLatticeEps) {
            ++c;
            r = 0;
          }
          if (r < 0) {
            ok = false;
            break;
          }
          gi[a] = c * p + r;
        }
        if (ok)
          map[size_t(layout.index(gi[0], gi[1]))] =
              space.slot_node(li, qx * ny + qy);
      }
  }
  return map;
}

FourierAccumulator::FourierAccumulator(const NestedHierarchy& hier, int degree,
                                       const AdaptedMesh& initial_mesh)
    : degree_(degree), U_(make_fine_field(hier, degree)) {
  dU_.assign(initial_mesh.leaves.size(), {});
}

void FourierAccumulator::update_increments(const FemSpace& space,
                                           const NodalField& u, double t,
                                           double omega, double dt) {
  if (int64_t(dU_.size()) != space.num_leaves())
    throw std::logic_error("fourier: increments misaligned with mesh");
  const Complex phase =
      dt * std::exp(Complex(0.0, omega * t));
  const int npts = space.npts();
  std::vector<double> loc(static_cast<size_t>(npts));
  for (int64_t li = 0; li < space.num_leaves(); ++li) {
    space.gather(u, li, loc.data());
    auto& d = dU_[size_t(li)];
    if (d.empty()) d.assign(size_t(npts), Complex{});
    for (int q = 0; q < npts; ++q) d[size_t(q)] += phase * loc[size_t(q)];
  }
}

void FourierAccumulator::deposit(const FemSpace& old_space, int64_t leaf) {
  const auto& d = dU_[size_t(leaf)];
  if (d.empty()) return;
  const NestedHierarchy& hier = old_space.hier();
  const int p = degree_;
  const LobattoRule& rule = lobatto_rule(p);
  const LatticeBox& b = old_space.leaf_box(leaf);
  const int ny = old_space.dim() == 2 ? p + 1 : 1;
  std::array<std::vector<double>, 2> tab;
  for (int a = 0; a < old_space.dim(); ++a) {
    int64_t n = b.extent(a) * p + 1;
    tab[size_t(a)].resize(size_t(n) * size_t(p + 1));
    for (int64_t f = 0; f < n; ++f) {
      int64_t gi = b.lo[size_t(a)] * p + f;
      int64_t c = gi / p;
      int r = int(gi % p);
      if (f == n - 1) {
        c = b.hi[size_t(a)];
        r = 0;
      }
      double t = (double(c - b.lo[size_t(a)]) + rule.node[size_t(r)]) /
                 double(b.extent(a));
      for (int k = 0; k <= p; ++k)
        tab[size_t(a)][size_t(f) * size_t(p + 1) + size_t(k)] =
            rule.lagrange(k, t);
    }
  }
  int64_t nx = b.extent(0) * p + 1;
  int64_t nyg = old_space.dim() == 2 ? b.extent(1) * p + 1 : 1;
  for (int64_t fx = 0; fx < nx; ++fx) {
    int64_t gx = b.lo[0] * p + fx;
    for (int64_t fy = 0; fy < nyg; ++fy) {
      int64_t gy = old_space.dim() == 2 ? b.lo[1] * p + fy : 0;
      int64_t cx, cy;
      if (!owner_cell(hier, p, gx, gy, cx, cy)) continue;
      if (cx < b.lo[0] || cx >= b.hi[0]) continue;
      if (old_space.dim() == 2 && (cy < b.lo[1] || cy >= b.hi[1])) continue;
      Complex acc{};
      for (int kx = 0; kx <= p; ++kx) {
        double wx = tab[0][size_t(fx) * size_t(p + 1) + size_t(kx)];
        if (old_space.dim() == 2) {
          for (int ky = 0; ky <= p; ++ky)
            acc += wx * tab[1][size_t(fy) * size_t(p + 1) + size_t(ky)] *
                   d[size_t(kx * ny + ky)];
        } else {
          acc += wx * d[size_t(kx)];
        }
      }
      U_.values[size_t(U_.index(gx, gy))] += acc;
    }
  }
}

void FourierAccumulator::update_ft(const FemSpace& old_space,
                                   const AdaptedMesh* new_mesh) {
  const auto& leaves = old_space.mesh().leaves;
  if (int64_t(dU_.size()) != int64_t(leaves.size()))
    throw std::logic_error("fourier: increments misaligned with mesh");
  for (int64_t li = 0; li < int64_t(leaves.size()); ++li) {
    if (new_mesh && new_mesh->contains(leaves[size_t(li)])) continue;
    deposit(old_space, li);
  }
}

void FourierAccumulator::initialise_new_increments(const AdaptedMesh& old_mesh,
                                                   const AdaptedMesh& new_mesh) {
  std::unordered_map<ElementId, int64_t, ElementIdHash> old_index;
  old_index.reserve(old_mesh.leaves.size());
  for (int64_t li = 0; li < int64_t(old_mesh.leaves.size()); ++li)
    old_index.emplace(old_mesh.leaves[size_t(li)], li);
  std::vector<std::vector<Complex>> next(new_mesh.leaves.size());
  for (int64_t li = 0; li < int64_t(new_mesh.leaves.size()); ++li) {
    auto it = old_index.find(new_mesh.leaves[size_t(li)]);
    if (it != old_index.end()) next[size_t(li)] = std::move(dU_[size_t(it->second)]);
  }
  dU_.swap(next);
}

}  // namespace wavescat
