#include "wavescat/field_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace wavescat {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

}  // namespace

void write_field_csv(const std::string& path, const UniformField& f) {
  FilePtr out = open_or_throw(path, "w");
  std::fprintf(out.get(), "# dim %d degree %d h %.17g x0 %.17g y0 %.17g nx %" PRId64
                          " ny %" PRId64 "\n",
               f.dim, f.degree, f.h, f.origin[0], f.origin[1], f.cells[0],
               f.cells[1]);
  std::fprintf(out.get(), "x,y,re,im\n");
  for (int64_t ix = 0; ix < f.nodes_along(0); ++ix)
    for (int64_t iy = 0; iy < f.nodes_along(1); ++iy) {
      Complex v = f.values[size_t(f.index(ix, iy))];
      std::fprintf(out.get(), "%.17g,%.17g,%.17g,%.17g\n", f.node_coord(0, ix),
                   f.dim == 2 ? f.node_coord(1, iy) : 0.0, v.real(), v.imag());
    }
}

UniformField read_field_csv(const std::string& path) {
  FilePtr in = open_or_throw(path, "r");
  UniformField f;
  if (std::fscanf(in.get(),
                  "# dim %d degree %d h %lg x0 %lg y0 %lg nx %" SCNd64
                  " ny %" SCNd64 "\n",
                  &f.dim, &f.degree, &f.h, &f.origin[0], &f.origin[1],
                  &f.cells[0], &f.cells[1]) != 7)
    throw std::runtime_error("read_field_csv: bad header in " + path);
  char line[256];
  if (!std::fgets(line, sizeof line, in.get()))
    throw std::runtime_error("read_field_csv: missing column header");
  f.allocate();
  for (int64_t ix = 0; ix < f.nodes_along(0); ++ix)
    for (int64_t iy = 0; iy < f.nodes_along(1); ++iy) {
      double x, y, re, im;
      if (std::fscanf(in.get(), "%lg,%lg,%lg,%lg\n", &x, &y, &re, &im) != 4)
        throw std::runtime_error("read_field_csv: short file " + path);
      f.values[size_t(f.index(ix, iy))] = Complex(re, im);
    }
  return f;
}

void write_nodal_csv(const std::string& path, const FemSpace& space,
                     const std::vector<Complex>& u) {
  FilePtr out = open_or_throw(path, "w");
  std::fprintf(out.get(), "x,y,re,im\n");
  for (int64_t n = 0; n < space.num_nodes(); ++n) {
    auto x = space.node_pos(n);
    std::fprintf(out.get(), "%.17g,%.17g,%.17g,%.17g\n", x[0], x[1],
                 u[size_t(n)].real(), u[size_t(n)].imag());
  }
}

void write_raster(const std::string& path, const UniformField& f) {
  FilePtr out = open_or_throw(path, "w");
  const int64_t nx = f.cells[0] + 1;
  const int64_t ny = f.dim == 2 ? f.cells[1] + 1 : 1;
  std::fprintf(out.get(), "# %" PRId64 " %" PRId64 " %.17g %.17g %.17g %.17g\n",
               nx, ny, f.origin[0], f.dim == 2 ? f.origin[1] : 0.0, f.h,
               f.dim == 2 ? f.h : 0.0);
  for (int64_t iy = 0; iy < ny; ++iy) {
    for (int64_t ix = 0; ix < nx; ++ix) {
      // lattice corners are grid nodes for every degree
      Complex v = f.values[size_t(
          f.index(ix * f.degree, f.dim == 2 ? iy * f.degree : 0))];
      std::fprintf(out.get(), ix + 1 == nx ? "%.17g %.17g\n" : "%.17g %.17g ",
                   v.real(), v.imag());
    }
  }
}

void write_level_map(const std::string& path, const NestedHierarchy& hier,
                     const std::vector<ElementId>& parents) {
  FilePtr out = open_or_throw(path, "w");
  const auto cells = hier.fine_cells();
  const int64_t nx = cells[0];
  const int64_t ny = hier.dim() == 2 ? cells[1] : 1;
  std::fprintf(out.get(), "# %" PRId64 " %" PRId64 " %.17g %.17g %.17g %.17g\n",
               nx, ny, hier.to_physical(0, 0.5),
               hier.dim() == 2 ? hier.to_physical(1, 0.5) : 0.0, hier.h_fine(),
               hier.dim() == 2 ? hier.h_fine() : 0.0);
  std::unordered_map<ElementId, bool, ElementIdHash> pset;
  for (const ElementId& e : parents) pset.emplace(e, true);
  for (int64_t iy = 0; iy < ny; ++iy) {
    for (int64_t ix = 0; ix < nx; ++ix) {
      int lvl = 0;
      for (int k = hier.levels() - 1; k >= 1; --k) {
        ElementId e = hier.element_at(k, {ix, iy});
        if (pset.count(e)) {
          lvl = k;
          break;
        }
      }
      std::fprintf(out.get(), ix + 1 == nx ? "%d\n" : "%d ", lvl);
    }
  }
}

void write_mesh_csv(const std::string& path, const AdaptedMesh& mesh) {
  FilePtr out = open_or_throw(path, "w");
  const NestedHierarchy& hier = *mesh.hier;
  std::fprintf(out.get(), "level,ix0,iy0,ix1,iy1,x0,y0,x1,y1\n");
  for (const ElementId& e : mesh.leaves) {
    LatticeBox b = hier.box(e);
    std::fprintf(out.get(),
                 "%d,%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64
                 ",%.17g,%.17g,%.17g,%.17g\n",
                 e.level, b.lo[0], b.lo[1], b.hi[0], b.hi[1],
                 hier.to_physical(0, double(b.lo[0])),
                 hier.dim() == 2 ? hier.to_physical(1, double(b.lo[1])) : 0.0,
                 hier.to_physical(0, double(b.hi[0])),
                 hier.dim() == 2 ? hier.to_physical(1, double(b.hi[1])) : 0.0);
  }
}

}  // namespace wavescat
