#pragma once

#include <string>

#include "wavescat/driver.hpp"

namespace wavescat {

// CSV of node coordinates and complex values, 17 significant digits
void write_field_csv(const std::string& path, const UniformField& f);
UniformField read_field_csv(const std::string& path);

// nodal CSV for an adapted-mesh field
void write_nodal_csv(const std::string& path, const FemSpace& space,
                     const std::vector<Complex>& u);

// row-major raster of the field sampled on the lattice corners, one-line
// header "# nx ny x0 y0 dx dy"
void write_raster(const std::string& path, const UniformField& f);

// raster of the finest covering-parent level at the lattice cell centres,
// 0 where no parent covers the point
void write_level_map(const std::string& path, const NestedHierarchy& hier,
                     const std::vector<ElementId>& parents);

// leaf list: level, lattice box, physical box
void write_mesh_csv(const std::string& path, const AdaptedMesh& mesh);

}  // namespace wavescat
