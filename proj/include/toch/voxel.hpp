#pragma once

#include "toch/bvh.hpp"

#include <array>
#include <vector>

namespace toch {

struct OccupancyGrid {
  Vec3 origin = Vec3::Zero();  // corner of voxel (0, 0, 0)
  double edge = 0.0;
  std::array<int, 3> dims{0, 0, 0};
  std::vector<std::uint8_t> occupied;  // x fastest

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }
  Vec3 center(int i, int j, int k) const {
    return origin + edge * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  bool at(int i, int j, int k) const { return occupied[index(i, j, k)] != 0; }
  std::size_t count() const;
  double voxel_volume() const { return edge * edge * edge; }
  double occupied_volume() const { return static_cast<double>(count()) * voxel_volume(); }
  Aabb box() const {
    return {origin, origin + edge * Vec3(dims[0], dims[1], dims[2])};
  }
};

/// Solid voxelization: a voxel is occupied iff its center is inside the mesh.
/// Throws GridTooSmall when the grid box does not contain the mesh bounds.
OccupancyGrid voxelize_solid(const Bvh& bvh, double voxel_edge, const Vec3& grid_origin,
                             const std::array<int, 3>& dims);

/// Grid with the given edge whose box covers `box` (origin at box.min).
OccupancyGrid grid_covering(const Aabb& box, double voxel_edge);

}  // namespace toch
