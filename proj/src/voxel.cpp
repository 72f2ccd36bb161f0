#include "toch/voxel.hpp"

#include "toch/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace toch {

std::size_t OccupancyGrid::count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

OccupancyGrid grid_covering(const Aabb& box, double voxel_edge) {
  if (!(voxel_edge > 0.0)) fail(ErrorCode::InvalidArgument, "voxel edge must be positive");
  OccupancyGrid grid;
  grid.origin = box.min;
  grid.edge = voxel_edge;
  for (int k = 0; k < 3; ++k) {
    const double extent = std::max(0.0, box.max[k] - box.min[k]);
    // Tolerate round-off so an exactly divisible extent does not gain a layer.
    grid.dims[k] = std::max(1, static_cast<int>(std::ceil(extent / voxel_edge - 1e-9)));
  }
  grid.occupied.assign(static_cast<std::size_t>(grid.dims[0]) * grid.dims[1] * grid.dims[2], 0);
  return grid;
}

OccupancyGrid voxelize_solid(const Bvh& bvh, double voxel_edge, const Vec3& grid_origin,
                             const std::array<int, 3>& dims) {
  if (!(voxel_edge > 0.0)) fail(ErrorCode::InvalidArgument, "voxel edge must be positive");
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
    fail(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  }
  OccupancyGrid grid;
  grid.origin = grid_origin;
  grid.edge = voxel_edge;
  grid.dims = dims;
  grid.occupied.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0);
  if (!grid.box().contains(bvh.mesh().bounds())) {
    fail(ErrorCode::GridTooSmall, "occupancy grid does not cover the mesh bounding box");
  }
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        grid.occupied[grid.index(i, j, k)] = bvh.contains(grid.center(i, j, k)) ? 1 : 0;
      }
    }
  }
  return grid;
}

}  // namespace toch
