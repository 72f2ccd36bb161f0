#pragma once

#include "toch/mesh.hpp"

#include <cstdint>
#include <vector>

namespace toch {

/// Points sampled on an object surface with the normals of their faces.
struct ObjectPointSet {
  MatX3 points;
  MatX3 normals;
  std::vector<int> faces;  // source face per point; empty when loaded from file
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(points.rows()); }
  Vec3 point(int i) const { return points.row(i).transpose(); }
  Vec3 normal(int i) const { return normals.row(i).transpose(); }
  bool same_points(const ObjectPointSet& other) const {
    return seed == other.seed && points == other.points && normals == other.normals;
  }
};

/// Area-weighted uniform samples. Sample i draws three uniforms from
/// CounterRng(seed): one selects a face by inverting the cumulative area table,
/// two place the point with the square-root barycentric map.
ObjectPointSet sample_surface(const TriMesh& mesh, int n, std::uint64_t seed);

}  // namespace toch
