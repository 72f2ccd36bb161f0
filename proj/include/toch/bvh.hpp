#pragma once

#include "toch/mesh.hpp"

#include <optional>
#include <vector>

namespace toch {

struct RayHit {
  SurfacePoint point;
  double t = 0.0;
};

/// Bounding-volume hierarchy over the faces of one mesh. Immutable after
/// construction; all queries are const and safe to call concurrently.
class Bvh {
 public:
  /// Rays whose direction is this close to parallel with a face are misses.
  static constexpr double kGrazingCosine = 1e-9;
  static constexpr double kUnitTolerance = 1e-9;

  explicit Bvh(TriMesh mesh, int leaf_size = 4);

  const TriMesh& mesh() const { return mesh_; }
  const Aabb& bounds() const { return nodes_.front().box; }

  /// Nearest hit with t >= 0. Equal t resolves to the lowest face index.
  /// Throws InvalidDirection when |dir| differs from 1 by more than 1e-9.
  std::optional<RayHit> intersect(const Vec3& origin, const Vec3& dir) const;

  /// Generalized winding number (sum of signed solid angles / 4 pi).
  double winding_number(const Vec3& p) const;
  bool contains(const Vec3& p) const { return winding_number(p) > 0.5; }

  /// Globally nearest surface point; ties go to the lowest face index.
  SurfacePoint closest_point(const Vec3& p) const;

  /// Indices of the faces in leaf order; each face appears exactly once.
  const std::vector<int>& face_order() const { return order_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Aabb box;
    int left = -1;  // internal: child indices; leaf: left == -1
    int right = -1;
    int begin = 0;  // leaf range into order_
    int end = 0;
  };

  int build(int begin, int end, const std::vector<Vec3>& centroids, int leaf_size);
  Aabb face_box(int f) const;

  TriMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
};

/// Shared convenience wrappers matching the free-function vocabulary.
inline std::optional<RayHit> ray_mesh_intersect(const Bvh& bvh, const Vec3& origin,
                                                const Vec3& dir) {
  return bvh.intersect(origin, dir);
}
inline bool point_in_mesh(const Bvh& bvh, const Vec3& p) { return bvh.contains(p); }
inline SurfacePoint closest_point_on_mesh(const Bvh& bvh, const Vec3& p) {
  return bvh.closest_point(p);
}

}  // namespace toch
