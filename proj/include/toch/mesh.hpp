#pragma once

#include "toch/types.hpp"

#include <filesystem>
#include <string>

namespace toch {

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& other) {
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool contains(const Aabb& other) const {
    return (other.min.array() >= min.array()).all() && (other.max.array() <= max.array()).all();
  }
  bool overlaps(const Aabb& other) const {
    return (min.array() <= other.max.array()).all() && (other.min.array() <= max.array()).all();
  }
  Aabb intersection(const Aabb& other) const {
    return {min.cwiseMax(other.min), max.cwiseMin(other.max)};
  }
  Vec3 extent() const { return max - min; }
  /// Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (min - p).cwiseMax(p - max).cwiseMax(0.0);
    return d.squaredNorm();
  }
};

/// A location on a triangle of some mesh. Barycentric weights refer to the
/// face's vertices in order.
struct SurfacePoint {
  int face = -1;
  Vec3 barycentric = Vec3::Zero();
  Vec3 position = Vec3::Zero();
};

/// Indexed triangle surface. Validated on construction: indices in range and
/// no face with area <= 1e-12 m^2.
class TriMesh {
 public:
  static constexpr double kMinFaceArea = 1e-12;

  TriMesh() = default;
  TriMesh(MatX3 vertices, Faces faces);

  const MatX3& vertices() const { return vertices_; }
  const Faces& faces() const { return faces_; }
  const MatX3& face_normals() const { return face_normals_; }

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_faces() const { return static_cast<int>(faces_.rows()); }
  bool empty() const { return faces_.rows() == 0; }

  Vec3 vertex(int i) const { return vertices_.row(i).transpose(); }
  Vec3 face_normal(int f) const { return face_normals_.row(f).transpose(); }
  double face_area(int f) const;
  Vec3 point_on_face(int f, const Vec3& barycentric) const;
  SurfacePoint surface_point(int f, const Vec3& barycentric) const;

  Aabb bounds() const;
  /// Every directed edge is matched by exactly one opposite directed edge.
  bool is_closed() const { return closed_; }
  /// Signed enclosed volume (divergence theorem); positive for outward faces.
  double signed_volume() const;

  TriMesh transformed(const RigidTransform& transform) const;
  TriMesh translated(const Vec3& offset) const;
  /// Same faces, new vertex positions.
  TriMesh with_vertices(MatX3 vertices) const;

 private:
  MatX3 vertices_;
  Faces faces_;
  MatX3 face_normals_;
  bool closed_ = false;
};

/// Reflection across the x = 0 plane with reversed winding so face normals
/// stay outward.
TriMesh mirror_mesh(const TriMesh& mesh);

/// Axis-aligned box mesh (12 triangles, outward normals).
TriMesh make_box(const Vec3& min, const Vec3& max);

/// ASCII OBJ, triangles only. `f` entries may carry /vt/vn suffixes which are
/// ignored. Indices are 1-based; negative (relative) indices are accepted.
TriMesh read_obj(const std::filesystem::path& path);
TriMesh parse_obj(const std::string& text, const std::string& source = "<string>");
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace toch
