#include "toch/bvh.hpp"

#include "toch/error.hpp"
#include "toch/triangle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace toch {

namespace {

// Slab test against [0, t_max]; boxes are padded at build time so the
// comparison can be inclusive without missing edge-on hits.
bool ray_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_max,
             double& t_near) {
  double lo = 0.0;
  double hi = t_max;
  for (int k = 0; k < 3; ++k) {
    double t0 = (box.min[k] - origin[k]) * inv_dir[k];
    double t1 = (box.max[k] - origin[k]) * inv_dir[k];
    if (std::isnan(t0) || std::isnan(t1)) {
      // Zero direction component with origin on a slab plane.
      if (origin[k] < box.min[k] || origin[k] > box.max[k]) return false;
      continue;
    }
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    if (lo > hi) return false;
  }
  t_near = lo;
  return true;
}

}  // namespace

Bvh::Bvh(TriMesh mesh, int leaf_size) : mesh_(std::move(mesh)) {
  const int n = mesh_.num_faces();
  order_.resize(n);
  for (int i = 0; i < n; ++i) order_[i] = i;
  std::vector<Vec3> centroids(n);
  for (int f = 0; f < n; ++f) {
    centroids[f] = mesh_.point_on_face(f, Vec3::Constant(1.0 / 3.0));
  }
  nodes_.reserve(n > 0 ? 2 * n : 1);
  if (n == 0) {
    nodes_.push_back(Node{});
    return;
  }
  build(0, n, centroids, std::max(1, leaf_size));
}

Aabb Bvh::face_box(int f) const {
  Aabb box;
  for (int k = 0; k < 3; ++k) box.extend(mesh_.vertex(mesh_.faces()(f, k)));
  return box;
}

int Bvh::build(int begin, int end, const std::vector<Vec3>& centroids, int leaf_size) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  Aabb box;
  Aabb centroid_box;
  for (int i = begin; i < end; ++i) {
    box.extend(face_box(order_[i]));
    centroid_box.extend(centroids[order_[i]]);
  }
  const double pad = 1e-9 * std::max(1.0, box.extent().maxCoeff());
  box.min.array() -= pad;
  box.max.array() += pad;
  nodes_[index].box = box;

  if (end - begin <= leaf_size) {
    nodes_[index].begin = begin;
    nodes_[index].end = end;
    return index;
  }
  int axis = 0;
  centroid_box.extent().maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = centroids[a][axis];
                     const double cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build(begin, mid, centroids, leaf_size);
  const int right = build(mid, end, centroids, leaf_size);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::optional<RayHit> Bvh::intersect(const Vec3& origin, const Vec3& dir) const {
  if (!dir.allFinite() || std::abs(dir.norm() - 1.0) > kUnitTolerance) {
    fail(ErrorCode::InvalidDirection, "ray direction must be unit length");
  }
  if (mesh_.empty()) return std::nullopt;
  const Vec3 inv_dir = dir.cwiseInverse();

  double best_t = std::numeric_limits<double>::infinity();
  int best_face = -1;
  Vec3 best_bary = Vec3::Zero();

  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double t_near = 0.0;
    if (!ray_box(node.box, origin, inv_dir, best_t, t_near)) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[i];
        if (std::abs(dir.dot(mesh_.face_normal(f))) < kGrazingCosine) continue;
        const auto& face = mesh_.faces();
        auto hit = intersect_ray_triangle<double>(origin, dir, mesh_.vertex(face(f, 0)),
                                                  mesh_.vertex(face(f, 1)),
                                                  mesh_.vertex(face(f, 2)));
        if (!hit || hit->t < 0.0) continue;
        if (hit->t < best_t || (hit->t == best_t && f < best_face)) {
          best_t = hit->t;
          best_face = f;
          best_bary = hit->barycentric;
        }
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  if (best_face < 0) return std::nullopt;
  return RayHit{mesh_.surface_point(best_face, best_bary), best_t};
}

double Bvh::winding_number(const Vec3& p) const {
  if (mesh_.empty()) return 0.0;
  // A closed surface has winding number exactly zero outside its hull.
  if (mesh_.is_closed() && !bounds().contains(p)) return 0.0;
  const auto& face = mesh_.faces();
  double total = 0.0;
  for (int f = 0; f < mesh_.num_faces(); ++f) {
    total += solid_angle<double>(p, mesh_.vertex(face(f, 0)), mesh_.vertex(face(f, 1)),
                                 mesh_.vertex(face(f, 2)));
  }
  return total / (4.0 * std::numbers::pi);
}

SurfacePoint Bvh::closest_point(const Vec3& p) const {
  if (mesh_.empty()) fail(ErrorCode::InvalidMesh, "closest point query on an empty mesh");
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_face = -1;
  Vec3 best_bary = Vec3::Zero();

  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  const auto& face = mesh_.faces();
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(p) > best_d2) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[i];
        const Vec3 a = mesh_.vertex(face(f, 0));
        const Vec3 b = mesh_.vertex(face(f, 1));
        const Vec3 c = mesh_.vertex(face(f, 2));
        const Vec3 bary = closest_point_triangle_barycentric<double>(p, a, b, c);
        const double d2 = (bary[0] * a + bary[1] * b + bary[2] * c - p).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && f < best_face)) {
          best_d2 = d2;
          best_face = f;
          best_bary = bary;
        }
      }
    } else {
      // Visit the nearer child first.
      const double dl = nodes_[node.left].box.squared_distance(p);
      const double dr = nodes_[node.right].box.squared_distance(p);
      if (dl <= dr) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
  }
  return mesh_.surface_point(best_face, best_bary);
}

}  // namespace toch
