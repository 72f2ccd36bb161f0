#pragma once

#include "toch/types.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace toch {

template <typename Scalar>
struct RayTriangleHit {
  Scalar t;
  Vector3<Scalar> barycentric;  // weights of (v0, v1, v2)
};

/// Watertight ray/triangle test (Woop, Benthin and Wald 2013). Rays along an
/// edge shared by two triangles hit exactly one of them. Back faces count.
template <typename Scalar>
std::optional<RayTriangleHit<Scalar>> intersect_ray_triangle(
    const Vector3<Scalar>& origin, const Vector3<Scalar>& dir, const Vector3<Scalar>& v0,
    const Vector3<Scalar>& v1, const Vector3<Scalar>& v2) {
  int kz = 0;
  dir.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < Scalar(0)) std::swap(kx, ky);

  const Scalar sx = dir[kx] / dir[kz];
  const Scalar sy = dir[ky] / dir[kz];
  const Scalar sz = Scalar(1) / dir[kz];

  const Vector3<Scalar> a = v0 - origin;
  const Vector3<Scalar> b = v1 - origin;
  const Vector3<Scalar> c = v2 - origin;

  const Scalar ax = a[kx] - sx * a[kz];
  const Scalar ay = a[ky] - sy * a[kz];
  const Scalar bx = b[kx] - sx * b[kz];
  const Scalar by = b[ky] - sy * b[kz];
  const Scalar cx = c[kx] - sx * c[kz];
  const Scalar cy = c[ky] - sy * c[kz];

  const Scalar u = cx * by - cy * bx;
  const Scalar v = ax * cy - ay * cx;
  const Scalar w = bx * ay - by * ax;

  if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return std::nullopt;
  const Scalar det = u + v + w;
  if (det == Scalar(0)) return std::nullopt;

  const Scalar t_scaled = u * (sz * a[kz]) + v * (sz * b[kz]) + w * (sz * c[kz]);
  if ((det > 0 && t_scaled < 0) || (det < 0 && t_scaled > 0)) return std::nullopt;

  const Scalar inv_det = Scalar(1) / det;
  return RayTriangleHit<Scalar>{t_scaled * inv_det,
                                Vector3<Scalar>(u * inv_det, v * inv_det, w * inv_det)};
}

/// Closest point on a triangle, returned as barycentric weights of (a, b, c).
/// Region classification after Ericson, Real-Time Collision Detection 5.1.5.
template <typename Scalar>
Vector3<Scalar> closest_point_triangle_barycentric(const Vector3<Scalar>& p,
                                                   const Vector3<Scalar>& a,
                                                   const Vector3<Scalar>& b,
                                                   const Vector3<Scalar>& c) {
  using V = Vector3<Scalar>;
  const V ab = b - a;
  const V ac = c - a;
  const V ap = p - a;
  const Scalar d1 = ab.dot(ap);
  const Scalar d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return V(1, 0, 0);

  const V bp = p - b;
  const Scalar d3 = ab.dot(bp);
  const Scalar d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return V(0, 1, 0);

  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const Scalar v = d1 / (d1 - d3);
    return V(1 - v, v, 0);
  }

  const V cp = p - c;
  const Scalar d5 = ab.dot(cp);
  const Scalar d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return V(0, 0, 1);

  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const Scalar w = d2 / (d2 - d6);
    return V(1 - w, 0, w);
  }

  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const Scalar w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return V(0, 1 - w, w);
  }

  const Scalar denom = Scalar(1) / (va + vb + vc);
  const Scalar v = vb * denom;
  const Scalar w = vc * denom;
  return V(1 - v - w, v, w);
}

/// Signed solid angle subtended by triangle (a, b, c) at p (Van Oosterom and
/// Strackee). Positive when p sees the back side of a counter-clockwise face.
template <typename Scalar>
Scalar solid_angle(const Vector3<Scalar>& p, const Vector3<Scalar>& a, const Vector3<Scalar>& b,
                   const Vector3<Scalar>& c) {
  const Vector3<Scalar> x = a - p;
  const Vector3<Scalar> y = b - p;
  const Vector3<Scalar> z = c - p;
  const Scalar lx = x.norm();
  const Scalar ly = y.norm();
  const Scalar lz = z.norm();
  const Scalar numerator = x.dot(y.cross(z));
  const Scalar denominator = lx * ly * lz + x.dot(y) * lz + y.dot(z) * lx + z.dot(x) * ly;
  return Scalar(2) * std::atan2(numerator, denominator);
}

}  // namespace toch
