// Small meshes and random draws shared by the tests.
#pragma once

#include "toch/mesh.hpp"
#include "toch/rng.hpp"
#include "toch/rotation.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fixture {

using toch::Vec3;

// Closed UV sphere with 2 * slices * (stacks - 1) faces.
inline toch::TriMesh sphere(double radius, int slices, int stacks, const Vec3& center = Vec3::Zero()) {
  std::vector<Vec3> v;
  v.push_back(center + Vec3(0, 0, radius));
  for (int i = 1; i < stacks; ++i) {
    const double phi = std::numbers::pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double th = 2.0 * std::numbers::pi * j / slices;
      v.push_back(center + radius * Vec3(std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th),
                                         std::cos(phi)));
    }
  }
  v.push_back(center + Vec3(0, 0, -radius));
  const int south = static_cast<int>(v.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
  std::vector<toch::Face> f;
  for (int j = 0; j < slices; ++j) f.emplace_back(0, ring(1, j), ring(1, j + 1));
  for (int i = 1; i + 1 < stacks; ++i) {
    for (int j = 0; j < slices; ++j) {
      f.emplace_back(ring(i, j), ring(i + 1, j), ring(i + 1, j + 1));
      f.emplace_back(ring(i, j), ring(i + 1, j + 1), ring(i, j + 1));
    }
  }
  for (int j = 0; j < slices; ++j) f.emplace_back(south, ring(stacks - 1, j + 1), ring(stacks - 1, j));
  toch::MatX3 vm(v.size(), 3);
  for (std::size_t i = 0; i < v.size(); ++i) vm.row(i) = v[i].transpose();
  toch::Faces fm(f.size(), 3);
  for (std::size_t i = 0; i < f.size(); ++i) fm.row(i) = f[i];
  return toch::TriMesh(vm, fm);
}

// Unit square in z = 0 made of two triangles, normal +z.
inline toch::TriMesh unit_square() {
  toch::MatX3 v(4, 3);
  v << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
  toch::Faces f(2, 3);
  f << 0, 1, 2, 0, 2, 3;
  return toch::TriMesh(v, f);
}

inline Vec3 uniform_in(toch::CounterRng& rng, const Vec3& lo, const Vec3& hi) {
  return Vec3(lo.x() + (hi.x() - lo.x()) * rng.uniform(), lo.y() + (hi.y() - lo.y()) * rng.uniform(),
              lo.z() + (hi.z() - lo.z()) * rng.uniform());
}

inline Vec3 unit_vector(toch::CounterRng& rng) {
  return Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
}

inline toch::RigidTransform random_rigid(toch::CounterRng& rng, double max_translation = 1.0) {
  toch::RigidTransform tr;
  tr.rotation = toch::rodrigues<double>(unit_vector(rng) * (3.0 * rng.uniform()));
  tr.translation = max_translation * Vec3(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  return tr;
}

}  // namespace fixture
