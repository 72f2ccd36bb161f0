#include "fixtures.hpp"

#include "toch/bvh.hpp"
#include "toch/error.hpp"
#include "toch/rng.hpp"
#include "toch/sampling.hpp"
#include "toch/voxel.hpp"

#include <doctest.h>

#include <cmath>

using namespace toch;

TEST_CASE("rng: fixed stream values and independence") {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CounterRng u(1, 0);
  double mean = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    mean += x / n;
  }
  CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CounterRng g(2, 0);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.normal();
    m1 += x / n;
    m2 += x * x / n;
  }
  CHECK(std::abs(m1) < 4.0 / std::sqrt(n));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("sample_surface: per-triangle counts are binomial") {
  const TriMesh square = fixture::unit_square();
  const int n = 100000;
  for (std::uint64_t seed : {0ull, 1ull, 12345ull}) {
    const ObjectPointSet ps = sample_surface(square, n, seed);
    REQUIRE(ps.size() == n);
    int first = 0;
    for (int f : ps.faces) first += f == 0;
    const double sigma = std::sqrt(n * 0.25);
    CHECK(std::abs(first - n / 2.0) < 3.0 * sigma);
  }
}

TEST_CASE("sample_surface: points on faces with face normals") {
  const TriMesh m = fixture::sphere(0.3, 9, 6);
  const ObjectPointSet ps = sample_surface(m, 500, 9);
  for (int i = 0; i < ps.size(); ++i) {
    const int f = ps.faces[i];
    const auto face = m.faces().row(f);
    const Vec3 a = m.vertex(face[0]), b = m.vertex(face[1]), c = m.vertex(face[2]);
    const Vec3 n = m.face_normal(f);
    CHECK(std::abs((ps.point(i) - a).dot(n)) < 1e-9);
    // inside the triangle: all edge tests non-negative
    const Vec3 p = ps.point(i);
    CHECK((b - a).cross(p - a).dot(n) >= -1e-12);
    CHECK((c - b).cross(p - b).dot(n) >= -1e-12);
    CHECK((a - c).cross(p - c).dot(n) >= -1e-12);
    CHECK(ps.normal(i) == n);
  }
}

TEST_CASE("sample_surface: single triangle and determinism") {
  MatX3 v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Faces f(1, 3);
  f << 0, 1, 2;
  const TriMesh tri(v, f);
  const ObjectPointSet one = sample_surface(tri, 1, 5);
  REQUIRE(one.size() == 1);
  CHECK(one.point(0).x() >= 0.0);
  CHECK(one.point(0).y() >= 0.0);
  CHECK(one.point(0).x() + one.point(0).y() <= 1.0);
  CHECK(one.normal(0) == Vec3(0, 0, 1));

  const TriMesh m = fixture::sphere(0.3, 9, 6);
  const ObjectPointSet a = sample_surface(m, 777, 3), b = sample_surface(m, 777, 3);
  CHECK(a.points == b.points);
  CHECK(a.normals == b.normals);
  CHECK(a.faces == b.faces);
  CHECK(sample_surface(m, 777, 4).points != a.points);
  CHECK_THROWS_AS(sample_surface(m, 0, 1), Error);
}

TEST_CASE("voxelize_solid: unit cube") {
  const Bvh cube(make_box(Vec3(0, 0, 0), Vec3(1, 1, 1)));
  // aligned grid one voxel wider on every side
  const OccupancyGrid g = voxelize_solid(cube, 0.1, Vec3::Constant(-0.1), {12, 12, 12});
  CHECK(g.count() == 1000);
  CHECK(std::abs(g.occupied_volume() - 1.0) < 0.05);

  // cube not aligned with the grid: along each axis the number of covered
  // centers is within one of side / edge, which bounds the estimate
  const double side = 0.937;
  const Bvh offset(make_box(Vec3(0.013, 0.027, 0.041), Vec3(0.013 + side, 0.027 + side, 0.041 + side)));
  double last_error = 0.0;
  for (double edge : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const int n = static_cast<int>(std::ceil(1.1 / edge));
    const double volume = voxelize_solid(offset, edge, Vec3::Zero(), {n, n, n}).occupied_volume();
    const double lo = std::pow(std::max(0.0, side / edge - 1.0) * edge, 3);
    const double hi = std::pow((side / edge + 1.0) * edge, 3);
    CHECK(volume >= lo);
    CHECK(volume <= hi);
    last_error = std::abs(volume - side * side * side);
  }
  CHECK(last_error < 0.01 * side * side * side);
}

TEST_CASE("voxelize_solid: errors and empty regions") {
  const Bvh cube(make_box(Vec3(0, 0, 0), Vec3(1, 1, 1)));
  try {
    voxelize_solid(cube, 0.1, Vec3(5, 5, 5), {4, 4, 4});
    FAIL("grid outside the mesh accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooSmall);
  }
  CHECK_THROWS_AS(voxelize_solid(cube, 0.1, Vec3(0.2, 0, 0), {10, 10, 10}), Error);

  // the grid covers the mesh; cells in a far region of it stay empty
  const Bvh moved(make_box(Vec3(10, 10, 10), Vec3(11, 11, 11)));
  const OccupancyGrid g = voxelize_solid(moved, 0.5, Vec3(0, 0, 0), {24, 24, 24});
  std::size_t far = 0;
  for (int k = 0; k < 10; ++k) {
    for (int j = 0; j < 10; ++j) {
      for (int i = 0; i < 10; ++i) far += g.at(i, j, k);
    }
  }
  CHECK(far == 0);
  CHECK(g.count() == 8);
}
