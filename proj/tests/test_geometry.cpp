#include "fixtures.hpp"
#include "oracles.hpp"

#include "toch/bvh.hpp"
#include "toch/error.hpp"
#include "toch/procrustes.hpp"
#include "toch/synthetic_hand.hpp"

#include <doctest.h>

#include <filesystem>

using namespace toch;

namespace {

std::vector<TriMesh> test_meshes() {
  return {make_box(Vec3(0, 0, 0), Vec3(1, 1, 1)), fixture::sphere(0.7, 20, 13),
          make_synthetic_hand().canonical_mesh(), fixture::unit_square()};
}

}  // namespace

TEST_CASE("mesh validation") {
  MatX3 v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Faces bad(1, 3);
  bad << 0, 1, 3;
  CHECK_THROWS_AS(TriMesh(v, bad), Error);
  Faces degenerate(1, 3);
  degenerate << 0, 1, 1;
  CHECK_THROWS_AS(TriMesh(v, degenerate), Error);
  MatX3 flat(3, 3);
  flat << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  Faces ok(1, 3);
  ok << 0, 1, 2;
  try {
    TriMesh m(flat, ok);
    FAIL("collinear triangle accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidMesh);
  }
  for (const TriMesh& m : test_meshes()) {
    for (int f = 0; f < m.num_faces(); ++f) CHECK(std::abs(m.face_normal(f).norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("closedness and volume") {
  const TriMesh box = make_box(Vec3(0, 0, 0), Vec3(1, 2, 3));
  CHECK(box.is_closed());
  CHECK(box.signed_volume() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_FALSE(fixture::unit_square().is_closed());
  const TriMesh hand = make_synthetic_hand().canonical_mesh();
  CHECK(hand.is_closed());
  CHECK(hand.signed_volume() > 0.0);
  const TriMesh mirrored = mirror_mesh(hand);
  CHECK(std::abs(mirrored.signed_volume() - hand.signed_volume()) < 1e-9);
  CHECK(mirror_mesh(mirrored).vertices() == hand.vertices());
  CHECK(mirror_mesh(mirrored).faces() == hand.faces());
}

TEST_CASE("obj round trip") {
  const TriMesh m = fixture::sphere(0.3, 7, 5, Vec3(0.1, -0.2, 0.3));
  const auto path = std::filesystem::temp_directory_path() / "toch_geometry_roundtrip.obj";
  write_obj(path, m);
  const TriMesh back = read_obj(path);
  CHECK(back.vertices() == m.vertices());
  CHECK(back.faces() == m.faces());
  const TriMesh parsed = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\nf -3 -2 -1\n");
  CHECK(parsed.num_faces() == 2);
  CHECK(parsed.faces().row(1) == parsed.faces().row(0));
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 2 3\n"), Error);
  CHECK_THROWS_AS(read_obj("/nonexistent/mesh.obj"), Error);
}

TEST_CASE("ray: planar square") {
  const Bvh bvh(fixture::unit_square());
  const auto hit = bvh.intersect(Vec3(0.3, 0.6, -2.5), Vec3(0, 0, 1));
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(2.5).epsilon(1e-15));
  CHECK((hit->point.position - Vec3(0.3, 0.6, 0)).norm() < 1e-12);
  CHECK_FALSE(bvh.intersect(Vec3(5, 5, -1), Vec3(0, 0, 1)));
  CHECK_FALSE(bvh.intersect(Vec3(0.5, 0.5, 1), Vec3(0, 0, 1)));
  // grazing: parallel to the plane
  CHECK_FALSE(bvh.intersect(Vec3(-1, 0.5, 0), Vec3(1, 0, 0)));
  try {
    bvh.intersect(Vec3(0, 0, -1), Vec3(0, 0, 2));
    FAIL("non-unit direction accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDirection);
  }
}

TEST_CASE("ray: equal t goes to the lowest face") {
  // two coincident triangles
  MatX3 v(6, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Faces f(2, 3);
  f << 3, 4, 5, 0, 1, 2;
  const Bvh bvh(TriMesh(v, f));
  const auto hit = bvh.intersect(Vec3(0.2, 0.2, -1), Vec3(0, 0, 1));
  REQUIRE(hit);
  CHECK(hit->point.face == 0);
}

TEST_CASE("ray: brute-force equivalence") {
  CounterRng rng(7, 0);
  for (const TriMesh& m : test_meshes()) {
    const Bvh bvh(m);
    const Aabb box = m.bounds();
    const Vec3 pad = Vec3::Constant(0.5 * box.extent().maxCoeff());
    int hits = 0;
    for (int r = 0; r < 400; ++r) {
      const Vec3 o = fixture::uniform_in(rng, box.min - pad, box.max + pad);
      Vec3 d;
      if (r % 2 == 0) {
        const int f = static_cast<int>(rng.uniform() * m.num_faces());
        const double a = rng.uniform(), b = rng.uniform() * (1 - a);
        d = (m.point_on_face(f, Vec3(a, b, 1 - a - b)) - o).normalized();
      } else {
        d = fixture::unit_vector(rng);
      }
      const auto got = bvh.intersect(o, d);
      const auto want = oracle::ray_mesh(m, o, d);
      REQUIRE(got.has_value() == want.has_value());
      if (!got) continue;
      ++hits;
      CHECK(got->point.face == want->face);
      CHECK(std::abs(got->t - want->t) <= 1e-12 * std::max(1.0, want->t));
    }
    CHECK(hits > 100);
  }
}

TEST_CASE("insideness") {
  const TriMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
  const Bvh cube_bvh(cube);
  CHECK(cube_bvh.contains(Vec3(0.5, 0.5, 0.5)));
  CHECK_FALSE(cube_bvh.contains(Vec3(0.5, 0.5, 3.0)));

  CounterRng rng(11, 0);
  for (const TriMesh& m : test_meshes()) {
    const Bvh bvh(m);
    const Aabb box = m.bounds();
    const Vec3 pad = 0.2 * box.extent() + Vec3::Constant(0.05);
    int inside = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p = fixture::uniform_in(rng, box.min - pad, box.max + pad);
      const double w = oracle::winding_number(m, p);
      CHECK(bvh.contains(p) == (w > 0.5));
      // the half-angle formula loses digits for thin triangles
      CHECK(std::abs(bvh.winding_number(p) - w) < 1e-6);
      inside += w > 0.5;
    }
    if (m.is_closed()) CHECK(inside > 0);
  }
}

TEST_CASE("insideness: rigid invariance") {
  CounterRng rng(12, 0);
  const TriMesh m = make_synthetic_hand().canonical_mesh();
  const Bvh bvh(m);
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform tr = fixture::random_rigid(rng);
    const Bvh moved(m.transformed(tr));
    const Aabb box = m.bounds();
    for (int i = 0; i < 200; ++i) {
      const Vec3 p = fixture::uniform_in(rng, box.min, box.max);
      CHECK(bvh.contains(p) == moved.contains(tr.apply(p)));
    }
  }
}

TEST_CASE("closest point") {
  const TriMesh m = fixture::sphere(0.5, 12, 8);
  const Bvh bvh(m);
  const int v = 5;
  const SurfacePoint at_vertex = bvh.closest_point(m.vertex(v));
  CHECK((at_vertex.position - m.vertex(v)).norm() == 0.0);
  const auto face = m.faces().row(at_vertex.face);
  int corner = -1;
  for (int c = 0; c < 3; ++c) {
    if (face[c] == v) corner = c;
  }
  REQUIRE(corner >= 0);
  CHECK(at_vertex.barycentric == Vec3::Unit(corner));

  const TriMesh square = fixture::unit_square();
  const Bvh sq(square);
  const Vec3 centroid = (square.vertex(0) + square.vertex(1) + square.vertex(2)) / 3.0;
  const SurfacePoint above = sq.closest_point(centroid + Vec3(0, 0, 0.7));
  CHECK(above.face == 0);
  CHECK((above.barycentric - Vec3::Constant(1.0 / 3.0)).norm() < 1e-9);
  CHECK((above.position - centroid).norm() < 1e-9);

  CounterRng rng(13, 0);
  for (const TriMesh& mesh : test_meshes()) {
    const Bvh b(mesh);
    const Aabb box = mesh.bounds();
    const Vec3 pad = 0.3 * box.extent() + Vec3::Constant(1e-3);
    for (int i = 0; i < 300; ++i) {
      const Vec3 p = fixture::uniform_in(rng, box.min - pad, box.max + pad);
      const SurfacePoint sp = b.closest_point(p);
      CHECK(std::abs((sp.position - p).norm() - oracle::closest_distance(mesh, p)) < 1e-9);
      CHECK((mesh.point_on_face(sp.face, sp.barycentric) - sp.position).norm() < 1e-12);
    }
    // zero distance exactly on the surface
    for (int i = 0; i < 50; ++i) {
      const int f = static_cast<int>(rng.uniform() * mesh.num_faces());
      const double a = rng.uniform(), c = rng.uniform() * (1 - a);
      const Vec3 p = mesh.point_on_face(f, Vec3(a, c, 1 - a - c));
      CHECK((b.closest_point(p).position - p).norm() < 1e-9);
    }
  }
}

TEST_CASE("procrustes") {
  CounterRng rng(21, 0);
  MatX3 src(40, 3);
  for (int i = 0; i < src.rows(); ++i) src.row(i) = fixture::uniform_in(rng, Vec3(-1, -1, -1), Vec3(1, 1, 1)).transpose();
  const RigidTransform tr = fixture::random_rigid(rng);
  MatX3 dst(src.rows(), 3);
  for (int i = 0; i < src.rows(); ++i) dst.row(i) = tr.apply(src.row(i).transpose()).transpose();
  const auto a = procrustes_align<double>(src, dst);
  CHECK((a.rotation - tr.rotation).norm() < 1e-9);
  CHECK((a.translation - tr.translation).norm() < 1e-9);
  CHECK(a.scale == 1.0);

  const auto id = procrustes_align<double>(src, src);
  CHECK((id.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(id.translation.norm() < 1e-12);

  MatX3 line(4, 3);
  line << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
  CHECK_THROWS_AS(procrustes_align<double>(line, line), Error);
  CHECK_THROWS_AS(procrustes_align<double>(src, line), Error);
}

TEST_CASE("procrustes: not worse than a small-angle grid search") {
  CounterRng rng(22, 0);
  MatX3 src(25, 3);
  for (int i = 0; i < src.rows(); ++i) src.row(i) = fixture::uniform_in(rng, Vec3(-1, -1, -1), Vec3(1, 1, 1)).transpose();
  const Mat3 r0 = rodrigues<double>(Vec3(0.05, -0.03, 0.04));
  MatX3 dst = src * r0.transpose();
  for (int i = 0; i < dst.rows(); ++i) dst.row(i) += 0.02 * Eigen::RowVector3d(rng.normal(), rng.normal(), rng.normal());
  auto rmsd_for = [&](const Mat3& r) {
    // optimal translation for a fixed rotation aligns the centroids
    MatX3 rotated = src * r.transpose();
    const Eigen::RowVector3d t = dst.colwise().mean() - rotated.colwise().mean();
    rotated.rowwise() += t;
    return std::sqrt((rotated - dst).rowwise().squaredNorm().mean());
  };
  double grid_best = 1e300;
  const double step = 0.01;
  for (int i = -8; i <= 8; ++i) {
    for (int j = -8; j <= 8; ++j) {
      for (int k = -8; k <= 8; ++k) {
        grid_best = std::min(grid_best, rmsd_for(rodrigues<double>(Vec3(i, j, k) * step)));
      }
    }
  }
  const auto a = procrustes_align<double>(src, dst);
  const double got = std::sqrt((apply_alignment(a, src) - dst).rowwise().squaredNorm().mean());
  CHECK(got <= grid_best + 1e-12);
}
